// SPDX-License-Identifier: Apache-2.0
#include "dfmap/mapper.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

#include "dfmap/error.hpp"

namespace dfmap {

std::string Mapping::encoding() const {
  std::ostringstream os;
  bool first = true;
  for (const auto& [var, dims] : tiling) {
    os << (first ? "" : " ") << var << "=[";
    first = false;
    for (std::size_t i = 0; i < dims.size(); ++i) os << (i ? "," : "") << dims[i];
    os << "]";
  }
  os << (first ? "" : " ") << "waves=(";
  for (std::size_t i = 0; i < wave_order.size(); ++i) os << (i ? "," : "") << wave_order[i];
  os << ")";
  return os.str();
}

std::string wave_var_name(const std::string& grid_var) {
  if (grid_var.size() > 1 && grid_var[0] == 'g') return "t" + grid_var.substr(1);
  return "t" + grid_var;
}

std::pair<std::vector<std::int64_t>, std::int64_t> used_counts(std::int64_t extent,
                                                               const std::vector<std::int64_t>& sizes) {
  std::vector<std::int64_t> used(sizes.size(), 1);
  std::int64_t rem = extent;
  for (std::size_t i = sizes.size(); i-- > 0;) {
    used[i] = std::min(sizes[i], rem);
    rem = (rem + sizes[i] - 1) / sizes[i];
  }
  return {used, rem};
}

Env core_env(const HardwareModel& hw, const Index& core) {
  Env env;
  if (!hw.cores) return env;
  for (std::size_t d = 0; d < hw.cores->dims.size(); ++d) env[hw.cores->dims[d]] = core.at(d);
  return env;
}

namespace {

std::int64_t lookup(const Env& env, const std::string& name) {
  auto it = env.find(name);
  return it == env.end() ? 0 : it->second;
}

// The wave var names of a kernel, disambiguated against every other name.
std::map<std::string, std::string> wave_names(const TileKernel& kernel, const HardwareModel& hw) {
  std::set<std::string> taken;
  for (const auto& v : kernel.vars) taken.insert(v.name);
  for (const auto& d : hw.dims) taken.insert(d.name);
  std::map<std::string, std::string> out;
  for (const auto* g : kernel.grid_vars()) {
    std::string name = wave_var_name(g->name);
    while (taken.count(name)) name += "_w";
    taken.insert(name);
    out[g->name] = name;
  }
  return out;
}

// Drops dims that never carry more than one index and returns the wave
// extents of the canonical assignment.
std::map<std::string, std::int64_t> canonicalize(SpatialAssignment& tiling, const TileKernel& kernel,
                                                 const HardwareModel& hw) {
  std::map<std::string, std::int64_t> waves;
  for (const auto* g : kernel.grid_vars()) {
    auto& dims = tiling[g->name];
    std::vector<std::int64_t> sizes;
    for (const auto& d : dims) sizes.push_back(hw.dim_size(d));
    const auto [used, w] = used_counts(g->extent, sizes);
    std::vector<std::string> kept;
    for (std::size_t i = 0; i < dims.size(); ++i) {
      if (used[i] > 1) kept.push_back(dims[i]);
    }
    dims = std::move(kept);
    waves[g->name] = w;
  }
  return waves;
}

}  // namespace

bool MappedNest::active(const Env& env) const {
  for (const auto& d : idle_dims) {
    if (lookup(env, d) != 0) return false;
  }
  for (const auto& [g, expr] : grid_exprs) {
    if (expr.eval(env) >= grid_extents.at(g)) return false;
  }
  return true;
}

bool MappedNest::core_active(const Env& core_env) const {
  // The first wave is the least masked one.
  Env env = core_env;
  for (const auto& l : loops) env.emplace(l.var, 0);
  return active(env);
}

std::int64_t MappedNest::trip_count(std::size_t l, const Env& env) const {
  const TemporalLoop& loop = loops.at(l);
  if (loop.kind == LoopKind::Sequential) return loop.extent;
  const AffineExpr& expr = grid_exprs.at(loop.source);
  Env probe = env;
  probe[loop.var] = 0;
  const std::int64_t base = expr.eval(probe);
  const std::int64_t stride = expr.coeff(loop.var);
  const std::int64_t extent = grid_extents.at(loop.source);
  if (base >= extent) return 0;
  return std::min(loop.extent, (extent - base + stride - 1) / stride);
}

const Access* MappedNest::access(std::string_view id) const {
  auto it = std::find_if(accesses.begin(), accesses.end(), [&](const Access& a) { return a.id == id; });
  return it == accesses.end() ? nullptr : &*it;
}

std::vector<Mapping> enumerate_mappings(const TileKernel& kernel, const HardwareModel& hw,
                                        const MapperOptions& options) {
  if (!hw.cores || hw.cores->dims.empty()) throw InputError("hardware model declares no spatial dims");
  const auto grid = kernel.grid_vars();
  const auto& dims = hw.cores->dims;
  std::map<std::string, Mapping> unique;

  auto emit = [&](SpatialAssignment tiling) {
    const auto waves = canonicalize(tiling, kernel, hw);
    std::vector<std::string> wave_vars;
    for (const auto& [g, w] : waves) {
      if (w > 1) wave_vars.push_back(g);
    }
    std::sort(wave_vars.begin(), wave_vars.end());
    do {
      Mapping m{tiling, wave_vars};
      unique.emplace(m.encoding(), std::move(m));
    } while (std::next_permutation(wave_vars.begin(), wave_vars.end()));
  };

  // choice[d] in [0, grid.size()]: index of the grid var, or grid.size() for unused.
  std::vector<std::size_t> choice(dims.size(), 0);
  std::function<void(std::size_t)> assign = [&](std::size_t d) {
    if (d == dims.size()) {
      SpatialAssignment base;
      for (const auto* g : grid) base[g->name] = {};
      for (std::size_t i = 0; i < dims.size(); ++i) {
        if (choice[i] < grid.size()) base[grid[choice[i]]->name].push_back(dims[i]);
      }
      // Every tiling order for every grid var that received several dims.
      std::vector<std::string> vars;
      for (auto& [g, ds] : base) {
        std::sort(ds.begin(), ds.end());
        vars.push_back(g);
      }
      std::function<void(std::size_t, SpatialAssignment&)> orders = [&](std::size_t v, SpatialAssignment& cur) {
        if (v == vars.size()) {
          emit(cur);
          return;
        }
        auto& ds = cur[vars[v]];
        std::sort(ds.begin(), ds.end());
        do {
          orders(v + 1, cur);
        } while (std::next_permutation(ds.begin(), ds.end()));
      };
      orders(0, base);
      return;
    }
    for (std::size_t c = 0; c <= grid.size(); ++c) {
      choice[d] = c;
      assign(d + 1);
    }
  };
  assign(0);

  std::vector<Mapping> out;
  for (auto& [enc, m] : unique) {
    if (out.size() >= options.max_mappings) break;
    out.push_back(std::move(m));
  }
  return out;
}

MappedNest apply_mapping(const TileKernel& kernel, const HardwareModel& hw, const Mapping& mapping) {
  if (!hw.cores) throw InputError("hardware model declares no core grid");
  for (const auto& v : kernel.vars) {
    if (hw.find_dim(v.name)) {
      throw InputError("kernel var '" + v.name + "' collides with hardware dim of the same name");
    }
  }
  const auto names = wave_names(kernel, hw);
  MappedNest nest;
  nest.mapping = mapping;
  nest.body = kernel.ops;

  std::map<std::string, std::int64_t> wave_extent;
  for (const auto* g : kernel.grid_vars()) {
    auto it = mapping.tiling.find(g->name);
    const std::vector<std::string> dims = it == mapping.tiling.end() ? std::vector<std::string>{} : it->second;
    std::vector<std::int64_t> sizes;
    for (const auto& d : dims) sizes.push_back(hw.dim_size(d));
    const auto [used, w] = used_counts(g->extent, sizes);
    // g = t * prod(sizes) + sum_i dim_i * prod(sizes inner to i)
    AffineExpr expr;
    std::int64_t stride = 1;
    for (std::size_t i = dims.size(); i-- > 0;) {
      expr = expr + AffineExpr::var(dims[i], stride);
      stride *= sizes[i];
    }
    const bool has_wave = std::find(mapping.wave_order.begin(), mapping.wave_order.end(), g->name) !=
                          mapping.wave_order.end();
    if (w > 1 && !has_wave) {
      throw InputError("mapping '" + mapping.encoding() + "' omits the wave loop of '" + g->name + "'");
    }
    if (has_wave) expr = expr + AffineExpr::var(names.at(g->name), stride);
    if (w * stride > g->extent) nest.masked = true;
    nest.grid_exprs[g->name] = expr;
    nest.grid_extents[g->name] = g->extent;
    wave_extent[g->name] = w;
  }

  for (const auto& d : hw.cores->dims) {
    std::string owner;
    for (const auto& [g, ds] : mapping.tiling) {
      if (std::find(ds.begin(), ds.end(), d) != ds.end()) {
        if (!owner.empty()) throw InputError("dim '" + d + "' assigned to two grid vars");
        owner = g;
      }
    }
    if (owner.empty() || !kernel.var(owner)) {
      if (hw.dim_size(d) > 1) nest.idle_dims.push_back(d);
      continue;
    }
    const auto& ds = mapping.tiling.at(owner);
    std::vector<std::int64_t> sizes;
    for (const auto& x : ds) sizes.push_back(hw.dim_size(x));
    const auto used = used_counts(kernel.var(owner)->extent, sizes).first;
    const auto pos = static_cast<std::size_t>(std::find(ds.begin(), ds.end(), d) - ds.begin());
    nest.spatial.push_back({d, hw.dim_size(d), used[pos], owner});
  }

  for (const auto& g : mapping.wave_order) {
    nest.loops.push_back({names.at(g), wave_extent.at(g), LoopKind::Wave, g});
  }
  for (const auto* s : kernel.seq_vars()) nest.loops.push_back({s->name, s->extent, LoopKind::Sequential, s->name});

  for (const auto& a : kernel.accesses) {
    Access r = a;
    for (auto& c : r.coords) {
      for (const auto& [g, expr] : nest.grid_exprs) c = c.substitute(g, expr);
    }
    nest.accesses.push_back(std::move(r));
  }
  return nest;
}

double occupancy(const Mapping& mapping, const TileKernel& kernel, const HardwareModel& hw) {
  const MappedNest nest = apply_mapping(kernel, hw, mapping);
  std::int64_t used = 1;
  for (const auto& s : nest.spatial) used *= s.used;
  return static_cast<double>(used) / static_cast<double>(hw.num_cores());
}

}  // namespace dfmap
