// SPDX-License-Identifier: Apache-2.0
#include "dfmap/reuse.hpp"

#include <algorithm>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>

#include "dfmap/error.hpp"

namespace dfmap {

std::string Realization::str() const {
  if (stages.empty()) return "global";
  std::string out = "bcast(";
  for (std::size_t i = 0; i < stages.size(); ++i) {
    out += (i ? ">" : "") + stages[i].dim + ":" + stages[i].net;
  }
  return out + ")";
}

std::int64_t ScheduleCandidate::peak_live() const {
  return live.empty() ? 0 : *std::max_element(live.begin(), live.end());
}

const MemOpPlan* ScheduleCandidate::plan(std::string_view access) const {
  auto it = std::find_if(plans.begin(), plans.end(), [&](const MemOpPlan& p) { return p.access == access; });
  return it == plans.end() ? nullptr : &*it;
}

std::string fnv1a_hex(std::string_view text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<std::string> spatial_reuse_dims(const Access& a, const MappedNest& nest) {
  std::vector<std::string> out;
  for (const auto& s : nest.spatial) {
    const bool depends = std::any_of(a.coords.begin(), a.coords.end(),
                                     [&](const AffineExpr& c) { return c.depends_on(s.dim); });
    if (!depends) out.push_back(s.dim);
  }
  return out;
}

namespace {

std::vector<Realization> realizations_from(const std::vector<std::string>& reuse,
                                           const std::vector<BroadcastResource>& eligible) {
  std::vector<Realization> out{Realization{}};
  std::map<std::string, std::vector<std::string>> nets;
  std::vector<std::string> dims;
  for (const auto& d : reuse) {
    for (const auto& e : eligible) {
      if (e.dim == d) nets[d].push_back(e.interconnect);
    }
    if (!nets[d].empty()) dims.push_back(d);
  }
  // Ordered sequences of distinct dims, shortest first, each with every
  // choice of net per stage.
  for (std::size_t len = 1; len <= dims.size(); ++len) {
    std::vector<std::string> seq;
    std::vector<bool> taken(dims.size(), false);
    std::function<void()> pick = [&]() {
      if (seq.size() == len) {
        std::vector<BroadcastStage> stages(len);
        std::function<void(std::size_t)> nets_for = [&](std::size_t k) {
          if (k == len) {
            out.push_back(Realization{stages});
            return;
          }
          for (const auto& n : nets[seq[k]]) {
            stages[k] = {seq[k], n};
            nets_for(k + 1);
          }
        };
        nets_for(0);
        return;
      }
      for (std::size_t i = 0; i < dims.size(); ++i) {
        if (taken[i]) continue;
        taken[i] = true;
        seq.push_back(dims[i]);
        pick();
        seq.pop_back();
        taken[i] = false;
      }
    };
    pick();
  }
  return out;
}

bool depends_on_loop(const Access& a, const TemporalLoop& loop) {
  return std::any_of(a.coords.begin(), a.coords.end(), [&](const AffineExpr& c) { return c.depends_on(loop.var); });
}

std::string plan_encoding(const MemOpPlan& p) {
  return p.access + ":" + p.realization.str() + "@" + std::to_string(p.hoist_level);
}

}  // namespace

std::vector<Realization> enumerate_realizations(const Access& a, const MappedNest& nest, const HardwareModel& hw) {
  require_level(hw, AbstractionLevel::Memory, "broadcast planning");
  return realizations_from(spatial_reuse_dims(a, nest), broadcast_eligible_dims(hw));
}

std::int64_t footprint_bytes(const Access& a, const MappedNest& nest, std::int64_t tile_bytes, int level) {
  std::int64_t bytes = tile_bytes;
  for (std::size_t l = static_cast<std::size_t>(std::max(level, 0)); l < nest.loops.size(); ++l) {
    if (depends_on_loop(a, nest.loops[l])) bytes *= nest.loops[l].extent;
  }
  return bytes;
}

int natural_store_level(const Access& a, const MappedNest& nest) {
  int level = 0;
  for (std::size_t l = 0; l < nest.loops.size(); ++l) {
    if (depends_on_loop(a, nest.loops[l])) level = static_cast<int>(l) + 1;
  }
  return level;
}

std::vector<std::pair<int, std::int64_t>> legal_hoist_levels(const Access& a, const MappedNest& nest,
                                                             std::int64_t tile_bytes) {
  std::vector<std::pair<int, std::int64_t>> out;
  if (a.direction == Direction::Store) {
    const int level = natural_store_level(a, nest);
    out.emplace_back(level, footprint_bytes(a, nest, tile_bytes, level));
    return out;
  }
  for (int level = static_cast<int>(nest.loops.size()); level >= 0; --level) {
    out.emplace_back(level, footprint_bytes(a, nest, tile_bytes, level));
  }
  return out;
}

std::vector<std::int64_t> live_table(const std::vector<MemOpPlan>& plans, std::size_t levels) {
  std::vector<std::int64_t> live(levels + 1, 0);
  for (const auto& p : plans) {
    for (std::size_t l = static_cast<std::size_t>(p.hoist_level); l <= levels; ++l) live[l] += p.resident_bytes();
  }
  return live;
}

std::vector<ScheduleCandidate> prune_by_capacity(std::vector<ScheduleCandidate> cands, const HardwareModel& hw,
                                                 double reserved_fraction) {
  const std::int64_t usable = usable_local_capacity(hw, reserved_fraction);
  std::erase_if(cands, [&](const ScheduleCandidate& c) { return c.peak_live() > usable; });
  return cands;
}

ScheduleCandidate make_candidate(std::shared_ptr<const TileKernel> kernel, std::shared_ptr<const MappedNest> nest,
                                 const HardwareModel& hw, const std::vector<std::pair<Realization, int>>& choices) {
  if (choices.size() != nest->accesses.size()) throw InputError("one choice per access is required");
  const MemoryArray* local = hw.local_memory();
  ScheduleCandidate c;
  for (std::size_t i = 0; i < nest->accesses.size(); ++i) {
    const Access& a = nest->accesses[i];
    MemOpPlan p;
    p.access = a.id;
    p.direction = a.direction;
    p.realization = choices[i].first;
    p.hoist_level = a.direction == Direction::Store ? natural_store_level(a, *nest) : choices[i].second;
    p.target_buffer = local ? local->name : "";
    p.tile_bytes = kernel->tile_bytes(a);
    p.footprint_bytes = footprint_bytes(a, *nest, p.tile_bytes, p.hoist_level);
    p.buffers = p.hoist_level >= 1 ? 2 : 1;
    c.plans.push_back(std::move(p));
  }
  c.live = live_table(c.plans, nest->loops.size());
  std::ostringstream enc;
  enc << kernel->name << "{";
  bool first = true;
  for (const auto& [k, v] : kernel->params) {
    enc << (first ? "" : ",") << k << "=" << v;
    first = false;
  }
  enc << "} " << nest->mapping.encoding();
  for (const auto& p : c.plans) enc << " " << plan_encoding(p);
  c.encoding = enc.str();
  c.id = fnv1a_hex(c.encoding);
  c.kernel = std::move(kernel);
  c.nest = std::move(nest);
  return c;
}

CandidateSet enumerate_candidates(const std::vector<Mapping>& mappings, const TileKernel& kernel,
                                  const HardwareModel& hw, const ReuseOptions& options) {
  require_level(hw, AbstractionLevel::Memory, "data-movement planning");
  CandidateSet out;
  const auto eligible = broadcast_eligible_dims(hw);
  const std::int64_t usable = usable_local_capacity(hw, options.reserved_fraction);
  auto shared_kernel = std::make_shared<const TileKernel>(kernel);

  for (const auto& m : mappings) {
    auto nest = std::make_shared<const MappedNest>(apply_mapping(kernel, hw, m));
    const int n = static_cast<int>(nest->loops.size());
    std::vector<std::vector<std::pair<Realization, int>>> options_per_access;
    bool rejected = false;
    for (const auto& a : nest->accesses) {
      std::vector<std::pair<Realization, int>> opts;
      if (a.direction == Direction::Store) {
        const auto reuse = spatial_reuse_dims(a, *nest);
        if (!reuse.empty()) {
          std::string dims;
          for (const auto& d : reuse) dims += (dims.empty() ? "" : ",") + d;
          out.warnings.push_back("mapping " + m.encoding() + " skipped: store '" + a.id +
                                 "' would be written by every core along {" + dims + "}");
          rejected = true;
          break;
        }
        opts.emplace_back(Realization{}, natural_store_level(a, *nest));
      } else {
        std::vector<Realization> reals{Realization{}};
        if (options.spatial_reuse) reals = realizations_from(spatial_reuse_dims(a, *nest), eligible);
        for (const auto& r : reals) {
          for (int level = n; level >= (options.temporal_reuse ? 0 : n); --level) {
            if (opts.size() < options.max_options_per_access) opts.emplace_back(r, level);
          }
        }
      }
      options_per_access.push_back(std::move(opts));
    }
    if (rejected) continue;

    std::vector<std::size_t> pick(options_per_access.size(), 0);
    for (;;) {
      std::vector<std::pair<Realization, int>> choice;
      for (std::size_t i = 0; i < pick.size(); ++i) choice.push_back(options_per_access[i][pick[i]]);
      ++out.enumerated;
      ScheduleCandidate c = make_candidate(shared_kernel, nest, hw, choice);
      if (c.peak_live() <= usable && out.candidates.size() < options.max_candidates) {
        out.candidates.push_back(std::move(c));
      }
      bool advanced = false;
      for (std::size_t i = pick.size(); i-- > 0 && !advanced;) {
        if (++pick[i] < options_per_access[i].size()) {
          advanced = true;
        } else {
          pick[i] = 0;
        }
      }
      if (!advanced) break;
    }
  }
  if (out.candidates.empty()) {
    out.warnings.push_back("no candidate fits the usable local capacity of " + std::to_string(usable) + " bytes");
  } else if (out.candidates.size() >= options.max_candidates) {
    out.warnings.push_back("candidate list truncated at " + std::to_string(options.max_candidates));
  }
  return out;
}

Index broadcast_producer(const Realization& r, const HardwareModel& hw, const Index& core) {
  Index p = core;
  for (const auto& s : r.stages) {
    const auto& dims = hw.cores->dims;
    p[static_cast<std::size_t>(std::find(dims.begin(), dims.end(), s.dim) - dims.begin())] = 0;
  }
  return p;
}

namespace {

std::size_t dim_pos(const HardwareModel& hw, const std::string& dim) {
  const auto& dims = hw.cores->dims;
  return static_cast<std::size_t>(std::find(dims.begin(), dims.end(), dim) - dims.begin());
}

// Cores reached by varying the dims of stages [0, k) from `producer`.
std::vector<Index> span(const Realization& r, const HardwareModel& hw, const Index& producer, std::size_t k) {
  std::vector<Index> out{producer};
  for (std::size_t s = 0; s < k; ++s) {
    const std::size_t pos = dim_pos(hw, r.stages[s].dim);
    const std::int64_t size = hw.dim_size(r.stages[s].dim);
    std::vector<Index> next;
    for (const auto& base : out) {
      for (std::int64_t v = 0; v < size; ++v) {
        Index c = base;
        c[pos] = v;
        next.push_back(std::move(c));
      }
    }
    out = std::move(next);
  }
  return out;
}

}  // namespace

std::vector<Index> stage_lines(const Realization& r, const HardwareModel& hw, const Index& producer, std::size_t k) {
  return span(r, hw, producer, k);
}

std::vector<Index> broadcast_group(const Realization& r, const HardwareModel& hw, const Index& producer) {
  return span(r, hw, producer, r.stages.size());
}

}  // namespace dfmap
