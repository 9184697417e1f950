// SPDX-License-Identifier: Apache-2.0
#include "dfmap/hwmodel.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "dfmap/error.hpp"
#include "lexer.hpp"

namespace dfmap {

const char* to_string(UnitKind kind) {
  switch (kind) {
    case UnitKind::Matrix: return "matrix";
    case UnitKind::Vector: return "vector";
    case UnitKind::Scalar: return "scalar";
  }
  return "?";
}

const char* to_string(AbstractionLevel level) {
  switch (level) {
    case AbstractionLevel::ScaleOut: return "scaleout";
    case AbstractionLevel::Memory: return "+memory";
    case AbstractionLevel::IntraCore: return "+intracore";
  }
  return "?";
}

const ComputeUnit* CoreGrid::unit(UnitKind kind) const {
  auto it = std::find_if(units.begin(), units.end(), [&](const ComputeUnit& u) { return u.kind == kind; });
  return it == units.end() ? nullptr : &*it;
}

AbstractionLevel HardwareModel::abstraction_level() const {
  if (memories.empty()) return AbstractionLevel::ScaleOut;
  if (cores && !cores->units.empty()) return AbstractionLevel::IntraCore;
  return AbstractionLevel::Memory;
}

const SpatialDim* HardwareModel::find_dim(std::string_view name) const {
  auto it = std::find_if(dims.begin(), dims.end(), [&](const SpatialDim& d) { return d.name == name; });
  return it == dims.end() ? nullptr : &*it;
}

std::int64_t HardwareModel::dim_size(std::string_view name) const {
  const SpatialDim* d = find_dim(name);
  if (!d) throw InputError("undeclared dim '" + std::string(name) + "'");
  return d->size;
}

const MemoryArray* HardwareModel::memory(std::string_view name) const {
  auto it = std::find_if(memories.begin(), memories.end(), [&](const MemoryArray& m) { return m.name == name; });
  return it == memories.end() ? nullptr : &*it;
}

const Interconnect* HardwareModel::interconnect(std::string_view name) const {
  auto it = std::find_if(interconnects.begin(), interconnects.end(),
                         [&](const Interconnect& n) { return n.name == name; });
  return it == interconnects.end() ? nullptr : &*it;
}

std::vector<std::int64_t> HardwareModel::core_shape() const {
  std::vector<std::int64_t> shape;
  if (!cores) return shape;
  for (const auto& d : cores->dims) shape.push_back(dim_size(d));
  return shape;
}

std::int64_t HardwareModel::num_cores() const {
  if (!cores) return 0;
  std::int64_t n = 1;
  for (auto s : core_shape()) n *= s;
  return n;
}

std::int64_t HardwareModel::core_linear(const Index& core) const {
  const auto shape = core_shape();
  if (core.size() != shape.size()) throw std::out_of_range("core index arity mismatch");
  std::int64_t lin = 0;
  for (std::size_t d = 0; d < shape.size(); ++d) {
    if (core[d] < 0 || core[d] >= shape[d]) throw std::out_of_range("core index out of range");
    lin = lin * shape[d] + core[d];
  }
  return lin;
}

Index HardwareModel::core_from_linear(std::int64_t linear) const {
  const auto shape = core_shape();
  Index idx(shape.size());
  for (std::size_t d = shape.size(); d-- > 0;) {
    idx[d] = linear % shape[d];
    linear /= shape[d];
  }
  return idx;
}

std::vector<std::int64_t> HardwareModel::component_shape(std::string_view name) const {
  std::vector<std::int64_t> shape;
  if (cores && cores->name == name) return core_shape();
  if (const MemoryArray* m = memory(name)) {
    for (const auto& d : m->dims) shape.push_back(dim_size(d));
    return shape;
  }
  throw InputError("unknown component '" + std::string(name) + "'");
}

const Mux* HardwareModel::local_mux() const {
  if (!cores) return nullptr;
  for (const auto& mux : muxes) {
    const MemoryArray* m = memory(mux.src);
    if (mux.dst == cores->name && m && m->dims == cores->dims) return &mux;
  }
  return nullptr;
}

const MemoryArray* HardwareModel::local_memory() const {
  const Mux* mux = local_mux();
  return mux ? memory(mux->src) : nullptr;
}

const Mux* HardwareModel::dram_mux() const {
  if (!cores) return nullptr;
  for (const auto& mux : muxes) {
    const MemoryArray* m = memory(mux.src);
    if (mux.dst == cores->name && m && m->dims != cores->dims) return &mux;
  }
  return nullptr;
}

const MemoryArray* HardwareModel::dram() const {
  const Mux* mux = dram_mux();
  return mux ? memory(mux->src) : nullptr;
}

std::int64_t HardwareModel::num_dram_channels() const {
  const MemoryArray* m = dram();
  if (!m) return 0;
  std::int64_t n = 1;
  for (const auto& d : m->dims) n *= dim_size(d);
  return n;
}

namespace {

using detail::Lexer;
using detail::Tok;

Env bind(const std::vector<std::string>& vars, const Index& idx) {
  Env env;
  for (std::size_t i = 0; i < vars.size(); ++i) env[vars[i]] = idx[i];
  return env;
}

bool in_domain(const Index& idx, const std::vector<std::int64_t>& shape) {
  if (idx.size() != shape.size()) return false;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] < 0 || idx[i] >= shape[i]) return false;
  }
  return true;
}

Index eval_map(const std::vector<AffineExpr>& map, const Env& env) {
  Index out;
  out.reserve(map.size());
  for (const auto& e : map) out.push_back(e.eval(env));
  return out;
}

std::int64_t parse_size(Lexer& lex) {
  Rational value = lex.expect_rational();
  std::int64_t mult = 1;
  const detail::Token& t = lex.peek();
  if (t.kind == Tok::Ident) {
    static const std::map<std::string, std::int64_t> suffixes = {
        {"B", 1},           {"KiB", 1LL << 10},    {"MiB", 1LL << 20},   {"GiB", 1LL << 30},
        {"KB", 1000},       {"MB", 1000 * 1000},   {"GB", 1000000000LL},
    };
    auto it = suffixes.find(t.text);
    if (it != suffixes.end()) {
      mult = it->second;
      lex.next();
    }
  }
  Rational bytes = value * Rational(mult);
  if (bytes.den() != 1) lex.fail("size is not a whole number of bytes");
  return bytes.num();
}

class HwParser {
 public:
  explicit HwParser(std::string_view text) : lex_(text) {}

  HardwareModel run() {
    while (!lex_.at_end()) {
      if (lex_.accept(";")) continue;
      const detail::Token kw = lex_.peek();
      if (kw.kind != Tok::Ident) lex_.fail("expected declaration");
      lex_.next();
      if (kw.text == "dim") {
        parse_dim();
      } else if (kw.text == "clock") {
        hw_.clock_ghz = lex_.expect_rational();
        lex_.accept("GHz");
      } else if (kw.text == "cores") {
        parse_cores(kw);
      } else if (kw.text == "mem") {
        parse_mem();
      } else if (kw.text == "mux") {
        parse_mux();
      } else if (kw.text == "net") {
        parse_net();
      } else {
        lex_.fail_at(kw, "unknown declaration '" + kw.text + "'");
      }
    }
    if (!hw_.cores) throw ParseError("no core grid declared", lex_.peek().line, lex_.peek().column);
    return std::move(hw_);
  }

 private:
  std::string fresh_name(std::string_view what) {
    const detail::Token t = lex_.peek();
    std::string name = lex_.expect_ident();
    if (names_.count(name)) lex_.fail_at(t, std::string(what) + " name '" + name + "' already declared");
    names_.insert(name);
    return name;
  }

  std::vector<std::string> dim_list() {
    std::vector<std::string> out;
    lex_.expect("(");
    if (lex_.accept(")")) return out;
    do {
      const detail::Token t = lex_.peek();
      std::string d = lex_.expect_ident();
      if (!hw_.find_dim(d)) lex_.fail_at(t, "undeclared dim '" + d + "'");
      out.push_back(std::move(d));
    } while (lex_.accept(","));
    lex_.expect(")");
    return out;
  }

  std::vector<std::string> var_list() {
    std::vector<std::string> out;
    lex_.expect("(");
    if (lex_.accept(")")) return out;
    do {
      out.push_back(lex_.expect_ident());
    } while (lex_.accept(","));
    lex_.expect(")");
    return out;
  }

  std::vector<AffineExpr> expr_list(const std::vector<std::string>& vars) {
    std::vector<AffineExpr> out;
    lex_.expect("(");
    if (lex_.accept(")")) return out;
    do {
      out.push_back(detail::parse_affine(lex_, &vars));
    } while (lex_.accept(","));
    lex_.expect(")");
    return out;
  }

  Rational keyword_rational(std::string_view key) {
    lex_.expect(key);
    lex_.expect("=");
    return lex_.expect_rational();
  }

  std::int64_t keyword_int(std::string_view key) {
    lex_.expect(key);
    lex_.expect("=");
    return lex_.expect_int();
  }

  std::string component_ref(std::vector<std::int64_t>* shape) {
    const detail::Token t = lex_.peek();
    std::string name = lex_.expect_ident();
    if (hw_.cores && hw_.cores->name == name) {
      *shape = hw_.core_shape();
    } else if (hw_.memory(name)) {
      *shape = hw_.component_shape(name);
    } else {
      lex_.fail_at(t, "unknown component '" + name + "'");
    }
    return name;
  }

  void parse_dim() {
    SpatialDim d;
    d.name = fresh_name("dim");
    lex_.expect("=");
    const detail::Token t = lex_.peek();
    d.size = lex_.expect_int();
    if (d.size < 1) lex_.fail_at(t, "dim size must be positive");
    hw_.dims.push_back(std::move(d));
  }

  void parse_cores(const detail::Token& kw) {
    if (hw_.cores) lex_.fail_at(kw, "only one core grid is supported");
    CoreGrid grid;
    grid.name = fresh_name("cores");
    grid.dims = dim_list();
    if (grid.dims.empty()) lex_.fail_at(kw, "core grid needs at least one dim");
    if (lex_.accept("{")) {
      while (!lex_.accept("}")) {
        if (lex_.accept(";")) continue;
        const detail::Token ut = lex_.peek();
        const std::string kind = lex_.expect_ident();
        ComputeUnit u;
        if (kind == "mat") {
          u.kind = UnitKind::Matrix;
          lex_.expect("shape");
          lex_.expect("=");
          lex_.expect("(");
          do {
            u.shape.push_back(lex_.expect_int());
          } while (lex_.accept(","));
          lex_.expect(")");
          u.throughput = keyword_rational("tput");
        } else if (kind == "vec") {
          u.kind = UnitKind::Vector;
          u.shape.push_back(keyword_int("width"));
          u.throughput = keyword_rational("tput");
        } else if (kind == "scalar") {
          u.kind = UnitKind::Scalar;
          u.latency = keyword_int("latency");
          u.throughput = Rational(1);
        } else {
          lex_.fail_at(ut, "unknown compute unit '" + kind + "'");
        }
        if (lex_.peek().text == "count") u.count = keyword_int("count");
        if (grid.unit(u.kind)) lex_.fail_at(ut, "duplicate " + std::string(to_string(u.kind)) + " unit");
        grid.units.push_back(std::move(u));
      }
    }
    hw_.cores = std::move(grid);
  }

  void parse_mem() {
    MemoryArray m;
    m.name = fresh_name("mem");
    m.dims = dim_list();
    lex_.expect("size");
    lex_.expect("=");
    m.capacity = parse_size(lex_);
    m.port_bandwidth = keyword_rational("bw");
    hw_.memories.push_back(std::move(m));
  }

  void parse_mux() {
    Mux mux;
    std::vector<std::int64_t> dst_shape, src_shape;
    const detail::Token t = lex_.peek();
    mux.dst = component_ref(&dst_shape);
    mux.dst_vars = var_list();
    if (mux.dst_vars.size() != dst_shape.size()) lex_.fail_at(t, "index arity does not match '" + mux.dst + "'");
    lex_.expect("->");
    const detail::Token s = lex_.peek();
    mux.src = component_ref(&src_shape);
    mux.map = expr_list(mux.dst_vars);
    if (mux.map.size() != src_shape.size()) lex_.fail_at(s, "index arity does not match '" + mux.src + "'");
    mux.bandwidth = keyword_rational("bw");
    hw_.muxes.push_back(std::move(mux));
  }

  void parse_net() {
    Interconnect net;
    net.name = fresh_name("net");
    lex_.expect("links");
    std::vector<std::int64_t> shape, shape2;
    const detail::Token t = lex_.peek();
    net.endpoint = component_ref(&shape);
    net.vars = var_list();
    if (net.vars.size() != shape.size()) lex_.fail_at(t, "index arity does not match '" + net.endpoint + "'");
    lex_.expect("->");
    const detail::Token t2 = lex_.peek();
    const std::string dst = component_ref(&shape2);
    if (dst != net.endpoint) lex_.fail_at(t2, "a net must link instances of one component");
    net.map = expr_list(net.vars);
    if (net.map.size() != shape.size()) lex_.fail_at(t2, "index arity does not match '" + dst + "'");
    net.link_bandwidth = keyword_rational("bw");
    for_each_index(shape, [&](const Index& src) {
      Index d = eval_map(net.map, dfmap::bind(net.vars, src));
      if (in_domain(d, shape) && d != src) net.links.push_back({src, std::move(d)});
    });
    hw_.interconnects.push_back(std::move(net));
  }

  Lexer lex_;
  HardwareModel hw_;
  std::set<std::string> names_;
};

std::string join(const std::vector<std::string>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? ", " : "") + xs[i];
  return out;
}

std::string join_exprs(const std::vector<AffineExpr>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? ", " : "") + xs[i].str();
  return out;
}

std::string index_str(const Index& idx) {
  std::string out = "(";
  for (std::size_t i = 0; i < idx.size(); ++i) out += (i ? "," : "") + std::to_string(idx[i]);
  return out + ")";
}

}  // namespace

HardwareModel parse_hardware(std::string_view text, const HwParseOptions& options) {
  HardwareModel hw = HwParser(text).run();
  if (options.validate) {
    auto diags = validate(hw);
    if (has_errors(diags)) {
      std::string msg = "invalid hardware description:";
      for (const auto& d : diags) {
        if (d.severity == Severity::Error) msg += "\n  " + d.decl + ": " + d.message;
      }
      throw InputError(msg);
    }
  }
  return hw;
}

HardwareModel load_hardware(const std::string& path, const HwParseOptions& options) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open hardware file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_hardware(ss.str(), options);
  } catch (const ParseError& e) {
    throw ParseError(e.message(), e.line(), e.column(), path);
  }
}

std::string print_hardware(const HardwareModel& hw) {
  std::ostringstream os;
  os << "clock " << hw.clock_ghz.str() << " GHz\n";
  for (const auto& d : hw.dims) os << "dim " << d.name << " = " << d.size << "\n";
  if (hw.cores) {
    os << "cores " << hw.cores->name << "(" << join(hw.cores->dims) << ")";
    if (!hw.cores->units.empty()) {
      os << " {";
      for (std::size_t i = 0; i < hw.cores->units.size(); ++i) {
        const auto& u = hw.cores->units[i];
        os << (i ? "; " : " ");
        switch (u.kind) {
          case UnitKind::Matrix:
            os << "mat shape=(";
            for (std::size_t k = 0; k < u.shape.size(); ++k) os << (k ? "," : "") << u.shape[k];
            os << ") tput=" << u.throughput.str();
            break;
          case UnitKind::Vector:
            os << "vec width=" << (u.shape.empty() ? 0 : u.shape[0]) << " tput=" << u.throughput.str();
            break;
          case UnitKind::Scalar:
            os << "scalar latency=" << u.latency;
            break;
        }
        os << " count=" << u.count;
      }
      os << " }";
    }
    os << "\n";
  }
  for (const auto& m : hw.memories) {
    os << "mem " << m.name << "(" << join(m.dims) << ") size=" << m.capacity << " bw=" << m.port_bandwidth.str()
       << "\n";
  }
  for (const auto& m : hw.muxes) {
    os << "mux " << m.dst << "(" << join(m.dst_vars) << ") -> " << m.src << "(" << join_exprs(m.map)
       << ") bw=" << m.bandwidth.str() << "\n";
  }
  for (const auto& n : hw.interconnects) {
    os << "net " << n.name << " links " << n.endpoint << "(" << join(n.vars) << ") -> " << n.endpoint << "("
       << join_exprs(n.map) << ") bw=" << n.link_bandwidth.str() << "\n";
  }
  return os.str();
}

std::vector<Diagnostic> validate(const HardwareModel& hw, AbstractionLevel required) {
  std::vector<Diagnostic> out;
  auto error = [&](std::string decl, std::string msg) {
    out.push_back({Severity::Error, std::move(decl), std::move(msg)});
  };
  if (!hw.cores) {
    error("cores", "no core grid declared");
    return out;
  }
  const auto& grid = *hw.cores;
  for (const auto& u : grid.units) {
    const std::string decl = "cores " + grid.name + " " + to_string(u.kind) + " unit";
    if (u.count < 1) error(decl, "count must be positive");
    switch (u.kind) {
      case UnitKind::Matrix:
        if (u.shape.size() != 3 || std::any_of(u.shape.begin(), u.shape.end(), [](auto s) { return s < 1; })) {
          error(decl, "matrix shape needs three positive entries");
        }
        if (!u.throughput.positive()) error(decl, "throughput must be positive");
        break;
      case UnitKind::Vector:
        if (u.shape.size() != 1 || u.shape[0] < 1) error(decl, "vector width must be positive");
        if (!u.throughput.positive()) error(decl, "throughput must be positive");
        break;
      case UnitKind::Scalar:
        if (u.latency < 1) error(decl, "scalar latency must be at least 1");
        break;
    }
  }
  for (const auto& m : hw.memories) {
    if (m.capacity <= 0) error("mem " + m.name, "capacity must be positive");
    if (!m.port_bandwidth.positive()) error("mem " + m.name, "bandwidth must be positive");
  }
  for (const auto& mux : hw.muxes) {
    const std::string decl = "mux " + mux.dst + " -> " + mux.src;
    if (mux.dst != grid.name) {
      error(decl, "mux destination must be the core grid");
      continue;
    }
    if (!hw.memory(mux.src)) {
      error(decl, "mux source must be a memory");
      continue;
    }
    if (!mux.bandwidth.positive()) error(decl, "bandwidth must be positive");
    const auto src_shape = hw.component_shape(mux.src);
    bool reported = false;
    for_each_index(hw.core_shape(), [&](const Index& core) {
      if (reported) return;
      Index src = eval_map(mux.map, dfmap::bind(mux.dst_vars, core));
      if (!in_domain(src, src_shape)) {
        error(decl, "maps core " + index_str(core) + " to " + mux.src + index_str(src) + ", outside its index range");
        reported = true;
      }
    });
  }
  for (const auto& net : hw.interconnects) {
    if (!net.link_bandwidth.positive()) error("net " + net.name, "link bandwidth must be positive");
  }

  if (hw.abstraction_level() >= AbstractionLevel::Memory) {
    int local = 0;
    for (const auto& mux : hw.muxes) {
      const MemoryArray* m = hw.memory(mux.src);
      if (mux.dst == grid.name && m && m->dims == grid.dims) {
        ++local;
        std::set<Index> seen;
        bool injective = true;
        for_each_index(hw.core_shape(), [&](const Index& core) {
          injective = seen.insert(eval_map(mux.map, dfmap::bind(mux.dst_vars, core))).second && injective;
        });
        if (!injective) error("mux " + mux.dst + " -> " + mux.src, "cores must each reach a distinct local memory");
      }
    }
    if (local != 1) {
      error("cores " + grid.name, "every core must reach exactly one local memory through a mux (found " +
                                      std::to_string(local) + ")");
    }
    if (!hw.dram_mux()) error("cores " + grid.name, "no mux from the cores to a global (DRAM) memory");
  }

  if (hw.abstraction_level() < required) {
    error("hardware", required == AbstractionLevel::Memory ? "memory layer required" : "intra-core layer required");
  }
  return out;
}

bool has_errors(const std::vector<Diagnostic>& diags) {
  return std::any_of(diags.begin(), diags.end(), [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

void require_level(const HardwareModel& hw, AbstractionLevel required, std::string_view purpose) {
  if (hw.abstraction_level() < required) {
    throw InputError(std::string(purpose) + ": " +
                     (required == AbstractionLevel::Memory ? "memory layer required" : "intra-core layer required") +
                     " (hardware description provides " + to_string(hw.abstraction_level()) + ")");
  }
}

std::optional<std::vector<Link>> multicast_route(const HardwareModel& hw, const Interconnect& net,
                                                 std::string_view dim, const Index& on_line) {
  if (!hw.cores) return std::nullopt;
  const auto& core_dims = hw.cores->dims;
  auto pos_it = std::find(core_dims.begin(), core_dims.end(), dim);
  if (pos_it == core_dims.end()) return std::nullopt;
  const std::size_t pos = static_cast<std::size_t>(pos_it - core_dims.begin());
  const std::int64_t size = hw.dim_size(dim);

  std::map<Index, std::vector<const Link*>> out_links;
  for (const auto& l : net.links) out_links[l.src].push_back(&l);

  Index start = on_line;
  start[pos] = 0;
  std::vector<Link> tree;
  std::set<Index> visited{start};
  std::deque<Index> frontier{start};
  while (!frontier.empty()) {
    Index cur = frontier.front();
    frontier.pop_front();
    auto it = out_links.find(cur);
    if (it == out_links.end()) continue;
    for (const Link* l : it->second) {
      if (visited.count(l->dst)) continue;
      visited.insert(l->dst);
      tree.push_back(*l);
      frontier.push_back(l->dst);
    }
  }
  if (static_cast<std::int64_t>(visited.size()) != size) return std::nullopt;
  return tree;
}

std::vector<BroadcastResource> broadcast_eligible_dims(const HardwareModel& hw) {
  std::vector<BroadcastResource> out;
  if (!hw.cores) return out;
  const auto& core_dims = hw.cores->dims;
  const MemoryArray* local = hw.local_memory();
  for (const auto& net : hw.interconnects) {
    const bool on_cores = net.endpoint == hw.cores->name;
    const bool on_local = local && net.endpoint == local->name;
    if ((!on_cores && !on_local) || net.links.empty()) continue;
    std::optional<std::size_t> varying;
    bool single = true;
    for (const auto& l : net.links) {
      std::vector<std::size_t> changed;
      for (std::size_t d = 0; d < l.src.size(); ++d) {
        if (l.src[d] != l.dst[d]) changed.push_back(d);
      }
      if (changed.size() != 1 || (varying && *varying != changed[0])) {
        single = false;
        break;
      }
      varying = changed[0];
    }
    if (!single || !varying) continue;
    const std::string& dim = core_dims[*varying];
    bool covers = true;
    auto line_shape = hw.core_shape();
    line_shape[*varying] = 1;
    for_each_index(line_shape, [&](const Index& line) {
      if (covers && !multicast_route(hw, net, dim, line)) covers = false;
    });
    if (covers) out.push_back({dim, net.name});
  }
  std::stable_sort(out.begin(), out.end(), [&](const BroadcastResource& a, const BroadcastResource& b) {
    auto pa = std::find(core_dims.begin(), core_dims.end(), a.dim) - core_dims.begin();
    auto pb = std::find(core_dims.begin(), core_dims.end(), b.dim) - core_dims.begin();
    return pa < pb;
  });
  return out;
}

std::int64_t dram_channel_of(const HardwareModel& hw, const Index& core) {
  const Mux* mux = hw.dram_mux();
  if (!mux) throw InputError("no DRAM mux declared");
  const auto shape = hw.core_shape();
  if (!in_domain(core, shape)) throw std::out_of_range("core index " + index_str(core) + " outside the core grid");
  const Index ch = eval_map(mux->map, dfmap::bind(mux->dst_vars, core));
  const auto ch_shape = hw.component_shape(mux->src);
  if (!in_domain(ch, ch_shape)) throw std::out_of_range("DRAM mux maps " + index_str(core) + " out of range");
  std::int64_t lin = 0;
  for (std::size_t d = 0; d < ch.size(); ++d) lin = lin * ch_shape[d] + ch[d];
  return lin;
}

std::int64_t usable_local_capacity(const HardwareModel& hw, double reserved_fraction) {
  const MemoryArray* m = hw.local_memory();
  if (!m) return 0;
  return static_cast<std::int64_t>(static_cast<double>(m->capacity) * (1.0 - reserved_fraction));
}

}  // namespace dfmap
