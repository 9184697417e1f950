// SPDX-License-Identifier: Apache-2.0
#include "dfmap/driver.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "dfmap/error.hpp"
#include "json.hpp"

namespace dfmap {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) return out;
    start = pos + 1;
  }
}

std::int64_t to_int(const std::string& text, const std::string& what) {
  std::int64_t v = 0;
  const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || p != text.data() + text.size()) throw InputError(what + ": expected an integer, got '" + text + "'");
  return v;
}

std::int64_t to_positive(const std::string& text, const std::string& what) {
  const auto v = to_int(text, what);
  if (v <= 0) throw InputError(what + ": expected a positive integer, got '" + text + "'");
  return v;
}

double to_fraction(const std::string& text, const std::string& what) {
  std::istringstream in(text);
  double v = 0;
  if (!(in >> v) || !in.eof() || v < 0 || v >= 1) throw InputError(what + ": expected a value in [0, 1), got '" + text + "'");
  return v;
}

bool to_bool(const std::string& text, const std::string& what) {
  if (text == "true" || text == "on" || text == "1") return true;
  if (text == "false" || text == "off" || text == "0") return false;
  throw InputError(what + ": expected true or false, got '" + text + "'");
}

// "1", "3/2" or "1.25", optionally followed by GHz.
Rational to_clock(std::string text, const std::string& what) {
  if (text.size() > 3 && text.compare(text.size() - 3, 3, "GHz") == 0) text = trim(text.substr(0, text.size() - 3));
  Rational r;
  if (const auto slash = text.find('/'); slash != std::string::npos) {
    r = Rational(to_positive(trim(text.substr(0, slash)), what), to_positive(trim(text.substr(slash + 1)), what));
  } else if (const auto dot = text.find('.'); dot != std::string::npos) {
    const std::string frac = text.substr(dot + 1);
    std::int64_t den = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
    r = Rational(to_int(text.substr(0, dot) + frac, what), den);
  } else {
    r = Rational(to_int(text, what));
  }
  if (!(Rational(0) < r)) throw InputError(what + ": clock must be positive");
  return r;
}

// Runs body(i) for i in [0, n) on up to `threads` workers. Each index is
// written by exactly one worker, so results do not depend on scheduling.
template <typename F>
void parallel_for(std::size_t n, unsigned threads, F&& body) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < n;) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(failure_mu);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

std::string fixed(double v, int digits) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

std::string kernel_label(const TileKernel& k) {
  std::string out = k.name + "{";
  bool first = true;
  for (const auto& [name, v] : k.params) {
    out += (first ? "" : ",") + name + "=" + std::to_string(v);
    first = false;
  }
  return out + "}";
}

std::int64_t input_tile_loads(const ScheduleCandidate& c, const Traffic& t) {
  std::int64_t n = 0;
  for (const auto& p : c.plans) {
    if (p.direction != Direction::Load) continue;
    if (auto it = t.tile_loads.find(p.access); it != t.tile_loads.end()) n += it->second;
  }
  return n;
}

std::int64_t total_noc(const Traffic& t) {
  std::int64_t n = 0;
  for (const auto& [net, bytes] : t.noc_bytes) n += bytes;
  return n;
}

}  // namespace

std::vector<BlockShape> Config::block_list() const {
  if (!blocks.empty()) return blocks;
  std::vector<BlockShape> out;
  for (auto m : block_sizes) {
    for (auto n : block_sizes) {
      for (auto k : block_sizes) out.push_back({m, n, k});
    }
  }
  return out;
}

Config parse_config(std::string_view text) {
  Config cfg;
  int line_no = 0;
  std::set<std::string> seen;
  for (const auto& raw : split(text, '\n')) {
    ++line_no;
    std::string line = raw;
    if (const auto hash = line.find('#'); hash != std::string::npos) line = trim(line.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("expected 'key = value'", line_no, 1);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const std::string where = "config line " + std::to_string(line_no) + " (" + key + ")";
    if (!seen.insert(key).second) throw InputError(where + ": key given twice");
    if (key == "blocks") {
      for (const auto& item : split(value, ',')) {
        const auto dims = split(item, 'x');
        if (dims.size() != 3) throw InputError(where + ": blocks are written BMxBNxBK, got '" + item + "'");
        cfg.blocks.push_back({to_positive(dims[0], where), to_positive(dims[1], where), to_positive(dims[2], where)});
      }
    } else if (key == "block_sizes") {
      cfg.block_sizes.clear();
      for (const auto& item : split(value, ',')) cfg.block_sizes.push_back(to_positive(item, where));
    } else if (key == "dtype_bytes") {
      cfg.dtype_bytes = to_positive(value, where);
    } else if (key == "max_mappings") {
      cfg.max_mappings = static_cast<std::size_t>(to_positive(value, where));
    } else if (key == "max_options_per_access") {
      cfg.max_options_per_access = static_cast<std::size_t>(to_positive(value, where));
    } else if (key == "max_candidates") {
      cfg.max_candidates = static_cast<std::size_t>(to_positive(value, where));
    } else if (key == "topk") {
      cfg.topk = static_cast<std::size_t>(to_positive(value, where));
    } else if (key == "tolerance") {
      std::istringstream in(value);
      if (!(in >> cfg.tolerance) || !in.eof() || cfg.tolerance < 0) throw InputError(where + ": expected a non-negative number");
    } else if (key == "reserved_l1_fraction") {
      cfg.reserved_l1_fraction = to_fraction(value, where);
    } else if (key == "clock") {
      cfg.clock_ghz = to_clock(value, where);
    } else if (key == "spatial_reuse") {
      cfg.spatial_reuse = to_bool(value, where);
    } else if (key == "temporal_reuse") {
      cfg.temporal_reuse = to_bool(value, where);
    } else {
      throw InputError(where + ": unknown key");
    }
  }
  return cfg;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const ParseError& e) {
    throw ParseError(e.message(), e.line(), e.column(), path);
  }
}

Workload Workload::parse_sizes(Kind kind, std::string_view csv) {
  const auto parts = split(csv, ',');
  const char* flag = kind == Kind::Gemm ? "--gemm M,N,K" : "--flashattention H,S,D";
  if (parts.size() != 3) throw InputError(std::string(flag) + ": expected three comma-separated sizes");
  Workload w;
  w.kind = kind;
  for (std::size_t i = 0; i < 3; ++i) w.sizes[i] = to_positive(parts[i], flag);
  return w;
}

std::string Workload::str() const {
  switch (kind) {
    case Kind::Gemm:
      return "gemm " + std::to_string(sizes[0]) + "x" + std::to_string(sizes[1]) + "x" + std::to_string(sizes[2]);
    case Kind::FlashAttention:
      return "flashattention H=" + std::to_string(sizes[0]) + " S=" + std::to_string(sizes[1]) +
             " D=" + std::to_string(sizes[2]);
    case Kind::File:
      return path;
  }
  return {};
}

std::vector<TileKernel> sweep_kernels(const Workload& w, const Config& cfg) {
  std::vector<TileKernel> out;
  if (w.kind == Workload::Kind::File) {
    out.push_back(load_kernel(w.path));
    return out;
  }
  const auto [a, b, c] = w.sizes;
  if (w.kind == Workload::Kind::Gemm) {
    for (const auto& [bm, bn, bk] : cfg.block_list()) {
      if (a % bm || b % bn || c % bk) continue;
      out.push_back(build_gemm(a, b, c, bm, bn, bk, cfg.dtype_bytes));
    }
  } else {
    // Attention tiles the sequence twice; BM picks the query block and BN the
    // key/value block. The head dim stays whole.
    std::set<std::pair<std::int64_t, std::int64_t>> seen;
    for (const auto& [bq, bkv, unused] : cfg.block_list()) {
      (void)unused;
      if (b % bq || b % bkv || !seen.emplace(bq, bkv).second) continue;
      out.push_back(build_flashattention(a, b, c, bq, bkv, cfg.dtype_bytes));
    }
  }
  if (out.empty()) throw InputError("no configured block shape divides " + w.str());
  return out;
}

CompileResult compile(const std::vector<TileKernel>& kernels, const HardwareModel& hw, const Config& cfg,
                      const CompileOptions& options) {
  require_level(hw, AbstractionLevel::IntraCore, "compilation");
  CompileResult r;
  r.kernels = kernels.size();
  ReuseOptions ro;
  ro.spatial_reuse = cfg.spatial_reuse;
  ro.temporal_reuse = cfg.temporal_reuse;
  ro.reserved_fraction = cfg.reserved_l1_fraction;
  ro.max_options_per_access = cfg.max_options_per_access;
  ro.max_candidates = cfg.max_candidates;
  for (const auto& k : kernels) {
    const auto maps = enumerate_mappings(k, hw, MapperOptions{cfg.max_mappings});
    r.mappings += maps.size();
    auto cs = enumerate_candidates(maps, k, hw, ro);
    r.enumerated += cs.enumerated;
    for (auto& w : cs.warnings) r.warnings.push_back(kernel_label(k) + ": " + w);
    for (auto& c : cs.candidates) {
      if (r.candidates.size() >= cfg.max_candidates) break;
      r.candidates.push_back(std::move(c));
    }
  }
  if (r.candidates.empty()) throw InputError("no candidate fits the local memory for any block shape");

  r.estimates.resize(r.candidates.size());
  parallel_for(r.candidates.size(), options.threads, [&](std::size_t i) { r.estimates[i] = estimate(r.candidates[i], hw); });
  r.order = rank(r.estimates, r.estimates.size());
  r.topk.assign(r.order.begin(), r.order.begin() + static_cast<std::ptrdiff_t>(std::min(cfg.topk, r.order.size())));

  SimOptions so;
  so.record_intervals = options.record_intervals;
  so.reserved_fraction = cfg.reserved_l1_fraction;
  so.strict_capacity = false;  // overflow is reported, not fatal
  r.traces.resize(r.topk.size());
  parallel_for(r.topk.size(), options.threads,
               [&](std::size_t i) { r.traces[i] = simulate(r.candidates[r.topk[i]], hw, so); });
  for (std::size_t i = 0; i < r.topk.size(); ++i) {
    const auto& row = r.selection.table.emplace_back(compare(r.estimates[r.topk[i]], r.traces[i]));
    const auto& best = r.selection.table[r.selection.winner];
    if (row.simulated < best.simulated) r.selection.winner = i;
    if (!r.traces[i].overflow.empty()) r.warnings.push_back(row.id + ": " + r.traces[i].overflow);
  }
  return r;
}

std::string report_jsonl(const CompileResult& r, const HardwareModel& hw) {
  std::vector<std::ptrdiff_t> sim_row(r.candidates.size(), -1);
  for (std::size_t i = 0; i < r.topk.size(); ++i) sim_row[r.topk[i]] = static_cast<std::ptrdiff_t>(i);
  std::ostringstream os;
  for (std::size_t rank_pos = 0; rank_pos < r.order.size(); ++rank_pos) {
    const std::size_t i = r.order[rank_pos];
    const auto& c = r.candidates[i];
    const auto& e = r.estimates[i];
    ordered_json j;
    j["rank"] = rank_pos + 1;
    j["id"] = c.id;
    j["kernel"] = kernel_label(*c.kernel);
    j["mapping"] = c.nest->mapping.encoding();
    ordered_json plans = ordered_json::array();
    for (const auto& p : c.plans) {
      plans.push_back({{"access", p.access},
                       {"direction", p.direction == Direction::Load ? "load" : "store"},
                       {"realization", p.realization.str()},
                       {"level", p.hoist_level},
                       {"buffer", p.target_buffer},
                       {"footprint_bytes", p.footprint_bytes},
                       {"buffers", p.buffers}});
    }
    j["plans"] = std::move(plans);
    ordered_json levels = ordered_json::array();
    for (const auto& l : e.levels) {
      levels.push_back({{"level", l.level},
                        {"iterations", l.iterations},
                        {"t_load", l.t_load},
                        {"t_compute", l.t_compute},
                        {"t_store", l.t_store},
                        {"dram_floor", l.dram_floor},
                        {"time", l.time}});
    }
    j["levels"] = std::move(levels);
    j["total_cycles"] = e.total;
    j["dram_bytes"] = e.traffic.dram_bytes;
    j["noc_bytes"] = e.traffic.noc_bytes;
    j["binding"] = to_string(e.binding);
    j["peak_live_bytes"] = c.peak_live();
    j["compute_bound"] = std::llround(std::ceil(e.compute_bound));
    j["dram_bound"] = std::llround(std::ceil(e.dram_bound));
    if (sim_row[i] >= 0) {
      const auto& t = r.traces[static_cast<std::size_t>(sim_row[i])];
      const auto& row = r.selection.table[static_cast<std::size_t>(sim_row[i])];
      j["simulated"] = {{"makespan", t.makespan},
                        {"relative_error", row.relative_error},
                        {"binding", to_string(t.binding)},
                        {"peak_buffer_bytes", t.peak_buffer},
                        {"events", t.events},
                        {"winner", static_cast<std::size_t>(sim_row[i]) == r.selection.winner}};
    }
    (void)hw;
    os << j.dump() << "\n";
  }
  return os.str();
}

std::string report_csv(const CompileResult& r) {
  std::ostringstream os;
  os << "id,total_cycles,dram_bytes\n";
  for (auto i : r.order) os << r.candidates[i].id << "," << r.estimates[i].total << "," << r.estimates[i].traffic.dram_bytes << "\n";
  return os.str();
}

std::string selection_csv(const CompileResult& r) {
  std::ostringstream os;
  os << "rank,id,estimated_cycles,simulated_cycles,relative_error,estimated_binding,simulated_binding,winner\n";
  for (std::size_t i = 0; i < r.selection.table.size(); ++i) {
    const auto& row = r.selection.table[i];
    os << i + 1 << "," << row.id << "," << row.estimated << "," << fixed(row.simulated, 1) << ","
       << fixed(row.relative_error, 4) << "," << to_string(row.estimated_binding) << ","
       << to_string(row.simulated_binding) << "," << (i == r.selection.winner ? 1 : 0) << "\n";
  }
  return os.str();
}

std::string selection_table(const CompileResult& r, double tolerance) {
  std::ostringstream os;
  os << "rank  id                estimated     simulated   error  binding (model/sim)\n";
  for (std::size_t i = 0; i < r.selection.table.size(); ++i) {
    const auto& row = r.selection.table[i];
    os << std::setw(4) << i + 1 << "  " << row.id << " " << std::setw(11) << row.estimated << " " << std::setw(13)
       << fixed(row.simulated, 1) << " " << std::setw(6) << fixed(100 * row.relative_error, 1) << "%"
       << (row.relative_error > tolerance ? "!" : " ") << " " << to_string(row.estimated_binding) << "/"
       << to_string(row.simulated_binding) << (i == r.selection.winner ? "  <- winner" : "") << "\n";
  }
  return os.str();
}

std::string winner_plan(const CompileResult& r, const HardwareModel& hw, const Config& cfg) {
  const ScheduleCandidate& c = r.winner();
  const CostEstimate& e = r.winner_estimate();
  const MappedNest& nest = *c.nest;
  const Rational clock = cfg.clock_ghz.value_or(hw.clock_ghz);
  std::ostringstream os;
  os << "// winner " << c.id << "  " << kernel_label(*c.kernel) << "\n";
  os << "// mapping " << nest.mapping.encoding() << "\n";
  os << "// estimated " << e.total << " cycles (" << to_string(e.binding) << "), simulated "
     << fixed(r.winner_trace().makespan, 1) << " cycles = " << fixed(r.winner_trace().makespan / clock.value() / 1000.0, 3)
     << " us\n";
  os << "// dram " << e.traffic.dram_bytes << " B";
  for (const auto& [net, bytes] : e.traffic.noc_bytes) os << ", " << net << " " << bytes << " B";
  os << "; peak L1 " << c.peak_live() << " B\n";

  std::string par;
  for (const auto& s : nest.spatial) {
    if (!par.empty()) par += ", ";
    par += s.dim;
  }
  std::string indent;
  if (!par.empty()) {
    os << "parallel (" << par << ") on " << hw.cores->name << " {\n";
    indent = "  ";
  }
  auto emit_plans = [&](int level, Direction dir) {
    for (const auto& p : c.plans) {
      if (p.hoist_level != level || p.direction != dir) continue;
      const Access& a = *nest.access(p.access);
      std::string coords;
      for (std::size_t i = 0; i < a.coords.size(); ++i) coords += (i ? ", " : "") + a.coords[i].str();
      const char* verb = dir == Direction::Load ? "load" : "store";
      if (dir == Direction::Load) {
        os << indent << "alloc " << p.access << " {target_buffer=" << p.target_buffer << ", bytes=" << p.footprint_bytes
           << ", buffers=" << p.buffers << "}\n";
      }
      os << indent << verb << " " << a.tensor << "[" << coords << "] {type=\""
         << (p.realization.is_global() ? "global" : "broadcast") << "\", resources={";
      if (p.realization.is_global()) {
        os << hw.dram()->name;
      } else {
        for (std::size_t i = 0; i < p.realization.stages.size(); ++i) {
          os << (i ? ", " : "") << p.realization.stages[i].net << " along " << p.realization.stages[i].dim;
        }
      }
      os << "}}\n";
    }
  };
  for (std::size_t l = 0; l < nest.loops.size(); ++l) {
    emit_plans(static_cast<int>(l), Direction::Load);
    const auto& loop = nest.loops[l];
    os << indent << (loop.kind == LoopKind::Wave ? "for.wave " : "for.seq ") << loop.var << " = 0 to " << loop.extent
       << " {\n";
    indent += "  ";
  }
  emit_plans(static_cast<int>(nest.loops.size()), Direction::Load);
  for (const auto& op : nest.body) {
    os << indent << op.id << " = " << to_string(op.kind) << "(";
    for (std::size_t i = 0; i < op.operands.size(); ++i) os << (i ? ", " : "") << op.operands[i];
    os << ")\n";
  }
  emit_plans(static_cast<int>(nest.loops.size()), Direction::Store);
  for (std::size_t l = nest.loops.size(); l-- > 0;) {
    indent.resize(indent.size() - 2);
    os << indent << "}\n";
    emit_plans(static_cast<int>(l), Direction::Store);
  }
  if (!par.empty()) os << "}\n";
  return os.str();
}

std::string dump_mappings(const std::vector<TileKernel>& kernels, const HardwareModel& hw, const Config& cfg) {
  std::ostringstream os;
  for (const auto& k : kernels) {
    for (const auto& m : enumerate_mappings(k, hw, MapperOptions{cfg.max_mappings})) {
      os << kernel_label(k) << " " << m.encoding() << " occupancy=" << fixed(occupancy(m, k, hw), 3) << "\n";
    }
  }
  return os.str();
}

std::string dump_candidates(const CompileResult& r) {
  std::ostringstream os;
  for (std::size_t i = 0; i < r.candidates.size(); ++i) {
    const auto& c = r.candidates[i];
    os << c.id;
    std::int64_t total = 0;
    for (const auto& p : c.plans) {
      os << " " << p.access << ":" << p.realization.str() << "@" << p.hoist_level << ":" << p.footprint_bytes;
      total += p.resident_bytes();
    }
    os << " total=" << total << "\n";
  }
  return os.str();
}

std::vector<AblationRow> ablate(const std::vector<TileKernel>& kernels, const HardwareModel& hw, const Config& cfg,
                                bool spatial, bool temporal) {
  struct Variant {
    std::string name;
    bool spatial_reuse;
    bool temporal_reuse;
  };
  std::vector<Variant> variants{{"full reuse", true, true}};
  if (spatial) variants.push_back({"no spatial reuse", false, true});
  if (temporal) variants.push_back({"no temporal reuse", true, false});
  if (spatial && temporal) variants.push_back({"no reuse", false, false});
  std::vector<AblationRow> rows;
  for (const auto& v : variants) {
    Config c = cfg;
    c.spatial_reuse = v.spatial_reuse;
    c.temporal_reuse = v.temporal_reuse;
    const CompileResult r = compile(kernels, hw, c);
    const auto& e = r.winner_estimate();
    rows.push_back({v.name, r.winner().id, e.total, r.winner_trace().makespan, e.traffic.dram_bytes,
                    input_tile_loads(r.winner(), e.traffic), total_noc(e.traffic)});
  }
  return rows;
}

std::string ablation_table(const std::vector<AblationRow>& rows) {
  std::ostringstream os;
  os << "variant             winner            estimated     simulated    dram_bytes  input_tiles     noc_bytes  "
        "slowdown\n";
  for (const auto& row : rows) {
    os << std::left << std::setw(19) << row.name << std::right << " " << row.winner << " " << std::setw(11)
       << row.estimated << " " << std::setw(13) << fixed(row.simulated, 1) << " " << std::setw(13) << row.dram_bytes
       << " " << std::setw(12) << row.input_tile_loads << " " << std::setw(13) << row.noc_bytes << "  "
       << fixed(row.simulated / rows.front().simulated, 3) << "x\n";
  }
  return os.str();
}

std::string describe(const HardwareModel& hw) {
  require_level(hw, AbstractionLevel::ScaleOut, "describe");
  std::ostringstream os;
  os << "clock: " << hw.clock_ghz.str() << " GHz\n";
  os << "dims:";
  for (const auto& d : hw.dims) os << " " << d.name << "=" << d.size;
  os << "\n";
  const CoreGrid& g = *hw.cores;
  os << "cores: " << g.name << "(";
  for (std::size_t i = 0; i < g.dims.size(); ++i) os << (i ? ", " : "") << g.dims[i];
  os << "), " << hw.num_cores() << " total\n";
  for (const auto& u : g.units) {
    os << "  unit " << to_string(u.kind);
    if (u.kind == UnitKind::Matrix) os << " " << u.shape[0] << "x" << u.shape[1] << "x" << u.shape[2];
    if (u.kind == UnitKind::Vector) os << " width " << u.shape[0];
    if (u.kind == UnitKind::Scalar) {
      os << " latency " << u.latency;
    } else {
      os << " tput " << u.throughput.str();
    }
    os << " count " << u.count << "\n";
  }
  for (const auto& m : hw.memories) {
    std::int64_t instances = 1;
    for (const auto& d : m.dims) instances *= hw.dim_size(d);
    os << "memory: " << m.name << " " << instances << " x " << m.capacity << " B, port " << m.port_bandwidth.str()
       << " B/cycle";
    if (&m == hw.local_memory()) os << " (local, usable " << usable_local_capacity(hw, 0.10) << " B at 10% reserved)";
    os << "\n";
  }
  for (const auto& net : hw.interconnects) {
    os << "net: " << net.name << " " << net.links.size() << " links at " << net.link_bandwidth.str() << " B/cycle\n";
  }
  const auto eligible = broadcast_eligible_dims(hw);
  std::set<std::string> bdims;
  for (const auto& b : eligible) {
    os << "broadcast: " << b.dim << " via " << b.interconnect << "\n";
    bdims.insert(b.dim);
  }
  auto plural = [](std::size_t n, const char* word) {
    return std::to_string(n) + " " + word + (n == 1 ? "" : "s");
  };
  os << "summary: " << hw.num_cores() << " cores, " << plural(g.dims.size(), "dim") << ", "
     << plural(hw.interconnects.size(), "net") << ", " << plural(bdims.size(), "broadcast dim") << "\n";
  return os.str();
}

}  // namespace dfmap
