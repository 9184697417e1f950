// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite. Prints one PASS or FAIL line per criterion and exits
// nonzero if any criterion fails. Criteria that take a runtime budget are
// timed around their own work only.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dfmap/driver.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

namespace dfmap {
namespace {

using test::data_path;

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int number, const std::string& name, const Outcome& o) {
  std::printf("%s [%d] %s: %s\n", o.pass ? "PASS" : "FAIL", number, name.c_str(), o.detail.c_str());
  std::fflush(stdout);
  if (!o.pass) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// Every estimate produced anywhere in the suite is checked against its
// roofline bounds.
struct RooflineTally {
  std::size_t checked = 0;
  std::size_t violations = 0;
  std::string first;

  void add(const CostEstimate& e) {
    ++checked;
    const double total = static_cast<double>(e.total);
    if (total >= e.compute_bound && total >= e.dram_bound) return;
    if (violations++ == 0) {
      first = e.id + " total " + std::to_string(e.total) + " compute bound " + fmt("%.1f", e.compute_bound) +
              " dram bound " + fmt("%.1f", e.dram_bound);
    }
  }
  void add(const std::vector<CostEstimate>& es) {
    for (const auto& e : es) add(e);
  }
};

RooflineTally roofline;

Outcome pipeline_formula() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<std::int64_t> iters(1, 64);
  std::uniform_int_distribution<std::int64_t> times(0, 10000);
  int mismatches = 0;
  std::string first;
  for (int i = 0; i < 1000; ++i) {
    const std::int64_t n = iters(rng);
    const std::int64_t tl = times(rng);
    const std::int64_t tc = times(rng);
    const std::int64_t ts = times(rng);
    const double sim = simulate_uniform(n, tl, tc, ts).makespan;
    const auto model = loop_time(n, tl, tc, ts);
    if (sim != static_cast<double>(model) && mismatches++ == 0) {
      first = "; first mismatch I=" + std::to_string(n) + " (" + std::to_string(tl) + "," + std::to_string(tc) +
              "," + std::to_string(ts) + ") model " + std::to_string(model) + " sim " + fmt("%.3f", sim);
    }
  }
  const double dt = seconds_since(t0);
  return {mismatches == 0 && dt < 10.0,
          "1000 cases, " + std::to_string(mismatches) + " mismatches, " + fmt("%.2f s", dt) + first};
}

std::shared_ptr<const MappedNest> nest_for(const TileKernel& k, const HardwareModel& hw, const std::string& enc) {
  for (const auto& m : enumerate_mappings(k, hw)) {
    if (m.encoding() == enc) return std::make_shared<const MappedNest>(apply_mapping(k, hw, m));
  }
  return nullptr;
}

Outcome spatial_reuse_traffic(const HardwareModel& hw) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto k = std::make_shared<const TileKernel>(build_gemm(1024, 1024, 1024, 128, 128, 128));
  const auto nest = nest_for(*k, hw, "gm=[x] gn=[y] waves=()");
  if (!nest) return {false, "mapping gm=[x] gn=[y] waves=() not enumerated"};
  const auto make = [&](Realization a, Realization b) {
    return make_candidate(k, nest, hw, {{std::move(a), 1}, {std::move(b), 1}, {Realization{}, 0}});
  };
  const auto global = make({}, {});
  const auto bcast = make(Realization{{{"y", "v_ring"}}}, Realization{{{"x", "h_ring"}}});

  SimOptions so;
  so.strict_capacity = false;
  const Traffic mg = traffic(global, hw);
  const Traffic mb = traffic(bcast, hw);
  const SimTrace sg = simulate(global, hw, so);
  const SimTrace sb = simulate(bcast, hw, so);
  const auto inputs = [](const std::map<std::string, std::int64_t>& loads) { return loads.at("a") + loads.at("b"); };
  const std::int64_t stores = mg.tile_loads.at("store_C_0");
  const std::int64_t g = inputs(mg.tile_loads);
  const std::int64_t b = inputs(mb.tile_loads);
  const bool sim_agrees = inputs(sg.tile_loads) == g && inputs(sb.tile_loads) == b &&
                          sg.dram_bytes == mg.dram_bytes && sb.dram_bytes == mb.dram_bytes;
  const double input_cut = 1.0 - static_cast<double>(b) / static_cast<double>(g);
  const double total_cut = 1.0 - static_cast<double>(b + stores) / static_cast<double>(g + stores);
  const double dt = seconds_since(t0);
  const bool pass = g == 1024 && b == 128 && stores == 64 && sim_agrees &&
                    std::round(input_cut * 1000) == 875 && std::round(total_cut * 1000) == 824 && dt < 1.0;
  return {pass, "input tile loads " + std::to_string(g) + " -> " + std::to_string(b) + " (model), " +
                    (sim_agrees ? "simulator agrees" : "simulator DISAGREES") + ", input traffic -" +
                    fmt("%.1f%%", input_cut * 100) + ", total incl. " + std::to_string(stores) + " stores -" +
                    fmt("%.1f%%", total_cut * 100) + ", " + fmt("%.3f s", dt)};
}

Outcome footprint_oracle() {
  const auto hw = parse_hardware(
      "dim x = 2\ndim y = 3\ndim ch = 1\ncores c(x, y) { vec width=8 tput=1 count=1 }\n"
      "mem l1(x, y) size=1MiB bw=8\nmem d(ch) size=1GiB bw=8\n"
      "mux c(x, y) -> l1(x, y) bw=8\nmux c(x, y) -> d(0) bw=8\n");
  std::mt19937_64 rng(97);
  int nests = 0;
  int levels = 0;
  int mismatches = 0;
  std::string first;
  for (int trial = 0; trial < 500; ++trial) {
    const auto k = parse_kernel(test::random_footprint_kernel(rng));
    const auto maps = enumerate_mappings(k, hw);
    const MappedNest nest = apply_mapping(k, hw, maps[rng() % maps.size()]);
    const Access& a = *nest.access("a");
    ++nests;
    for (const auto& [level, bytes] : legal_hoist_levels(a, nest, 64)) {
      ++levels;
      const auto want = 64 * test::live_tiles(a, nest, static_cast<std::size_t>(level), core_env(hw, {0, 0}));
      if (bytes != want && mismatches++ == 0) {
        first = "; first mismatch " + nest.mapping.encoding() + " level " + std::to_string(level) + ": " +
                std::to_string(bytes) + " vs " + std::to_string(want);
      }
    }
  }
  return {mismatches == 0 && nests == 500,
          std::to_string(nests) + " nests, " + std::to_string(levels) + " hoist levels, " +
              std::to_string(mismatches) + " mismatches" + first};
}

Outcome mapping_completeness() {
  const HardwareModel hw = test::grid_hw(2, 2);
  int shapes = 0;
  std::size_t total = 0;
  std::string bad;
  for (auto [em, en] : std::vector<std::pair<int, int>>{{1, 1}, {1, 4}, {2, 2}, {3, 5}, {4, 4}, {8, 2}, {6, 6}}) {
    const TileKernel k = test::two_var_kernel(em, en);
    const auto mappings = enumerate_mappings(k, hw);
    std::set<test::Table> got;
    for (const auto& m : mappings) got.insert(test::nest_table(apply_mapping(k, hw, m), hw));
    const auto want = test::brute_force_tables(em, en, 2, 2);
    ++shapes;
    total += mappings.size();
    if (got.size() != mappings.size() || got != want) {
      bad += " " + std::to_string(em) + "x" + std::to_string(en) + "(" + std::to_string(got.size()) + " vs " +
             std::to_string(want.size()) + ")";
    }
  }
  return {bad.empty(), std::to_string(shapes) + " extent pairs, " + std::to_string(total) +
                           " mappings, all equal to the exhaustive set" + (bad.empty() ? "" : "; differ:" + bad)};
}

Outcome capacity(const CompileResult& r, const HardwareModel& hw, const Config& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::int64_t usable = usable_local_capacity(hw, cfg.reserved_l1_fraction);
  SimOptions so;
  so.strict_capacity = false;
  so.reserved_fraction = cfg.reserved_l1_fraction;
  std::size_t over = 0;
  std::int64_t worst = 0;
  std::string first;
  for (const auto& c : r.candidates) {
    const SimTrace t = simulate(c, hw, so);
    worst = std::max(worst, t.peak_buffer);
    if (t.peak_buffer > usable && over++ == 0) first = "; first overflow " + c.id + ": " + t.overflow;
  }
  return {over == 0 && !r.candidates.empty(),
          std::to_string(r.candidates.size()) + " candidates simulated, " + std::to_string(over) +
              " over usable L1 " + std::to_string(usable) + " B, worst peak " + std::to_string(worst) + " B, " +
              fmt("%.1f s", seconds_since(t0)) + first};
}

CompileResult compile_gemm(const HardwareModel& hw, const std::string& sizes, const Config& cfg,
                           unsigned threads = 0) {
  CompileOptions opts;
  opts.threads = threads;
  auto r = compile(sweep_kernels(Workload::parse_sizes(Workload::Kind::Gemm, sizes), cfg), hw, cfg, opts);
  roofline.add(r.estimates);
  return r;
}

// Makespan of select_final over the first k ranked candidates, k = 1..5.
std::vector<double> topk_curve(const CompileResult& r, const HardwareModel& hw) {
  SimOptions so;
  so.strict_capacity = false;
  std::vector<double> out;
  std::vector<const ScheduleCandidate*> prefix;
  for (std::size_t k = 0; k < 5 && k < r.order.size(); ++k) {
    prefix.push_back(&r.candidates[r.order[k]]);
    const Selection s = select_final(prefix, hw, so);
    out.push_back(s.table[s.winner].simulated);
  }
  return out;
}

std::string curve_str(const std::vector<double>& v) {
  std::string s;
  for (auto x : v) s += (s.empty() ? "" : " ") + fmt("%.0f", x);
  return s;
}

Outcome topk_monotonicity(const HardwareModel& wormhole, const Config& cfg) {
  std::string detail;
  bool pass = true;
  for (const char* sizes : {"1024,1024,1024", "2048,2048,2048", "16384,1024,1024"}) {
    const auto curve = topk_curve(compile_gemm(wormhole, sizes, cfg), wormhole);
    const bool ok = curve.size() == 5 && std::is_sorted(curve.rbegin(), curve.rend());
    pass = pass && ok;
    detail += std::string(sizes) + " [" + curve_str(curve) + "]" + (ok ? "" : " NOT monotone") + "; ";
  }
  // Misranking scenario: the model's first choice is not the fastest.
  const auto mesh = load_hardware(data_path("mesh4x8.hw"));
  const auto curve = topk_curve(compile_gemm(mesh, "512,512,512", cfg), mesh);
  const bool ok = curve.size() == 5 && std::is_sorted(curve.rbegin(), curve.rend());
  const bool strict = ok && curve.back() < curve.front();
  pass = pass && strict;
  detail += "misranking mesh4x8 512,512,512 [" + curve_str(curve) + "]" +
            (strict ? fmt(" improves %.1f%%", 100 * (1 - curve.back() / curve.front())) : " does not improve");
  return {pass, detail};
}

Outcome crossover(const HardwareModel& hw) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::int64_t mk = 8192;
  std::vector<int> styles;
  std::string detail;
  for (std::int64_t n = 128; n <= mk; n *= 2) {
    int style = -1;
    std::int64_t best = INT64_MAX;
    std::string best_id;
    for (std::int64_t b : {64, 128, 256}) {
      if (n % b != 0) continue;
      const auto k = build_gemm(mk, n, mk, b, b, b);
      const auto cs = enumerate_candidates(enumerate_mappings(k, hw), k, hw);
      for (const auto& c : cs.candidates) {
        const CostEstimate e = estimate(c, hw);
        roofline.add(e);
        if (e.total > best || (e.total == best && c.id >= best_id)) continue;
        best = e.total;
        best_id = c.id;
        // Style: how many input loads reach their cores through a broadcast.
        style = 0;
        for (const auto& p : c.plans) style += p.direction == Direction::Load && !p.realization.is_global();
      }
    }
    styles.push_back(style);
    detail += "N=" + std::to_string(n) + ":" + (style == 2 ? "2D" : style == 1 ? "1D" : std::to_string(style)) + " ";
  }
  const double dt = seconds_since(t0);
  const bool valid = std::all_of(styles.begin(), styles.end(), [](int s) { return s == 1 || s == 2; });
  const bool monotone = std::is_sorted(styles.begin(), styles.end());
  const bool transition = !styles.empty() && styles.front() == 1 && styles.back() == 2;
  return {valid && monotone && transition && dt < 60.0,
          "M=K=8192: " + detail + (transition ? "transition" : "no transition") + ", " +
              (monotone ? "monotone" : "flips back") + ", " + fmt("%.1f s", dt)};
}

struct Scenario {
  std::string hw;
  Workload workload;
};

std::vector<Scenario> load_scenarios(const std::string& path) {
  std::ifstream in(path);
  std::vector<Scenario> out;
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string hw, kind, sizes;
    if (!(ls >> hw >> kind >> sizes)) continue;
    const auto k = kind == "gemm" ? Workload::Kind::Gemm : Workload::Kind::FlashAttention;
    out.push_back({hw, Workload::parse_sizes(k, sizes)});
  }
  return out;
}

Outcome model_vs_sim(const Config& cfg) {
  constexpr std::size_t kPerScenario = 12;
  const auto scenarios = load_scenarios(data_path("scenarios.txt"));
  std::vector<Comparison> rows;
  std::size_t agree = 0;
  std::size_t compute_bound = 0;
  std::string per;
  SimOptions so;
  so.strict_capacity = false;
  for (const auto& sc : scenarios) {
    const auto hw = load_hardware(data_path(sc.hw));
    const auto r = compile(sweep_kernels(sc.workload, cfg), hw, cfg);
    roofline.add(r.estimates);
    const std::size_t n = r.order.size();
    std::set<std::size_t> picks;
    for (std::size_t i = 0; i < kPerScenario && n > 0; ++i) picks.insert(r.order[i * (n - 1) / (kPerScenario - 1)]);
    std::vector<Comparison> local;
    for (auto idx : picks) {
      const Comparison c = compare(r.estimates[idx], simulate(r.candidates[idx], hw, so));
      local.push_back(c);
      rows.push_back(c);
      agree += c.estimated_binding == c.simulated_binding;
      compute_bound += c.simulated_binding == Binding::Compute;
    }
    per += sc.hw.substr(0, sc.hw.find('.')) + " " + sc.workload.str() + " " +
           fmt("%.1f%%", 100 * geomean_relative_error(local)) + "; ";
  }
  const double geo = geomean_relative_error(rows);
  const double agreement = rows.empty() ? 0 : static_cast<double>(agree) / static_cast<double>(rows.size());
  const std::size_t memory_bound = rows.size() - compute_bound;
  const bool pass = rows.size() >= 30 && compute_bound > 0 && memory_bound > 0 && geo <= 0.20 && agreement >= 0.90;
  return {pass, std::to_string(rows.size()) + " candidates (" + std::to_string(compute_bound) + " compute-bound, " +
                    std::to_string(memory_bound) + " memory-bound), geomean error " + fmt("%.1f%%", 100 * geo) +
                    ", binding agreement " + std::to_string(agree) + "/" + std::to_string(rows.size()) + " (" +
                    fmt("%.1f%%", 100 * agreement) + "); " + per};
}

Outcome determinism(const CompileResult& first, const HardwareModel& hw, const Config& cfg) {
  // A second run with a different worker count must not change anything.
  const auto second = compile_gemm(hw, "1024,1024,1024", cfg, 3);
  const std::vector<std::pair<std::string, std::function<std::string(const CompileResult&)>>> reports = {
      {"report.jsonl", [&](const CompileResult& r) { return report_jsonl(r, hw); }},
      {"summary.csv", [&](const CompileResult& r) { return report_csv(r); }},
      {"selection.csv", [&](const CompileResult& r) { return selection_csv(r); }},
      {"winner plan", [&](const CompileResult& r) { return winner_plan(r, hw, cfg); }},
  };
  std::string differ;
  std::size_t bytes = 0;
  for (const auto& [name, render] : reports) {
    const std::string a = render(first);
    bytes += a.size();
    if (a != render(second)) differ += " " + name;
  }
  return {differ.empty(), "GEMM 1024^3 on wormhole compiled twice: 4 reports, " + std::to_string(bytes) +
                              " bytes, " + (differ.empty() ? "identical" : "differ in" + differ)};
}

}  // namespace
}  // namespace dfmap

int main() {
  using namespace dfmap;
  const auto t0 = std::chrono::steady_clock::now();
  const auto wormhole = load_hardware(test::data_path("wormhole.hw"));
  const Config cfg;

  report(1, "pipeline formula oracle", pipeline_formula());
  report(2, "spatial-reuse traffic", spatial_reuse_traffic(wormhole));
  report(3, "footprint oracle", footprint_oracle());
  report(4, "mapping-space completeness", mapping_completeness());

  const auto gemm = compile_gemm(wormhole, "1024,1024,1024", cfg);
  report(5, "capacity pruning", capacity(gemm, wormhole, cfg));
  report(6, "top-k monotonicity", topk_monotonicity(wormhole, cfg));
  report(7, "dataflow crossover", crossover(wormhole));
  report(8, "model vs simulator", model_vs_sim(cfg));
  const Outcome repeat = determinism(gemm, wormhole, cfg);
  report(9, "roofline bounds",
         {roofline.violations == 0 && roofline.checked > 0,
          std::to_string(roofline.checked) + " estimates, " + std::to_string(roofline.violations) + " below a bound" +
              (roofline.first.empty() ? "" : "; first " + roofline.first)});
  report(10, "determinism", repeat);

  std::printf("%d of 10 criteria failed (%.1f s)\n", failures, seconds_since(t0));
  return failures == 0 ? 0 : 1;
}
