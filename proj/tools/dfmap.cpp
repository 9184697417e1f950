// SPDX-License-Identifier: Apache-2.0
// Command-line front end: compile, ablate, describe.
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "dfmap/driver.hpp"
#include "dfmap/error.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitBadInput = 2;

struct Args {
  std::string hw;
  std::string gemm;
  std::string flash;
  std::string kernel;
  std::string config;
  std::size_t topk = 0;
  unsigned threads = 0;
  std::string out;
  std::string report;
  std::string trace;
  bool dump_mappings = false;
  bool dump_candidates = false;
  bool no_spatial = false;
  bool no_temporal = false;
};

void write_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw dfmap::InputError("cannot write '" + path.string() + "'");
  out << text;
}

dfmap::Workload workload(const Args& a) {
  const int given = !a.gemm.empty() + !a.flash.empty() + !a.kernel.empty();
  if (given != 1) throw dfmap::InputError("give exactly one of --gemm, --flashattention or --kernel");
  if (!a.gemm.empty()) return dfmap::Workload::parse_sizes(dfmap::Workload::Kind::Gemm, a.gemm);
  if (!a.flash.empty()) return dfmap::Workload::parse_sizes(dfmap::Workload::Kind::FlashAttention, a.flash);
  dfmap::Workload w;
  w.kind = dfmap::Workload::Kind::File;
  w.path = a.kernel;
  return w;
}

dfmap::Config config(const Args& a) {
  dfmap::Config cfg = a.config.empty() ? dfmap::Config{} : dfmap::load_config(a.config);
  if (a.topk > 0) cfg.topk = a.topk;
  if (a.no_spatial) cfg.spatial_reuse = false;
  if (a.no_temporal) cfg.temporal_reuse = false;
  return cfg;
}

int run_compile(const Args& a) {
  const auto hw = dfmap::load_hardware(a.hw);
  const auto cfg = config(a);
  const auto w = workload(a);
  const auto kernels = dfmap::sweep_kernels(w, cfg);
  if (a.dump_mappings) std::cout << dfmap::dump_mappings(kernels, hw, cfg);

  dfmap::CompileOptions opts;
  opts.record_intervals = !a.trace.empty();
  opts.threads = a.threads;
  const auto r = dfmap::compile(kernels, hw, cfg, opts);
  if (a.dump_candidates) std::cout << dfmap::dump_candidates(r);

  for (const auto& warning : r.warnings) std::cerr << "warning: " << warning << "\n";
  std::cout << w.str() << " on " << a.hw << ": " << r.kernels << " block shapes, " << r.mappings << " mappings, "
            << r.candidates.size() << " of " << r.enumerated << " candidates fit\n\n";
  std::cout << dfmap::selection_table(r, cfg.tolerance) << "\n";
  std::cout << dfmap::winner_plan(r, hw, cfg);
  std::cout << "winner: " << r.winner().id << "\n";

  if (!a.out.empty()) {
    const std::filesystem::path dir(a.out);
    write_file(dir / "report.jsonl", dfmap::report_jsonl(r, hw));
    write_file(dir / "summary.csv", dfmap::report_csv(r));
    write_file(dir / "selection.csv", dfmap::selection_csv(r));
    write_file(dir / "winner.txt", dfmap::winner_plan(r, hw, cfg));
  }
  if (!a.report.empty()) {
    const std::filesystem::path path(a.report);
    write_file(path, dfmap::report_jsonl(r, hw));
    write_file(std::filesystem::path(path).replace_extension(".csv"), dfmap::report_csv(r));
  }
  if (!a.trace.empty()) write_file(a.trace, dfmap::trace_csv(r.winner_trace()));
  return kExitOk;
}

int run_ablate(const Args& a) {
  const auto hw = dfmap::load_hardware(a.hw);
  Args base = a;
  base.no_spatial = base.no_temporal = false;
  const auto cfg = config(base);
  const auto w = workload(a);
  // Without either flag, show both ablations.
  const bool spatial = a.no_spatial || !a.no_temporal;
  const bool temporal = a.no_temporal || !a.no_spatial;
  const auto rows = dfmap::ablate(dfmap::sweep_kernels(w, cfg), hw, cfg, spatial, temporal);
  std::cout << w.str() << " on " << a.hw << "\n" << dfmap::ablation_table(rows);
  if (!a.out.empty()) write_file(std::filesystem::path(a.out) / "ablation.txt", dfmap::ablation_table(rows));
  return kExitOk;
}

void add_workload_flags(CLI::App* cmd, Args& a) {
  cmd->add_option("--hw", a.hw, "Hardware description file")->required();
  cmd->add_option("--gemm", a.gemm, "Built-in GEMM as M,N,K");
  cmd->add_option("--flashattention", a.flash, "Built-in attention as H,S,D");
  cmd->add_option("--kernel", a.kernel, "Kernel file (.tk)");
  cmd->add_option("--config", a.config, "Configuration file (key = value)");
  cmd->add_option("--topk", a.topk, "Candidates to simulate (default 5)");
  cmd->add_option("--threads", a.threads, "Worker threads (default: all cores)");
  cmd->add_option("--out", a.out, "Directory for report files");
  cmd->add_flag("--no-spatial-reuse", a.no_spatial, "Use only direct global transfers");
  cmd->add_flag("--no-temporal-reuse", a.no_temporal, "Issue every load in the innermost loop");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dfmap: map tile-grid kernels onto spatial dataflow accelerators"};
  app.require_subcommand(1);
  Args a;

  auto* compile = app.add_subcommand("compile", "Search mappings and select a schedule");
  add_workload_flags(compile, a);
  compile->add_option("--report", a.report, "JSON-lines report path (CSV summary written alongside)");
  compile->add_option("--trace", a.trace, "Interval CSV of the winner's simulation");
  compile->add_flag("--dump-mappings", a.dump_mappings, "Print every enumerated mapping");
  compile->add_flag("--dump-candidates", a.dump_candidates, "Print every candidate that fits");

  auto* ablate = app.add_subcommand("ablate", "Compare winners with and without reuse");
  add_workload_flags(ablate, a);

  auto* describe = app.add_subcommand("describe", "Summarize a hardware description");
  describe->add_option("hw", a.hw, "Hardware description file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitBadInput;
  }

  try {
    if (*compile) return run_compile(a);
    if (*ablate) return run_ablate(a);
    std::cout << dfmap::describe(dfmap::load_hardware(a.hw));
    return kExitOk;
  } catch (const dfmap::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}
