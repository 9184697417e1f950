// SPDX-License-Identifier: Apache-2.0
//
// End-to-end pipeline behind the command-line tool. A block-shape sweep
// feeds candidate enumeration; the analytical ranking decides which few
// candidates the simulator sees. Report writers live here too.
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dfmap/simref.hpp"

namespace dfmap {

using BlockShape = std::array<std::int64_t, 3>;  // BM, BN, BK

struct Config {
  // Explicit (BM, BN, BK) tuples. When empty, every combination of
  // block_sizes per dim is tried.
  std::vector<BlockShape> blocks;
  std::vector<std::int64_t> block_sizes{32, 64, 128, 256};
  std::int64_t dtype_bytes = 2;
  std::size_t max_mappings = 512;
  std::size_t max_options_per_access = 64;
  std::size_t max_candidates = 100000;
  std::size_t topk = 5;
  double tolerance = 0.20;
  double reserved_l1_fraction = 0.10;
  std::optional<Rational> clock_ghz;  // overrides the hardware clock in reports
  bool spatial_reuse = true;
  bool temporal_reuse = true;

  std::vector<BlockShape> block_list() const;
};

// `key = value` lines; `#` starts a comment. Unknown keys are errors.
Config parse_config(std::string_view text);
Config load_config(const std::string& path);

struct Workload {
  enum class Kind { Gemm, FlashAttention, File };
  Kind kind = Kind::Gemm;
  std::array<std::int64_t, 3> sizes{};  // M,N,K or H,S,D
  std::string path;                     // kernel file for Kind::File

  static Workload parse_sizes(Kind kind, std::string_view csv);
  std::string str() const;
};

// One kernel per block shape that divides the problem. Kernel files are used
// as written.
std::vector<TileKernel> sweep_kernels(const Workload& w, const Config& cfg);

struct CompileResult {
  std::vector<ScheduleCandidate> candidates;
  std::vector<CostEstimate> estimates;  // parallel to candidates
  std::vector<std::size_t> order;       // all candidates, best estimate first
  std::vector<std::size_t> topk;        // prefix of order
  std::vector<SimTrace> traces;         // parallel to topk
  Selection selection;                  // winner indexes topk
  std::size_t kernels = 0;
  std::size_t mappings = 0;
  std::size_t enumerated = 0;
  std::vector<std::string> warnings;

  const ScheduleCandidate& winner() const { return candidates[topk[selection.winner]]; }
  const CostEstimate& winner_estimate() const { return estimates[topk[selection.winner]]; }
  const SimTrace& winner_trace() const { return traces[selection.winner]; }
};

struct CompileOptions {
  bool record_intervals = false;
  unsigned threads = 0;  // 0: hardware concurrency
};

CompileResult compile(const std::vector<TileKernel>& kernels, const HardwareModel& hw, const Config& cfg,
                      const CompileOptions& options = {});

// Reports. All are deterministic functions of their inputs.
std::string report_jsonl(const CompileResult& r, const HardwareModel& hw);
std::string report_csv(const CompileResult& r);
std::string selection_csv(const CompileResult& r);
std::string selection_table(const CompileResult& r, double tolerance);
std::string winner_plan(const CompileResult& r, const HardwareModel& hw, const Config& cfg);
std::string dump_mappings(const std::vector<TileKernel>& kernels, const HardwareModel& hw, const Config& cfg);
std::string dump_candidates(const CompileResult& r);

struct AblationRow {
  std::string name;
  std::string winner;
  std::int64_t estimated = 0;
  double simulated = 0;
  std::int64_t dram_bytes = 0;
  std::int64_t input_tile_loads = 0;
  std::int64_t noc_bytes = 0;
};

// The full pipeline with reuse enabled, then once per disabled reuse kind.
std::vector<AblationRow> ablate(const std::vector<TileKernel>& kernels, const HardwareModel& hw, const Config& cfg,
                                bool spatial, bool temporal);
std::string ablation_table(const std::vector<AblationRow>& rows);

std::string describe(const HardwareModel& hw);

}  // namespace dfmap
