// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dfmap/hwmodel.hpp"
#include "dfmap/perfmodel.hpp"
#include "dfmap/reuse.hpp"

namespace dfmap {

struct Interval {
  std::string actor;  // "core(1,2)" or a resource name
  double start = 0;
  double end = 0;
  std::string tag;    // "compute", "load a", "store store_C_0", ...
};

struct SimTrace {
  double makespan = 0;
  std::int64_t dram_bytes = 0;
  std::map<std::string, std::int64_t> noc_bytes;
  std::map<std::string, std::int64_t> tile_loads;  // per access, as in Traffic
  std::int64_t peak_buffer = 0;                    // max over cores, bytes
  std::vector<std::int64_t> peak_buffer_per_core;
  std::string overflow;                            // first allocation past capacity
  double compute_busy = 0;                         // summed over cores
  Binding binding = Binding::Compute;
  std::size_t events = 0;
  std::vector<Interval> intervals;                 // only when recording
};

struct SimOptions {
  bool record_intervals = false;
  // Throw SimError on the first allocation past the usable capacity instead
  // of only recording it.
  bool strict_capacity = true;
  double reserved_fraction = 0.10;
};

// Executes the candidate on every core with the double-buffered stage
// discipline, processor-sharing bandwidth on DRAM channels and NoC lines,
// rendezvous broadcasts and buffer accounting. Throws SimError on deadlock or
// (if strict) capacity overflow.
SimTrace simulate(const ScheduleCandidate& c, const HardwareModel& hw, const SimOptions& options = {});

// A single core running one loop of `iterations` with a fixed time per
// iteration for each transfer phase and the compute, through the same engine.
SimTrace simulate_uniform(std::int64_t iterations, std::int64_t t_load, std::int64_t t_compute,
                          std::int64_t t_store);

struct Comparison {
  std::string id;
  std::int64_t estimated = 0;
  double simulated = 0;
  double relative_error = 0;  // |est - sim| / sim
  Binding estimated_binding = Binding::Compute;
  Binding simulated_binding = Binding::Compute;
  std::int64_t estimated_dram_bytes = 0;
  std::int64_t simulated_dram_bytes = 0;
};

Comparison compare(const CostEstimate& est, const SimTrace& trace);

// exp(mean |ln(est / sim)|) - 1 over the comparisons.
double geomean_relative_error(const std::vector<Comparison>& rows);

struct Selection {
  std::size_t winner = 0;  // index into the input list
  std::vector<Comparison> table;
};

// Simulates each candidate and picks the smallest makespan, ties by id.
Selection select_final(const std::vector<const ScheduleCandidate*>& topk, const HardwareModel& hw,
                       const SimOptions& options = {});

std::string trace_csv(const SimTrace& trace);

}  // namespace dfmap
