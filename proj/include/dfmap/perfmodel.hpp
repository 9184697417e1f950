// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dfmap/hwmodel.hpp"
#include "dfmap/reuse.hpp"

namespace dfmap {

struct UnitTime {
  UnitKind kind = UnitKind::Matrix;
  std::int64_t cycles = 0;
  std::int64_t intrinsics = 0;
};

// Cycles one tile op occupies its unit class: ceil(N / (U * r)) with N the
// number of intrinsic invocations. Throws InputError if the core lacks the
// unit class the op needs.
UnitTime op_compute_time(const TileOp& op, const CoreGrid& units);

// Topological levels of the op DAG: ops whose operands are all loads or
// earlier levels.
std::vector<std::vector<std::size_t>> body_segments(const std::vector<TileOp>& body);

// Sum over segments of the max over unit kinds of the per-kind sum.
std::int64_t body_compute_time(const std::vector<TileOp>& body, const CoreGrid& units);

// Double-buffered load/compute/store pipeline over I iterations.
std::int64_t loop_time(std::int64_t iterations, std::int64_t t_load, std::int64_t t_compute, std::int64_t t_store);

// ---------------------------------------------------------------------------
// Transfers instantiated on concrete cores and resources.

enum class ResourceKind { DramChannel, Line };

struct Resource {
  ResourceKind kind = ResourceKind::DramChannel;
  std::string name;  // "dram[3]" or "h_ring[y=2]"
  std::string net;   // interconnect of a line
  Rational bandwidth{1};
};

// One step of a transfer: `bytes` moved over each listed resource in
// parallel. A broadcast stage lists every line it uses.
struct Phase {
  std::vector<int> resources;
  std::int64_t bytes = 0;
  std::vector<std::int64_t> links;  // per resource, links traversed
};

struct Transfer {
  std::size_t plan = 0;  // index into candidate.plans
  int level = 0;
  Direction direction = Direction::Load;
  Index issuer;                // the loading core, or broadcast producer
  std::vector<Index> members;  // cores that wait on this transfer
  std::vector<Phase> phases;
  std::int64_t issues = 0;  // times the issuer executes it
};

struct Instantiation {
  std::vector<Resource> resources;
  std::vector<Transfer> transfers;
  std::vector<bool> active;                     // per linear core
  std::vector<std::vector<std::int64_t>> trips;  // per core, per loop
  // Per core, per level: transfers the core waits on.
  std::vector<std::vector<std::vector<std::size_t>>> loads_at;
  std::vector<std::vector<std::vector<std::size_t>>> stores_at;
};

Instantiation instantiate(const ScheduleCandidate& c, const HardwareModel& hw);

struct ContentionGroup {
  std::vector<std::size_t> transfers;
  // Per member: bytes / cycles of its slowest phase under sharing.
  std::vector<double> effective_bandwidth;
};

// Connected components of the resource-overlap graph among `transfers`.
std::vector<ContentionGroup> contention_groups(const Instantiation& inst, const std::vector<std::size_t>& transfers);

// Cycles of each listed transfer when they all start together. A phase on a
// shared resource takes ceil(sum_j min(s_j, s) / bw), the finishing time of
// processor sharing; a transfer takes the sum of its phases.
std::map<std::size_t, std::int64_t> transfer_times(const Instantiation& inst,
                                                   const std::vector<std::size_t>& transfers);

std::int64_t transfer_time(std::int64_t bytes, Rational bandwidth);

// ---------------------------------------------------------------------------

enum class Binding { Compute, Memory };
const char* to_string(Binding b);

struct LevelCost {
  int level = 0;
  std::int64_t iterations = 1;
  std::int64_t t_load = 0;
  std::int64_t t_compute = 0;  // body, or the inner level's time
  std::int64_t t_store = 0;
  std::int64_t dram_floor = 0;
  std::int64_t time = 0;
};

struct Traffic {
  std::int64_t dram_bytes = 0;
  std::int64_t dram_load_bytes = 0;
  std::int64_t dram_store_bytes = 0;
  std::map<std::string, std::int64_t> noc_bytes;
  std::map<std::string, std::int64_t> tile_loads;  // per access: DRAM tile reads or writes
};

struct CostEstimate {
  std::string id;
  std::int64_t body_compute = 0;
  std::vector<LevelCost> levels;  // frames 0..n of the critical core
  Index critical_core;
  std::int64_t total = 0;
  Traffic traffic;
  Binding binding = Binding::Compute;
  double compute_bound = 0;  // roofline lower bounds, cycles
  double dram_bound = 0;
};

CostEstimate estimate(const ScheduleCandidate& c, const HardwareModel& hw);

Traffic traffic(const ScheduleCandidate& c, const HardwareModel& hw);
Traffic traffic(const ScheduleCandidate& c, const HardwareModel& hw, const Instantiation& inst);

// Indices of the best k estimates by (total, id).
std::vector<std::size_t> rank(const std::vector<CostEstimate>& estimates, std::size_t k);

}  // namespace dfmap
