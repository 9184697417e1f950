// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "dfmap/hwmodel.hpp"
#include "dfmap/kernelir.hpp"
#include "dfmap/mapper.hpp"

namespace dfmap {

struct BroadcastStage {
  std::string dim;
  std::string net;
  friend bool operator==(const BroadcastStage&, const BroadcastStage&) = default;
};

// Empty stage list means a direct per-core global transfer. Otherwise the
// core at index 0 of every stage dim reads the tile from global memory and
// the stages forward it, one dimension at a time.
struct Realization {
  std::vector<BroadcastStage> stages;

  bool is_global() const { return stages.empty(); }
  std::string str() const;
  friend bool operator==(const Realization&, const Realization&) = default;
};

// Levels count loops of the mapped nest from the outside: level L issues the
// transfer once per iteration of loop L-1, so level 0 runs once per core and
// level n (the loop count) runs in every innermost iteration.
struct MemOpPlan {
  std::string access;
  Direction direction = Direction::Load;
  Realization realization;
  int hoist_level = 0;
  std::string target_buffer;
  std::int64_t tile_bytes = 0;
  std::int64_t footprint_bytes = 0;  // bytes moved per issue, one buffer
  int buffers = 1;                   // 2 when double-buffered

  std::int64_t resident_bytes() const { return footprint_bytes * buffers; }
  friend bool operator==(const MemOpPlan&, const MemOpPlan&) = default;
};

struct ScheduleCandidate {
  std::shared_ptr<const TileKernel> kernel;
  std::shared_ptr<const MappedNest> nest;
  std::vector<MemOpPlan> plans;  // one per access, in kernel order
  // live[l]: bytes resident while the loop body at level l runs.
  std::vector<std::int64_t> live;
  std::string encoding;
  std::string id;  // 16 hex digits of a hash of `encoding`

  std::int64_t peak_live() const;
  const MemOpPlan* plan(std::string_view access) const;
};

struct ReuseOptions {
  bool spatial_reuse = true;
  bool temporal_reuse = true;
  double reserved_fraction = 0.10;
  std::size_t max_options_per_access = 64;
  std::size_t max_candidates = 100000;
};

struct CandidateSet {
  std::vector<ScheduleCandidate> candidates;
  std::size_t enumerated = 0;  // before capacity pruning
  std::vector<std::string> warnings;
};

// Used spatial dims of the nest that no coordinate of `a` depends on.
std::vector<std::string> spatial_reuse_dims(const Access& a, const MappedNest& nest);

std::vector<Realization> enumerate_realizations(const Access& a, const MappedNest& nest, const HardwareModel& hw);

// Bytes of one buffer when `a` is issued at `level`: the tile size times the
// extent of every loop from `level` inward that the access depends on.
std::int64_t footprint_bytes(const Access& a, const MappedNest& nest, std::int64_t tile_bytes, int level);

// Level of a store: just inside the innermost loop it depends on.
int natural_store_level(const Access& a, const MappedNest& nest);

// (level, footprint) pairs from the innermost legal level outward.
std::vector<std::pair<int, std::int64_t>> legal_hoist_levels(const Access& a, const MappedNest& nest,
                                                             std::int64_t tile_bytes);

std::vector<std::int64_t> live_table(const std::vector<MemOpPlan>& plans, std::size_t levels);

std::vector<ScheduleCandidate> prune_by_capacity(std::vector<ScheduleCandidate> cands, const HardwareModel& hw,
                                                 double reserved_fraction);

CandidateSet enumerate_candidates(const std::vector<Mapping>& mappings, const TileKernel& kernel,
                                  const HardwareModel& hw, const ReuseOptions& options = {});

// Candidate built from explicit per-access choices (realization, level);
// stores take their natural level regardless of the given one.
ScheduleCandidate make_candidate(std::shared_ptr<const TileKernel> kernel, std::shared_ptr<const MappedNest> nest,
                                 const HardwareModel& hw, const std::vector<std::pair<Realization, int>>& choices);

// Core that reads the tile from global memory for `core` under `r`.
Index broadcast_producer(const Realization& r, const HardwareModel& hw, const Index& core);

// Lines of broadcast stage `k` for the group produced by `producer`. Each line
// is named by its first core (index 0 along the stage dim).
std::vector<Index> stage_lines(const Realization& r, const HardwareModel& hw, const Index& producer, std::size_t k);

// Cores of the broadcast group rooted at `producer`.
std::vector<Index> broadcast_group(const Realization& r, const HardwareModel& hw, const Index& producer);

std::string fnv1a_hex(std::string_view text);

}  // namespace dfmap
