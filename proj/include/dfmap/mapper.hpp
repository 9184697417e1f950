// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dfmap/hwmodel.hpp"
#include "dfmap/kernelir.hpp"

namespace dfmap {

// Which core dims tile each grid var, outer to inner. Grid vars that are
// absent (or map to an empty list) run purely in temporal waves.
using SpatialAssignment = std::map<std::string, std::vector<std::string>>;

struct Mapping {
  SpatialAssignment tiling;
  // Grid vars whose wave loop has more than one iteration, outer to inner.
  std::vector<std::string> wave_order;

  // Canonical text form, e.g. "gm=[x] gn=[y] waves=(gn,gm)".
  std::string encoding() const;
  friend bool operator==(const Mapping&, const Mapping&) = default;
};

struct SpatialLoop {
  std::string dim;          // core dim name; also the loop variable
  std::int64_t size = 1;    // hardware extent
  std::int64_t used = 1;    // indices that ever carry work
  std::string grid_var;
};

enum class LoopKind { Wave, Sequential };

struct TemporalLoop {
  std::string var;
  std::int64_t extent = 1;
  LoopKind kind = LoopKind::Wave;
  std::string source;  // grid var for a wave loop, the var itself otherwise
};

// The loop structure after mapping: parallel spatial loops outermost, then
// temporal wave loops, then the kernel's sequential loops.
struct MappedNest {
  Mapping mapping;
  std::vector<SpatialLoop> spatial;
  std::vector<TemporalLoop> loops;
  std::vector<Access> accesses;  // coords rewritten over loop and dim vars
  std::vector<TileOp> body;
  // Grid var -> its value as a function of wave and core-dim vars.
  std::map<std::string, AffineExpr> grid_exprs;
  std::map<std::string, std::int64_t> grid_extents;
  // Core dims that carry no grid var; only index 0 along them does work.
  std::vector<std::string> idle_dims;
  bool masked = false;  // some (core, wave) slots fall outside the grid

  // True when `env` (core dims plus wave vars) names an in-range tile.
  bool active(const Env& env) const;
  // Whether the core does any work at all.
  bool core_active(const Env& core_env) const;
  // Number of iterations of loop `l` the core executes given the enclosing
  // loop values in `env`. Equal to the extent unless edge masking trims it.
  std::int64_t trip_count(std::size_t l, const Env& env) const;
  const Access* access(std::string_view id) const;
};

struct MapperOptions {
  std::size_t max_mappings = 512;
};

// Every distinct spatiotemporal mapping, sorted by encoding and truncated to
// the cap. A kernel without grid vars yields one trivial mapping.
std::vector<Mapping> enumerate_mappings(const TileKernel& kernel, const HardwareModel& hw,
                                        const MapperOptions& options = {});

MappedNest apply_mapping(const TileKernel& kernel, const HardwareModel& hw, const Mapping& mapping);

// Fraction of cores that ever do work.
double occupancy(const Mapping& mapping, const TileKernel& kernel, const HardwareModel& hw);

// Wave loop variable for a grid var: "gm" -> "tm", "h" -> "th".
std::string wave_var_name(const std::string& grid_var);

// Per-dim count of indices that carry work, for a grid var of `extent`
// tiled over dims of the given sizes (outer to inner). Second is the
// resulting wave count.
std::pair<std::vector<std::int64_t>, std::int64_t> used_counts(std::int64_t extent,
                                                               const std::vector<std::int64_t>& sizes);

// Core index as an environment of core-dim names.
Env core_env(const HardwareModel& hw, const Index& core);

}  // namespace dfmap
