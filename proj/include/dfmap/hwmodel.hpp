// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dfmap/affine.hpp"
#include "dfmap/rational.hpp"

namespace dfmap {

using Index = std::vector<std::int64_t>;

struct SpatialDim {
  std::string name;
  std::int64_t size = 1;
  friend bool operator==(const SpatialDim&, const SpatialDim&) = default;
};

enum class UnitKind { Matrix, Vector, Scalar };
const char* to_string(UnitKind kind);

// One class of identical compute units inside every core.
//   matrix: shape = {m, k, n}, throughput in intrinsics per cycle per unit
//   vector: shape = {width}, throughput in intrinsics per cycle per unit
//   scalar: shape empty, latency in cycles per op
struct ComputeUnit {
  UnitKind kind = UnitKind::Scalar;
  std::vector<std::int64_t> shape;
  Rational throughput{1};
  std::int64_t latency = 0;
  std::int64_t count = 1;
  friend bool operator==(const ComputeUnit&, const ComputeUnit&) = default;
};

struct CoreGrid {
  std::string name;
  std::vector<std::string> dims;
  std::vector<ComputeUnit> units;

  const ComputeUnit* unit(UnitKind kind) const;
  friend bool operator==(const CoreGrid&, const CoreGrid&) = default;
};

struct MemoryArray {
  std::string name;
  std::vector<std::string> dims;  // empty: a single global instance
  std::int64_t capacity = 0;      // bytes per instance
  Rational port_bandwidth{1};     // bytes per cycle per instance
  friend bool operator==(const MemoryArray&, const MemoryArray&) = default;
};

// Connects every index of `dst` (the core grid) to `src(map(dst_vars))`.
struct Mux {
  std::string dst;
  std::vector<std::string> dst_vars;
  std::string src;
  std::vector<AffineExpr> map;
  Rational bandwidth{1};
  friend bool operator==(const Mux&, const Mux&) = default;
};

struct Link {
  Index src;
  Index dst;
  friend bool operator==(const Link&, const Link&) = default;
};

// Directed links endpoint(vars) -> endpoint(map(vars)). Destinations that fall
// outside the endpoint domain are dropped, which is how chains are written.
struct Interconnect {
  std::string name;
  std::string endpoint;
  std::vector<std::string> vars;
  std::vector<AffineExpr> map;
  Rational link_bandwidth{1};
  std::vector<Link> links;
  friend bool operator==(const Interconnect&, const Interconnect&) = default;
};

enum class AbstractionLevel { ScaleOut = 0, Memory = 1, IntraCore = 2 };
const char* to_string(AbstractionLevel level);

enum class Severity { Warning, Error };

struct Diagnostic {
  Severity severity = Severity::Error;
  std::string decl;
  std::string message;
};

class HardwareModel {
 public:
  Rational clock_ghz{1};
  std::vector<SpatialDim> dims;
  std::optional<CoreGrid> cores;
  std::vector<MemoryArray> memories;
  std::vector<Mux> muxes;
  std::vector<Interconnect> interconnects;

  AbstractionLevel abstraction_level() const;

  const SpatialDim* find_dim(std::string_view name) const;
  std::int64_t dim_size(std::string_view name) const;
  const MemoryArray* memory(std::string_view name) const;
  const Interconnect* interconnect(std::string_view name) const;

  // Sizes of the core grid dims, in declaration order.
  std::vector<std::int64_t> core_shape() const;
  std::int64_t num_cores() const;
  std::int64_t core_linear(const Index& core) const;
  Index core_from_linear(std::int64_t linear) const;

  // Domain sizes of a component (core grid or memory) by name.
  std::vector<std::int64_t> component_shape(std::string_view name) const;

  // The per-core scratchpad: a memory indexed by exactly the core dims and
  // reached by a mux from the cores. Null when the memory layer is absent.
  const MemoryArray* local_memory() const;
  const Mux* local_mux() const;
  // The first mux from the cores to any non-local memory (DRAM channels).
  const Mux* dram_mux() const;
  const MemoryArray* dram() const;
  std::int64_t num_dram_channels() const;

  friend bool operator==(const HardwareModel&, const HardwareModel&) = default;
};

struct HwParseOptions {
  bool validate = true;  // throw InputError when validate() reports errors
};

HardwareModel parse_hardware(std::string_view text, const HwParseOptions& options = {});
HardwareModel load_hardware(const std::string& path, const HwParseOptions& options = {});
std::string print_hardware(const HardwareModel& hw);

// Empty iff every structural invariant holds and the model provides at least
// `required` detail.
std::vector<Diagnostic> validate(const HardwareModel& hw, AbstractionLevel required = AbstractionLevel::ScaleOut);
bool has_errors(const std::vector<Diagnostic>& diags);
// Throws InputError naming the missing layer.
void require_level(const HardwareModel& hw, AbstractionLevel required, std::string_view purpose);

struct BroadcastResource {
  std::string dim;
  std::string interconnect;
  friend bool operator==(const BroadcastResource&, const BroadcastResource&) = default;
};

// (d, I) pairs such that every link of I changes only the index of core dim d
// and, on every line along d, the links reach all indices from index 0.
std::vector<BroadcastResource> broadcast_eligible_dims(const HardwareModel& hw);

// Multicast tree from index 0 of the line through `on_line` along `dim`,
// using only links of `net`. Each link appears at most once. Empty optional
// if the tree does not reach the whole line.
std::optional<std::vector<Link>> multicast_route(const HardwareModel& hw, const Interconnect& net,
                                                 std::string_view dim, const Index& on_line);

// Linear DRAM channel id of a core. Throws InputError without a DRAM mux or
// std::out_of_range for an index outside the core grid.
std::int64_t dram_channel_of(const HardwareModel& hw, const Index& core);

// Local capacity left after the runtime reservation.
std::int64_t usable_local_capacity(const HardwareModel& hw, double reserved_fraction);

// Visit every index of a box domain in row-major order.
template <typename F>
void for_each_index(const std::vector<std::int64_t>& shape, F&& f) {
  Index idx(shape.size(), 0);
  for (auto s : shape) {
    if (s <= 0) return;
  }
  for (;;) {
    f(static_cast<const Index&>(idx));
    std::size_t d = shape.size();
    while (d > 0) {
      --d;
      if (++idx[d] < shape[d]) break;
      idx[d] = 0;
      if (d == 0) return;
    }
    if (shape.empty()) return;
  }
}

}  // namespace dfmap
