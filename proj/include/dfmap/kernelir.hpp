// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "dfmap/affine.hpp"

namespace dfmap {

enum class VarKind { Grid, Sequential };

struct IndexVar {
  std::string name;
  std::int64_t extent = 1;  // in tiles
  VarKind kind = VarKind::Grid;
  friend bool operator==(const IndexVar&, const IndexVar&) = default;
};

struct TensorRef {
  std::string name;
  std::vector<std::int64_t> extents;  // tile-grid extents
  std::int64_t elem_bytes = 2;
  friend bool operator==(const TensorRef&, const TensorRef&) = default;
};

enum class Direction { Load, Store };

// A tile-granular access. Loads define a value named `id`; stores write the
// value named `value`.
struct Access {
  std::string id;
  std::string tensor;
  std::vector<AffineExpr> coords;
  std::vector<std::int64_t> tile_shape;  // elements per tensor dim
  Direction direction = Direction::Load;
  std::string value;
  friend bool operator==(const Access&, const Access&) = default;
};

enum class OpKind { Matmul, Vector, Scalar };
const char* to_string(OpKind kind);

struct TileOp {
  std::string id;
  OpKind kind = OpKind::Vector;
  std::vector<std::string> operands;  // load ids or earlier op ids
  std::vector<std::int64_t> result_shape;
  // matmul: {M, K, N}; elementwise ops: {elements}
  std::vector<std::int64_t> iteration_space;
  friend bool operator==(const TileOp&, const TileOp&) = default;
};

struct TileKernel {
  std::string name;
  std::vector<IndexVar> vars;
  std::vector<TensorRef> tensors;
  std::vector<Access> accesses;
  std::vector<TileOp> ops;
  std::map<std::string, std::int64_t> params;  // block shape (BM, BN, ...)

  const IndexVar* var(std::string_view name) const;
  const TensorRef* tensor(std::string_view name) const;
  const Access* access(std::string_view id) const;
  std::vector<const IndexVar*> grid_vars() const;
  std::vector<const IndexVar*> seq_vars() const;
  std::int64_t tile_bytes(const Access& a) const;

  friend bool operator==(const TileKernel&, const TileKernel&) = default;
};

TileKernel parse_kernel(std::string_view text);
TileKernel load_kernel(const std::string& path);
std::string print_kernel(const TileKernel& kernel);

// Canonicalizes every affine form and re-derives op shapes. Idempotent.
TileKernel normalize(const TileKernel& kernel);

// Throws InputError on any structural problem (unknown names, shape
// mismatches, uses before definition, out-of-bounds tiles).
void check_kernel(const TileKernel& kernel);

TileKernel build_gemm(std::int64_t M, std::int64_t N, std::int64_t K, std::int64_t BM, std::int64_t BN,
                      std::int64_t BK, std::int64_t dtype_bytes = 2);

// Non-causal attention over batch_heads independent heads. The vector phase
// is four elementwise ops per tile: scale, running max, exp, rescale-accumulate.
TileKernel build_flashattention(std::int64_t batch_heads, std::int64_t seqlen, std::int64_t head_dim,
                                std::int64_t block_q, std::int64_t block_kv, std::int64_t dtype_bytes = 2);

// Index variables with a nonzero effect on any coordinate.
std::set<std::string> index_dependence(const Access& a);

// Total arithmetic work over the whole iteration space: 2*M*K*N per matmul
// tile op, one op per element for elementwise ops.
std::int64_t kernel_flops(const TileKernel& kernel);

}  // namespace dfmap
