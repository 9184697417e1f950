// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <random>

#include "dfmap/error.hpp"
#include "dfmap/kernelir.hpp"
#include "test_support.hpp"

namespace dfmap {
namespace {

const char* kGemm = R"(
kernel gemm {
  grid gm = 8; grid gn = 8; seq k = 8;
  tensor A[8, 8] elem=2; tensor B[8, 8] elem=2; tensor C[8, 8] elem=2;
  load a = A[gm, k] tile(128, 128);
  load b = B[k, gn] tile(128, 128);
  op c = matmul(a, b);
  store C[gm, gn] = c;
}
)";

TEST(KernelIr, ParsesGemm) {
  const TileKernel k = parse_kernel(kGemm);
  EXPECT_EQ(k.grid_vars().size(), 2u);
  EXPECT_EQ(k.seq_vars().size(), 1u);
  ASSERT_EQ(k.ops.size(), 1u);
  EXPECT_EQ(k.ops[0].iteration_space, (std::vector<std::int64_t>{128, 128, 128}));
  EXPECT_EQ(k.tile_bytes(*k.access("a")), 128 * 128 * 2);
}

TEST(KernelIr, ParsedGemmEqualsBuilder) {
  TileKernel parsed = parse_kernel(kGemm);
  TileKernel built = build_gemm(1024, 1024, 1024, 128, 128, 128, 2);
  built.params.clear();
  EXPECT_EQ(parsed.accesses, built.accesses);
  EXPECT_EQ(parsed.ops, built.ops);
  EXPECT_EQ(parsed.vars, built.vars);
}

TEST(KernelIr, RejectsUndeclaredTensorStore) {
  EXPECT_THROW(parse_kernel("kernel k { grid g = 2; tensor A[2] elem=2; load a = A[g] tile(4);"
                            " op b = vec(a); store Z[g] = b; }"),
               ParseError);
}

TEST(KernelIr, RejectsUndeclaredVarAndShapeMismatch) {
  EXPECT_THROW(parse_kernel("kernel k { grid g = 2; tensor A[2] elem=2; load a = A[h] tile(4); }"), ParseError);
  EXPECT_THROW(parse_kernel("kernel k { grid g = 2; tensor A[2,2] elem=2; tensor B[2,2] elem=2;"
                            " load a = A[g,0] tile(4,8); load b = B[0,g] tile(4,8); op c = matmul(a,b); }"),
               InputError);
  EXPECT_THROW(parse_kernel("kernel k { grid g = 4; tensor A[2] elem=2; load a = A[g] tile(4); }"), InputError);
  EXPECT_THROW(parse_kernel("kernel k { grid g = 2; tensor A[2] elem=3; load a = A[g] tile(4); }"), InputError);
}

TEST(KernelIr, ElementwiseOnlyKernelHasEmptyReductionNest) {
  const TileKernel k = parse_kernel(
      "kernel relu { grid g = 16; tensor X[16] elem=4; tensor Y[16] elem=4;"
      " load x = X[g] tile(1024); op y = vec(x); store Y[g] = y; }");
  EXPECT_TRUE(k.seq_vars().empty());
  EXPECT_EQ(k.ops[0].iteration_space, (std::vector<std::int64_t>{1024}));
}

TEST(KernelIr, GemmBuilderShapes) {
  const TileKernel k = build_gemm(1024, 1024, 1024, 128, 128, 128, 2);
  EXPECT_EQ(k.var("gm")->extent, 8);
  EXPECT_EQ(k.var("gn")->extent, 8);
  EXPECT_EQ(k.var("k")->extent, 8);
  const TileKernel one = build_gemm(256, 256, 256, 256, 256, 256, 2);
  EXPECT_EQ(one.var("gm")->extent, 1);
  EXPECT_EQ(one.var("k")->extent, 1);
  EXPECT_THROW(build_gemm(1000, 1024, 1024, 128, 128, 128, 2), InputError);
}

TEST(KernelIr, FlashAttentionBuilder) {
  const TileKernel k = build_flashattention(64, 2048, 64, 128, 128);
  EXPECT_EQ(k.var("h")->extent, 64);
  EXPECT_EQ(k.var("gq")->extent, 16);
  EXPECT_EQ(k.var("kv")->extent, 16);
  EXPECT_EQ(index_dependence(*k.access("kt")).count("gq"), 0u);
  EXPECT_EQ(index_dependence(*k.access("v")).count("gq"), 0u);
  int vec_ops = 0;
  for (const auto& op : k.ops) vec_ops += op.kind == OpKind::Vector;
  EXPECT_EQ(vec_ops, 4);
  // Token-constant sweep: batch*seqlen = 8192 tokens.
  const TileKernel sweep = build_flashattention(16, 512, 64, 128, 128);
  EXPECT_EQ(sweep.var("h")->extent * 512, 8192);
  EXPECT_EQ(sweep.var("gq")->extent, 4);
  EXPECT_THROW(build_flashattention(4, 500, 64, 128, 128), InputError);
}

TEST(KernelIr, IndexDependence) {
  const TileKernel k = build_gemm(1024, 1024, 1024, 128, 128, 128, 2);
  EXPECT_EQ(index_dependence(*k.access("a")), (std::set<std::string>{"gm", "k"}));
  EXPECT_EQ(index_dependence(*k.access("b")), (std::set<std::string>{"k", "gn"}));
  Access constant;
  constant.coords = {AffineExpr(0), AffineExpr(0)};
  EXPECT_TRUE(index_dependence(constant).empty());
}

TEST(KernelIr, IndexDependenceMatchesBruteForce) {
  std::mt19937 rng(3);
  const std::vector<std::string> names{"a", "b", "c"};
  for (int trial = 0; trial < 200; ++trial) {
    Access acc;
    for (int d = 0; d < 2; ++d) {
      AffineExpr e(static_cast<std::int64_t>(rng() % 3));
      for (const auto& n : names) {
        const auto coef = static_cast<std::int64_t>(rng() % 3);
        if (coef) e = e + AffineExpr::var(n, coef);
      }
      // A mod of one unit-coefficient var keeps the dependence exact.
      if (rng() % 4 == 0) e = e + AffineExpr::var(names[rng() % 3]).mod(2 + static_cast<std::int64_t>(rng() % 3));
      acc.coords.push_back(e);
    }
    std::set<std::string> brute;
    for (const auto& n : names) {
      bool varies = false;
      for (std::int64_t base = 0; base < 27 && !varies; ++base) {
        Env env{{"a", base % 3}, {"b", base / 3 % 3}, {"c", base / 9}};
        for (std::int64_t v = 0; v < 6 && !varies; ++v) {
          Env other = env;
          other[n] = v;
          for (const auto& c : acc.coords) varies = varies || c.eval(env) != c.eval(other);
        }
      }
      if (varies) brute.insert(n);
    }
    EXPECT_EQ(index_dependence(acc), brute);
  }
}

TEST(KernelIr, NormalizeIsIdempotentAndPrintRoundTrips) {
  for (const TileKernel& k : {build_gemm(2048, 1024, 512, 128, 64, 256, 2),
                              build_flashattention(8, 1024, 64, 128, 64)}) {
    EXPECT_EQ(normalize(normalize(k)), normalize(k));
    TileKernel reparsed = parse_kernel(print_kernel(k));
    EXPECT_EQ(reparsed, k);
  }
}

TEST(KernelIr, FlopsMatchClosedForm) {
  EXPECT_EQ(kernel_flops(build_gemm(1024, 512, 256, 128, 64, 32, 2)), 2LL * 1024 * 512 * 256);
  EXPECT_EQ(kernel_flops(build_gemm(256, 256, 256, 256, 256, 256, 2)), 2LL * 256 * 256 * 256);
}

}  // namespace
}  // namespace dfmap
