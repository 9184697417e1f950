// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include "dfmap/driver.hpp"
#include "dfmap/error.hpp"
#include "test_support.hpp"

namespace dfmap {
namespace {

using test::data_path;

TEST(Config, DefaultsMatchTheShippedFile) {
  const Config file = load_config(data_path("default.cfg"));
  const Config built;
  EXPECT_EQ(file.block_list(), built.block_list());
  EXPECT_EQ(file.block_list().size(), 64u);
  EXPECT_EQ(file.topk, built.topk);
  EXPECT_EQ(file.tolerance, built.tolerance);
  EXPECT_EQ(file.reserved_l1_fraction, built.reserved_l1_fraction);
  EXPECT_EQ(file.dtype_bytes, built.dtype_bytes);
}

TEST(Config, ParsesEveryKey) {
  const Config c = parse_config(
      "blocks = 128x128x64, 64x32x32  # two shapes\n"
      "dtype_bytes = 4\nmax_mappings = 9\nmax_options_per_access = 3\nmax_candidates = 77\n"
      "topk = 2\ntolerance = 0.5\nreserved_l1_fraction = 0.25\nclock = 3/2 GHz\n"
      "spatial_reuse = false\ntemporal_reuse = off\n");
  ASSERT_EQ(c.block_list().size(), 2u);
  EXPECT_EQ(c.block_list()[1], (BlockShape{64, 32, 32}));
  EXPECT_EQ(c.dtype_bytes, 4);
  EXPECT_EQ(c.max_mappings, 9u);
  EXPECT_EQ(c.max_options_per_access, 3u);
  EXPECT_EQ(c.max_candidates, 77u);
  EXPECT_EQ(c.topk, 2u);
  EXPECT_EQ(c.tolerance, 0.5);
  EXPECT_EQ(c.reserved_l1_fraction, 0.25);
  ASSERT_TRUE(c.clock_ghz);
  EXPECT_EQ(*c.clock_ghz, Rational(3, 2));
  EXPECT_FALSE(c.spatial_reuse);
  EXPECT_FALSE(c.temporal_reuse);
}

TEST(Config, RejectsBadInput) {
  EXPECT_THROW(parse_config("topk = 1\ntopk = 2\n"), InputError);
  EXPECT_THROW(parse_config("colour = blue\n"), InputError);
  EXPECT_THROW(parse_config("blocks = 128x128\n"), InputError);
  EXPECT_THROW(parse_config("topk = 0\n"), InputError);
  EXPECT_THROW(parse_config("reserved_l1_fraction = 1.5\n"), InputError);
  try {
    parse_config("# fine\n\njust words\n");
    FAIL() << "no error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3);
  }
}

TEST(Workload, ParsesSizes) {
  const auto w = Workload::parse_sizes(Workload::Kind::Gemm, "512,256,128");
  EXPECT_EQ(w.sizes, (std::array<std::int64_t, 3>{512, 256, 128}));
  EXPECT_THROW(Workload::parse_sizes(Workload::Kind::Gemm, "512,256"), InputError);
  EXPECT_THROW(Workload::parse_sizes(Workload::Kind::Gemm, "512,x,128"), InputError);
  EXPECT_THROW(Workload::parse_sizes(Workload::Kind::FlashAttention, "0,256,128"), InputError);
}

TEST(Sweep, KeepsOnlyDividingBlocks) {
  Config cfg;
  cfg.block_sizes = {64, 128, 256};
  const auto ks = sweep_kernels(Workload::parse_sizes(Workload::Kind::Gemm, "256,128,64"), cfg);
  // BM in {64,128,256}, BN in {64,128}, BK in {64}.
  EXPECT_EQ(ks.size(), 6u);
  EXPECT_THROW(sweep_kernels(Workload::parse_sizes(Workload::Kind::Gemm, "96,96,96"), cfg), InputError);
}

TEST(Sweep, AttentionUsesTwoBlockDims) {
  Config cfg;
  cfg.block_sizes = {64, 128};
  const auto ks = sweep_kernels(Workload::parse_sizes(Workload::Kind::FlashAttention, "2,256,64"), cfg);
  EXPECT_EQ(ks.size(), 4u);  // (block_q, block_kv) pairs; BK is ignored
}

TEST(Sweep, KernelFileErrorsNameTheFile) {
  Workload w;
  w.kind = Workload::Kind::File;
  w.path = data_path("default.cfg");
  try {
    sweep_kernels(w, Config{});
    FAIL() << "no error";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("default.cfg:"), std::string::npos) << e.what();
  }
}

class SmallCompile : public ::testing::Test {
 protected:
  HardwareModel hw = load_hardware(data_path("wormhole.hw"));
  Config cfg = [] {
    Config c;
    c.block_sizes = {128};
    c.topk = 3;
    return c;
  }();
  std::vector<TileKernel> kernels = sweep_kernels(Workload::parse_sizes(Workload::Kind::Gemm, "1024,1024,1024"), cfg);
};

TEST_F(SmallCompile, WinnerIsFastestSimulated) {
  const auto r = compile(kernels, hw, cfg);
  ASSERT_EQ(r.topk.size(), 3u);
  ASSERT_EQ(r.traces.size(), 3u);
  for (std::size_t i = 0; i < r.topk.size(); ++i) {
    EXPECT_EQ(r.topk[i], r.order[i]);
    EXPECT_LE(r.winner_trace().makespan, r.traces[i].makespan);
  }
  EXPECT_EQ(r.estimates.size(), r.candidates.size());
  EXPECT_EQ(r.order.size(), r.candidates.size());
}

TEST_F(SmallCompile, ReportsAreWellFormed) {
  const auto r = compile(kernels, hw, cfg);
  const std::string csv = report_csv(r);
  EXPECT_EQ(csv.rfind("id,total_cycles,dram_bytes\n", 0), 0u);
  EXPECT_EQ(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')), r.candidates.size() + 1);
  const std::string jsonl = report_jsonl(r, hw);
  EXPECT_EQ(static_cast<std::size_t>(std::count(jsonl.begin(), jsonl.end(), '\n')), r.candidates.size());
  EXPECT_NE(winner_plan(r, hw, cfg).find(r.winner().id), std::string::npos);
  EXPECT_NE(selection_table(r, cfg.tolerance).find("<- winner"), std::string::npos);
}

TEST_F(SmallCompile, AblationLosesWithoutSpatialReuse) {
  const auto rows = ablate(kernels, hw, cfg, true, false);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_LT(rows[0].input_tile_loads, rows[1].input_tile_loads);
  EXPECT_EQ(rows[1].noc_bytes, 0);
  EXPECT_LT(rows[0].simulated, rows[1].simulated);
}

TEST(Describe, Summaries) {
  EXPECT_NE(describe(load_hardware(data_path("ring.hw"))).find("8 cores, 1 dim, 3 nets, 1 broadcast dim"),
            std::string::npos);
}

}  // namespace
}  // namespace dfmap
