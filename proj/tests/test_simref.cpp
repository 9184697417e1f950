// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <random>

#include "dfmap/error.hpp"
#include "dfmap/simref.hpp"
#include "test_support.hpp"

namespace dfmap {
namespace {

using test::data_path;

TEST(UniformPipeline, MatchesClosedForm) {
  EXPECT_EQ(simulate_uniform(4, 2, 5, 1).makespan, 23);
  EXPECT_EQ(simulate_uniform(2, 0, 7, 0).makespan, 14);
  EXPECT_EQ(simulate_uniform(10, 6, 2, 2).makespan, 80);
  EXPECT_EQ(simulate_uniform(1, 3, 4, 5).makespan, 12);
  std::mt19937_64 rng(5);
  for (int i = 0; i < 500; ++i) {
    const std::int64_t n = static_cast<std::int64_t>(rng() % 64) + 1;
    const std::int64_t l = rng() % 100, c = rng() % 100, s = rng() % 100;
    EXPECT_EQ(simulate_uniform(n, l, c, s).makespan, static_cast<double>(loop_time(n, l, c, s)))
        << n << " " << l << " " << c << " " << s;
  }
  EXPECT_THROW(simulate_uniform(0, 1, 1, 1), InputError);
}

TEST(UniformPipeline, BindingFollowsTheBottleneck) {
  EXPECT_EQ(simulate_uniform(8, 1, 10, 1).binding, Binding::Compute);
  EXPECT_EQ(simulate_uniform(8, 6, 10, 6).binding, Binding::Memory);
}

class GemmSim : public ::testing::Test {
 protected:
  HardwareModel hw = load_hardware(data_path("wormhole.hw"));
  TileKernel k = build_gemm(1024, 1024, 1024, 128, 128, 128);
  CandidateSet cs = enumerate_candidates(enumerate_mappings(k, hw), k, hw);
};

TEST_F(GemmSim, TrafficMatchesClosedForm) {
  ASSERT_GT(cs.candidates.size(), 30u);
  for (const auto& c : cs.candidates) {
    const SimTrace t = simulate(c, hw);
    const Traffic expect = traffic(c, hw);
    EXPECT_EQ(t.dram_bytes, expect.dram_bytes) << c.encoding;
    EXPECT_EQ(t.noc_bytes, expect.noc_bytes) << c.encoding;
    EXPECT_EQ(t.tile_loads, expect.tile_loads) << c.encoding;
  }
}

TEST_F(GemmSim, BuffersStayWithinThePlannedFootprint) {
  for (const auto& c : cs.candidates) {
    const SimTrace t = simulate(c, hw);
    EXPECT_TRUE(t.overflow.empty()) << t.overflow;
    EXPECT_LE(t.peak_buffer, c.peak_live()) << c.encoding;
    EXPECT_LE(t.peak_buffer, usable_local_capacity(hw, 0.10));
  }
}

TEST_F(GemmSim, ComputeWorkIsConserved) {
  // 512 tile matmuls of 4096 cycles each, whatever the schedule.
  for (const auto& c : cs.candidates) EXPECT_EQ(simulate(c, hw).compute_busy, 512.0 * 4096) << c.encoding;
}

TEST_F(GemmSim, NeverFasterThanTheRoofline) {
  for (const auto& c : cs.candidates) {
    const CostEstimate e = estimate(c, hw);
    const SimTrace t = simulate(c, hw);
    EXPECT_GE(t.makespan + 1e-6, e.compute_bound) << c.encoding;
    EXPECT_GE(t.makespan + 1e-6, e.dram_bound) << c.encoding;
  }
}

TEST_F(GemmSim, ModelTracksSimulator) {
  std::vector<Comparison> rows;
  for (const auto& c : cs.candidates) rows.push_back(compare(estimate(c, hw), simulate(c, hw)));
  EXPECT_LE(geomean_relative_error(rows), 0.20);
}

TEST_F(GemmSim, Deterministic) {
  const auto& c = cs.candidates[cs.candidates.size() / 2];
  const SimTrace a = simulate(c, hw);
  const SimTrace b = simulate(c, hw);
  EXPECT_EQ(a.makespan, b.makespan);
  EXPECT_EQ(a.events, b.events);
  EXPECT_EQ(a.peak_buffer_per_core, b.peak_buffer_per_core);
}

TEST_F(GemmSim, IntervalsCoverTheRun) {
  SimOptions opts;
  opts.record_intervals = true;
  const SimTrace t = simulate(cs.candidates.front(), hw, opts);
  ASSERT_FALSE(t.intervals.empty());
  double last = 0;
  std::map<std::string, double> compute_end;
  for (const auto& iv : t.intervals) {
    EXPECT_LE(iv.start, iv.end);
    last = std::max(last, iv.end);
    if (iv.tag == "compute") {
      // One core computes one body at a time.
      EXPECT_GE(iv.start + 1e-9, compute_end[iv.actor]) << iv.actor;
      compute_end[iv.actor] = iv.end;
    }
  }
  EXPECT_DOUBLE_EQ(last, t.makespan);
  const std::string csv = trace_csv(t);
  EXPECT_EQ(csv.rfind("actor,start_cycle,end_cycle,tag\n", 0), 0u);
  EXPECT_EQ(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')), t.intervals.size() + 1);
}

TEST_F(GemmSim, SelectFinalPicksTheFastestSimulation) {
  std::vector<const ScheduleCandidate*> picks;
  for (std::size_t i = 0; i < 5; ++i) picks.push_back(&cs.candidates[i * 7]);
  const Selection sel = select_final(picks, hw);
  ASSERT_EQ(sel.table.size(), 5u);
  for (const auto& row : sel.table) EXPECT_LE(sel.table[sel.winner].simulated, row.simulated);
  EXPECT_EQ(sel.table[sel.winner].id, picks[sel.winner]->id);
  EXPECT_THROW(select_final({}, hw), InputError);
}

TEST(Simulate, OverflowIsReported) {
  // Two 256x256 fp16 operands hoisted over all 8 K tiles need 2 MiB.
  const auto hw = load_hardware(data_path("wormhole.hw"));
  const auto k = std::make_shared<const TileKernel>(build_gemm(2048, 2048, 2048, 256, 256, 256));
  std::shared_ptr<const MappedNest> nest;
  for (const auto& m : enumerate_mappings(*k, hw)) {
    if (m.encoding() == "gm=[x] gn=[y] waves=()") nest = std::make_shared<const MappedNest>(apply_mapping(*k, hw, m));
  }
  ASSERT_TRUE(nest);
  const auto c = make_candidate(k, nest, hw, {{Realization{}, 0}, {Realization{}, 0}, {Realization{}, 0}});
  EXPECT_THROW(simulate(c, hw), SimError);
  SimOptions lax;
  lax.strict_capacity = false;
  const SimTrace t = simulate(c, hw, lax);
  EXPECT_FALSE(t.overflow.empty());
  EXPECT_GT(t.peak_buffer, usable_local_capacity(hw, 0.10));
}

TEST(Compare, GeomeanIsSymmetricInLogSpace) {
  Comparison over;
  over.estimated = 110;
  over.simulated = 100;
  Comparison under;
  under.estimated = 100;
  under.simulated = 110;
  EXPECT_NEAR(geomean_relative_error({over, under}), 0.1, 1e-12);
  EXPECT_EQ(geomean_relative_error({}), 0.0);
}

}  // namespace
}  // namespace dfmap
