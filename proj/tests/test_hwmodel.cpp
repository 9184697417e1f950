// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <random>

#include "dfmap/error.hpp"
#include "dfmap/hwmodel.hpp"
#include "test_support.hpp"

namespace dfmap {
namespace {

using test::data_path;

const char* kMesh = R"(
dim x = 8
dim y = 8
dim ch = 8
cores c(x, y) { mat shape=(8,16,16) tput=1/4 count=1; vec width=64 tput=1 count=1; scalar latency=1 }
mem l1(x, y) size=1536KiB bw=64
mem dram(ch) size=1GiB bw=36
mux c(x, y) -> l1(x, y) bw=64
mux c(x, y) -> dram(4*(y floordiv 4) + 2*(x floordiv 4) + x mod 2) bw=36
net h_ring links l1(x, y) -> l1((x + 1) mod 8, y) bw=32
net v_ring links l1(x, y) -> l1(x, (y + 1) mod 8) bw=32
)";

TEST(HwModel, ParsesMeshWithRings) {
  const HardwareModel hw = parse_hardware(kMesh);
  ASSERT_EQ(hw.dims.size(), 3u);
  EXPECT_EQ(hw.num_cores(), 64);
  ASSERT_EQ(hw.interconnects.size(), 2u);
  EXPECT_EQ(hw.interconnects[0].links.size(), 64u);
  EXPECT_EQ(hw.interconnects[1].links.size(), 64u);
  EXPECT_EQ(hw.abstraction_level(), AbstractionLevel::IntraCore);
  EXPECT_TRUE(validate(hw).empty());
}

TEST(HwModel, ParsesTripleRing) {
  const HardwareModel hw = load_hardware(data_path("ring.hw"));
  EXPECT_EQ(hw.num_cores(), 8);
  std::size_t links = 0;
  for (const auto& n : hw.interconnects) links += n.links.size();
  EXPECT_EQ(links, 24u);
}

TEST(HwModel, EmptyDocumentIsRejected) {
  try {
    parse_hardware("  # nothing here\n");
    FAIL() << "expected an error";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("no core grid declared"), std::string::npos);
  }
}

TEST(HwModel, SyntaxErrorsCarryPosition) {
  try {
    parse_hardware("dim x = 8\ncores c(x) {\n  mat shape=(8,16,16) tput 1 count=1 }\n");
    FAIL() << "expected an error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3);
  }
}

TEST(HwModel, UndeclaredDimAndNonAffineMaps) {
  EXPECT_THROW(parse_hardware("dim x = 8\ncores c(x, z) {}\n"), ParseError);
  EXPECT_THROW(parse_hardware("dim x = 8\ncores c(x) {}\nmem l(x) size=1KiB bw=1\n"
                              "net n links l(x) -> l(x * x) bw=1\n"),
               ParseError);
}

TEST(HwModel, ShippedModelsValidate) {
  for (const char* f : {"wormhole.hw", "mesh4x8.hw", "ring.hw"}) {
    const HardwareModel hw = load_hardware(data_path(f));
    EXPECT_TRUE(validate(hw, AbstractionLevel::IntraCore).empty()) << f;
  }
}

TEST(HwModel, MuxOutOfRangeGivesOneDiagnostic) {
  HwParseOptions opts;
  opts.validate = false;
  const HardwareModel hw = parse_hardware(
      "dim x = 8\ndim ch = 8\ncores c(x) {}\nmem l1(x) size=1KiB bw=1\nmem dram(ch) size=1KiB bw=1\n"
      "mux c(x) -> l1(x) bw=1\nmux c(x) -> dram(x + 2) bw=1\n",
      opts);
  const auto diags = validate(hw);
  ASSERT_EQ(diags.size(), 1u);
  EXPECT_EQ(diags[0].severity, Severity::Error);
  EXPECT_NE(diags[0].message.find("outside"), std::string::npos);
}

TEST(HwModel, MissingMemoryLayerIsReported) {
  const HardwareModel hw = parse_hardware("dim x = 4\ncores c(x) {}\n");
  const auto diags = validate(hw, AbstractionLevel::Memory);
  ASSERT_EQ(diags.size(), 1u);
  EXPECT_NE(diags[0].message.find("memory layer required"), std::string::npos);
  EXPECT_THROW(require_level(hw, AbstractionLevel::Memory, "planning"), InputError);
}

TEST(HwModel, BroadcastEligibility) {
  const HardwareModel mesh = parse_hardware(kMesh);
  const auto mesh_dims = broadcast_eligible_dims(mesh);
  ASSERT_EQ(mesh_dims.size(), 2u);
  EXPECT_EQ(mesh_dims[0], (BroadcastResource{"x", "h_ring"}));
  EXPECT_EQ(mesh_dims[1], (BroadcastResource{"y", "v_ring"}));

  const HardwareModel ring = load_hardware(data_path("ring.hw"));
  const auto ring_dims = broadcast_eligible_dims(ring);
  ASSERT_EQ(ring_dims.size(), 3u);
  EXPECT_EQ(ring_dims[0], (BroadcastResource{"x", "ring0"}));
  EXPECT_EQ(ring_dims[1], (BroadcastResource{"x", "ring1"}));
  EXPECT_EQ(ring_dims[2], (BroadcastResource{"x", "ring2"}));

  HardwareModel no_v = mesh;
  no_v.interconnects[1].links.clear();
  const auto h_only = broadcast_eligible_dims(no_v);
  ASSERT_EQ(h_only.size(), 1u);
  EXPECT_EQ(h_only[0], (BroadcastResource{"x", "h_ring"}));
}

TEST(HwModel, DiagonalNetIsNotEligible) {
  const HardwareModel hw = parse_hardware(
      "dim x = 4\ndim y = 4\ndim ch = 1\ncores c(x, y) {}\nmem l1(x, y) size=1KiB bw=1\nmem d(ch) size=1KiB bw=1\n"
      "mux c(x, y) -> l1(x, y) bw=1\nmux c(x, y) -> d(0) bw=1\n"
      "net diag links l1(x, y) -> l1((x + 1) mod 4, (y + 1) mod 4) bw=1\n");
  EXPECT_TRUE(broadcast_eligible_dims(hw).empty());
}

TEST(HwModel, ChainIsEligibleAndRoutesOnce) {
  const HardwareModel hw = parse_hardware(
      "dim x = 6\ndim ch = 1\ncores c(x) {}\nmem l1(x) size=1KiB bw=1\nmem d(ch) size=1KiB bw=1\n"
      "mux c(x) -> l1(x) bw=1\nmux c(x) -> d(0) bw=1\nnet chain links l1(x) -> l1(x + 1) bw=1\n");
  ASSERT_EQ(hw.interconnects[0].links.size(), 5u);
  ASSERT_EQ(broadcast_eligible_dims(hw).size(), 1u);
  const auto route = multicast_route(hw, hw.interconnects[0], "x", {3});
  ASSERT_TRUE(route.has_value());
  EXPECT_EQ(route->size(), 5u);
}

TEST(HwModel, RemovingLinksNeverAddsEligiblePairs) {
  HardwareModel hw = parse_hardware(kMesh);
  std::mt19937 rng(7);
  auto prev = broadcast_eligible_dims(hw).size();
  for (int round = 0; round < 40; ++round) {
    auto& net = hw.interconnects[rng() % hw.interconnects.size()];
    if (net.links.empty()) continue;
    net.links.erase(net.links.begin() + static_cast<long>(rng() % net.links.size()));
    const auto now = broadcast_eligible_dims(hw).size();
    EXPECT_LE(now, prev);
    prev = now;
  }
}

TEST(HwModel, DramChannels) {
  const HardwareModel hw = load_hardware(data_path("wormhole.hw"));
  EXPECT_EQ(dram_channel_of(hw, {0, 0}), 0);
  EXPECT_EQ(dram_channel_of(hw, {7, 7}), hw.num_dram_channels() - 1);
  EXPECT_THROW(dram_channel_of(hw, {8, 0}), std::out_of_range);
  const HardwareModel id = parse_hardware(
      "dim x = 8\ndim ch = 8\ncores c(x) {}\nmem l1(x) size=1KiB bw=1\nmem d(ch) size=1KiB bw=1\n"
      "mux c(x) -> l1(x) bw=1\nmux c(x) -> d(x) bw=1\n");
  EXPECT_EQ(dram_channel_of(id, {3}), 3);
  // Total over the grid.
  for (std::int64_t c = 0; c < hw.num_cores(); ++c) {
    const auto ch = dram_channel_of(hw, hw.core_from_linear(c));
    EXPECT_GE(ch, 0);
    EXPECT_LT(ch, hw.num_dram_channels());
  }
}

TEST(HwModel, WormholeMatchesHeadlineFigures) {
  const HardwareModel hw = load_hardware(data_path("wormhole.hw"));
  const ComputeUnit* mat = hw.cores->unit(UnitKind::Matrix);
  ASSERT_NE(mat, nullptr);
  const Rational ops_per_cycle = Rational(2 * mat->shape[0] * mat->shape[1] * mat->shape[2]) * mat->throughput;
  EXPECT_EQ(ops_per_cycle, Rational(1024));
  EXPECT_EQ(hw.local_memory()->capacity * hw.num_cores(), 96LL * 1024 * 1024);
  EXPECT_EQ(hw.dram()->port_bandwidth * Rational(hw.num_dram_channels()), Rational(288));
  EXPECT_EQ(usable_local_capacity(hw, 0.10), 1415577);
}

TEST(HwModel, PrintParseRoundTrip) {
  for (const char* f : {"wormhole.hw", "mesh4x8.hw", "ring.hw"}) {
    const HardwareModel hw = load_hardware(data_path(f));
    EXPECT_EQ(parse_hardware(print_hardware(hw)), hw) << f;
  }
}

TEST(HwModel, RandomModelsRoundTrip) {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const int nx = 1 + static_cast<int>(rng() % 6), ny = 1 + static_cast<int>(rng() % 5);
    const int ch = 1 + static_cast<int>(rng() % 4);
    const int step = 1 + static_cast<int>(rng() % 3);
    std::string text = "dim x = " + std::to_string(nx) + "\ndim y = " + std::to_string(ny) + "\ndim ch = " +
                       std::to_string(ch) + "\ncores c(x, y) { vec width=" + std::to_string(8 << (rng() % 4)) +
                       " tput=" + std::to_string(1 + rng() % 3) + "/" + std::to_string(1 + rng() % 5) +
                       " count=2 }\nmem l1(x, y) size=" + std::to_string(1 + rng() % 900) +
                       "KiB bw=16\nmem dram(ch) size=2GiB bw=" + std::to_string(1 + rng() % 40) +
                       "\nmux c(x, y) -> l1(x, y) bw=16\nmux c(x, y) -> dram((x + y) mod " + std::to_string(ch) +
                       ") bw=8\nnet n links l1(x, y) -> l1((x + " + std::to_string(step) + ") mod " +
                       std::to_string(nx) + ", y) bw=4\n";
    const HardwareModel hw = parse_hardware(text);
    EXPECT_EQ(parse_hardware(print_hardware(hw)), hw) << text;
  }
}

}  // namespace
}  // namespace dfmap
