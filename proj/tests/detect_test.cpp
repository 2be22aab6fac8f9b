// Copyright 2026 The edgercl authors
// SPDX-License-Identifier: Apache-2.0

#include "edgercl/detect.hpp"

#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <vector>

#include "test_util.hpp"

namespace edgercl {
namespace {

TEST(CfNodeTest, CentroidAndRadius) {
  CfNode node;
  node.absorb(std::array<double, 2>{0.0, 0.0});
  node.absorb(std::array<double, 2>{2.0, 0.0});
  const auto c = node.centroid();
  EXPECT_DOUBLE_EQ(c[0], 1.0);
  EXPECT_DOUBLE_EQ(c[1], 0.0);
  EXPECT_DOUBLE_EQ(node.radius(), 1.0);
  EXPECT_THROW(node.absorb(std::array<double, 3>{1, 2, 3}), Error);
  EXPECT_THROW(CfNode{}.centroid(), Error);
}

TEST(CfTreeTest, OpensLeavesBeyondThresholdAndCapsBranching) {
  CfTree tree(1.0, 2);
  EXPECT_EQ(tree.insert(std::array<double, 1>{0.0}), 0u);
  EXPECT_EQ(tree.insert(std::array<double, 1>{10.0}), 1u);
  // branching cap of 2 reached: forced into the nearest leaf
  EXPECT_EQ(tree.insert(std::array<double, 1>{100.0}), 1u);
  EXPECT_EQ(tree.leaves().size(), 2u);
  EXPECT_EQ(tree.leaves()[1].n, 2u);
}

TEST(CfTreeTest, NearestBreaksTiesByFirstLeaf) {
  CfTree tree(0.1);
  tree.insert(std::array<double, 1>{0.0});
  tree.insert(std::array<double, 1>{2.0});
  // 1.0 is equidistant from both centroids; the first leaf wins
  EXPECT_EQ(tree.nearest(std::array<double, 1>{1.0}), 0u);
  EXPECT_THROW(CfTree(1.0).nearest(std::array<double, 1>{0.0}), Error);
}

TEST(SeriesFeaturesTest, MeanAndPopulationVariance) {
  const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
  const auto f = detail::series_features(v);
  EXPECT_DOUBLE_EQ(f.mean, 2.5);
  EXPECT_DOUBLE_EQ(f.variance, 1.25);  // population, not sample, variance
}

TEST(AssessSeriesTest, FlagsShiftedWindowOnSteadyHistory) {
  std::vector<double> v = testing::constant_series(10, 5.0);
  v[8] = 6.0;
  v[9] = 6.0;
  const auto verdict =
      detail::assess_series(v, SampleWindow{8, 10}, 0.07, "t");
  EXPECT_TRUE(verdict.anomalous);
}

TEST(AssessSeriesTest, SteadyWindowIsQuiet) {
  const std::vector<double> v = testing::constant_series(10, 5.0);
  EXPECT_FALSE(
      detail::assess_series(v, SampleWindow{8, 10}, 0.07, "t").anomalous);
}

// The scenario generator's noise model relies on this: a pattern that
// repeats with the window period yields identical chunk features, so the
// window is statistically indistinguishable from history at any beta.
TEST(AssessSeriesTest, WindowPeriodicPatternIsAbsorbed) {
  const std::vector<double> pattern{3.0, 7.0, 4.0, 9.0};
  std::vector<double> v;
  for (int rep = 0; rep < 5; ++rep) {
    v.insert(v.end(), pattern.begin(), pattern.end());
  }
  const SampleWindow w{16, 20};
  EXPECT_FALSE(detail::assess_series(v, w, 0.01, "t").anomalous);
  EXPECT_FALSE(detail::assess_series(v, w, 0.99, "t").anomalous);
}

TEST(AssessSeriesTest, OldestRemainderSamplesAreDropped) {
  // History 999,5,5,5,5 with window length 2 chunks as (5,5)(5,5); the
  // odd leading sample must not widen the tolerance.
  const std::vector<double> v{999.0, 5.0, 5.0, 5.0, 5.0, 6.0, 6.0};
  EXPECT_TRUE(
      detail::assess_series(v, SampleWindow{5, 7}, 0.5, "t").anomalous);
}

TEST(AssessSeriesTest, NeedsMinimalHistoryAndWindow) {
  const std::vector<double> v = testing::constant_series(6, 1.0);
  EXPECT_THROW(detail::assess_series(v, SampleWindow{1, 4}, 0.1, "t"), Error);
  EXPECT_THROW(detail::assess_series(v, SampleWindow{5, 6}, 0.1, "t"), Error);
}

// Spec invariant: smaller beta flags a superset of series.
TEST(AssessSeriesTest, BetaMonotonicityOnRandomSeries) {
  testing::Rng rng(2024);
  const SampleWindow w{12, 16};
  int flagged_any = 0;
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<double> v;
    const double base = rng.uniform(1.0, 100.0);
    for (std::size_t i = 0; i < 16; ++i) {
      v.push_back(base + rng.uniform(-1.0, 1.0) * rng.uniform(0.0, 5.0));
    }
    bool prev = false;
    for (double beta : {0.9, 0.5, 0.1, 0.01}) {  // descending
      const bool now = detail::assess_series(v, w, beta, "t").anomalous;
      EXPECT_TRUE(now || !prev)
          << "series flagged at a larger beta but not at a smaller one";
      prev = now;
      flagged_any += now;
    }
  }
  EXPECT_GT(flagged_any, 0);  // the corpus exercises both outcomes
}

TEST(GroupingTest, SplitsOppositeDeviations) {
  const std::vector<std::pair<std::string, std::array<double, 2>>> flagged{
      {"up1", {10.0, 0.0}}, {"up2", {10.1, 0.0}}, {"down", {-10.0, 0.0}}};
  const auto groups = detail::group_by_leaf(flagged);
  ASSERT_EQ(groups.size(), 2u);
  EXPECT_EQ(groups[0], (std::vector<std::string>{"up1", "up2"}));
  EXPECT_EQ(groups[1], (std::vector<std::string>{"down"}));
}

ScenarioBundle detection_bundle() {
  testing::BundleBuilder bb;
  bb.edges = {{"a", "b", 5.0}, {"b", "c", 5.0}};
  bb.deployments = {{"a", "d1"}, {"b", "d1"}, {"c", "d1"}};
  bb.length = 12;
  bb.window = SampleWindow{10, 12};
  std::vector<double> ramp = testing::constant_series(12, 50.0);
  ramp[10] = 60.0;
  ramp[11] = 70.0;
  bb.metric_values["a"]["cpu"] = ramp;
  bb.metric_values["a"]["mem"] = testing::constant_series(12, 100.0);
  std::vector<double> rt = testing::constant_series(12, 10.0);
  rt[10] = 14.0;
  rt[11] = 18.0;
  bb.latency_values[{"a", "b"}][Percentile::p90] = rt;
  bb.latency_values[{"a", "b"}][Percentile::p50] =
      testing::constant_series(12, 4.0);
  return bb.build();
}

TEST(DetectTest, FlagsInjectedSeriesOnly) {
  const DetectionResult r = detect(detection_bundle(), 0.07);
  EXPECT_TRUE(r.triggered);
  ASSERT_EQ(r.anomalous_metrics.size(), 1u);
  EXPECT_EQ(r.anomalous_metrics.at("a"),
            (std::set<std::string>{"cpu"}));
  // the edge counts as anomalous although only one percentile moved
  EXPECT_EQ(r.anomalous_edges, (std::set<EdgeKey>{{"a", "b"}}));
  ASSERT_EQ(r.edge_clusters.at({"a", "b"}).size(), 1u);
  EXPECT_EQ(r.edge_clusters.at({"a", "b"}).front(),
            (std::vector<std::string>{"p90"}));
}

TEST(DetectTest, QuietBundleDoesNotTrigger) {
  testing::BundleBuilder bb;
  bb.edges = {{"a", "b", 5.0}};
  bb.deployments = {{"a", "d1"}, {"b", "d1"}};
  const DetectionResult r = detect(bb.build(), 0.07);
  EXPECT_FALSE(r.triggered);
  EXPECT_TRUE(r.anomalous_metrics.empty());
  EXPECT_TRUE(r.anomalous_edges.empty());
}

TEST(DetectTest, RejectsBadBeta) {
  const ScenarioBundle b = detection_bundle();
  for (double beta : {0.0, 1.0, -0.5, std::nan("")}) {
    EXPECT_THROW(detect(b, beta), Error);
  }
}

TEST(DetectTest, DeterministicForFixedInput) {
  const ScenarioBundle b = detection_bundle();
  EXPECT_EQ(detect(b, 0.07), detect(b, 0.07));
}

TEST(ShadowMarkTest, RedirectsAnomalousCrossEdges) {
  const TopologyGraph g = build_topology(
      {{"a", "b", 5.0}, {"a", "c", 2.0}},
      {{"a", "d1"}, {"b", "d2"}, {"c", "d1"}});
  const ClusterMap cmap =
      cluster_devices(g, std::numeric_limits<double>::infinity());
  const auto sgs = build_subgraphs(g, cmap);
  const ClusterSubgraph* d1 = nullptr;
  for (const auto& sg : sgs) {
    if (sg.cluster_id == "d1") d1 = &sg;
  }
  ASSERT_NE(d1, nullptr);

  DetectionResult det;
  det.triggered = true;
  det.anomalous_edges.insert({"a", "b"});
  const auto marked = mark_shadow_edge_anomalies(det, *d1);
  EXPECT_EQ(marked, (std::set<EdgeKey>{{"a", shadow_id("b")}}));
  EXPECT_EQ(resolve_shadow_edge(*d1, *marked.begin()), (EdgeKey{"a", "b"}));

  det.anomalous_edges.clear();
  EXPECT_TRUE(mark_shadow_edge_anomalies(det, *d1).empty());
}

}  // namespace
}  // namespace edgercl
