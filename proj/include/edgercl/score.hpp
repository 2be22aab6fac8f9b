/*
 *   Copyright 2026 The edgercl authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/**
 * @file
 *
 * Anomaly scoring. A microservice's score is the pairwise correlation
 * mass of its anomalous metrics plus, per anomalous incoming edge, the
 * best correlation between that edge's p90 response time and any of the
 * node's anomalous metrics. An edge's score is the pairwise correlation
 * mass of its anomalous percentile series. All correlations are absolute
 * Pearson over the detection-window segment only.
 */

#ifndef EDGERCL_SCORE_HPP
#define EDGERCL_SCORE_HPP

#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "edgercl/core.hpp"
#include "edgercl/detect.hpp"
#include "edgercl/model.hpp"

namespace edgercl {

/// Absolute Pearson correlation; 0 when either series has zero variance
/// (a flat series carries no co-movement evidence).
inline double abs_pearson(std::span<const double> x,
                          std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error("correlation over series of different lengths");
  }
  if (x.size() < 2) {
    throw Error("correlation needs at least 2 samples");
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  const double r = std::abs(sxy / std::sqrt(sxx * syy));
  return std::min(r, 1.0);  // clamp rounding spill above 1
}

/// Sum of abs_pearson over all unordered pairs of the cluster; a single
/// member has no pairs and contributes 0.
inline double metric_influence(
    const std::vector<std::span<const double>>& cluster) {
  if (cluster.empty()) {
    throw Error("metric_influence over an empty cluster");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < cluster.size(); ++i) {
    for (std::size_t j = i + 1; j < cluster.size(); ++j) {
      sum += abs_pearson(cluster[i], cluster[j]);
    }
  }
  return sum;
}

/// Per downstream response-time series, the best correlation against any
/// anomalous metric of the node, summed over downstreams.
inline double edge_influence(
    const std::vector<std::span<const double>>& downstream_rt,
    const std::vector<std::span<const double>>& metrics) {
  double sum = 0.0;
  for (const auto& rt : downstream_rt) {
    double best = 0.0;
    for (const auto& x : metrics) {
      best = std::max(best, abs_pearson(rt, x));
    }
    sum += best;
  }
  return sum;
}

struct AnomalyScores {
  std::map<std::string, double> node_scores;
  std::map<EdgeKey, double> edge_scores;

  friend bool operator==(const AnomalyScores&, const AnomalyScores&) = default;
};

/// Deterministic compute-cost model: every correlation costs its sample
/// count in units, attributed to the scored element.
struct ScoreCost {
  std::map<std::string, std::uint64_t> node_units;
  std::map<EdgeKey, std::uint64_t> edge_units;
  std::uint64_t total_units = 0;
};

/**
 * Applies the scoring equations to every anomalous element. Only
 * microservices and edges with at least one anomalous series get an
 * entry; their score may still be 0 (for example a node with a single
 * anomalous metric and no anomalous incoming edges).
 */
inline AnomalyScores score_all(const TopologyGraph& topology,
                               const DetectionResult& detection,
                               const ScenarioBundle& bundle,
                               ScoreCost* cost = nullptr) {
  if (!detection.triggered) {
    throw Error("score_all called without a detection trigger");
  }
  AnomalyScores scores;
  const SampleWindow& w = bundle.window;
  const auto len = static_cast<std::uint64_t>(w.size());

  const auto metric_window = [&](const std::string& ms,
                                 const std::string& name) {
    for (const auto& s : bundle.metrics.at(ms)) {
      if (s.metric_name == name) return window_view(s.values, w);
    }
    throw Error("anomalous metric '" + name + "' missing from bundle for '" +
                ms + "'");
  };

  for (const auto& [ms, names] : detection.anomalous_metrics) {
    if (!topology.has_microservice(ms)) {
      throw Error("detection names unknown microservice '" + ms + "'");
    }
    std::vector<std::span<const double>> cluster;
    for (const auto& name : names) cluster.push_back(metric_window(ms, name));

    std::vector<std::span<const double>> downstream;
    for (const auto& key : topology.in_edges(ms)) {
      if (detection.anomalous_edges.count(key) == 0) continue;
      downstream.push_back(
          window_view(bundle.edge_latencies.at(key).at(Percentile::p90).values,
                      w));
    }

    scores.node_scores[ms] =
        metric_influence(cluster) + edge_influence(downstream, cluster);
    if (cost) {
      const std::uint64_t pairs = cluster.size() * (cluster.size() - 1) / 2;
      const std::uint64_t units =
          (pairs + downstream.size() * cluster.size()) * len;
      cost->node_units[ms] = units;
      cost->total_units += units;
    }
  }

  for (const auto& key : detection.anomalous_edges) {
    auto lat = bundle.edge_latencies.find(key);
    if (lat == bundle.edge_latencies.end()) {
      throw Error("detection names unknown edge " + edge_name(key));
    }
    std::vector<std::span<const double>> cluster;
    for (const auto& name : detection.edge_clusters.at(key)) {
      for (const auto& pct : name) {
        cluster.push_back(
            window_view(lat->second.at(parse_percentile(pct)).values, w));
      }
    }
    scores.edge_scores[key] = metric_influence(cluster);
    if (cost) {
      const std::uint64_t units =
          cluster.size() * (cluster.size() - 1) / 2 * len;
      cost->edge_units[key] = units;
      cost->total_units += units;
    }
  }
  return scores;
}

}  // namespace edgercl

#endif  // EDGERCL_SCORE_HPP
