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
 * BIRCH-style anomaly detection over metric and edge-latency series.
 *
 * Each series is summarized by (mean, variance) features. The history part
 * of the series, split into window-sized chunks, populates a single-level
 * CF tree; the detection window is anomalous when its feature point falls
 * outside the nearest leaf's radius scaled by the sensitivity beta. A
 * smaller beta therefore flags strictly more series. Flagged series of one
 * owner are grouped into clusters by CF-leaf membership over scale-free
 * deviation features.
 */

#ifndef EDGERCL_DETECT_HPP
#define EDGERCL_DETECT_HPP

#include <array>
#include <cmath>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "edgercl/core.hpp"
#include "edgercl/model.hpp"
#include "edgercl/partition.hpp"

namespace edgercl {

/// Clustering feature entry: n points folded into a linear sum vector and
/// a scalar sum of squared norms, mergeable in O(dim).
struct CfNode {
  std::size_t n = 0;
  std::vector<double> linear_sum;
  double square_sum = 0.0;
  std::vector<CfNode> children;  ///< empty for leaves
  double threshold = 0.0;        ///< merge radius this entry was built with

  void absorb(std::span<const double> point) {
    if (n == 0) linear_sum.assign(point.size(), 0.0);
    if (point.size() != linear_sum.size()) {
      throw Error("CF point dimensionality mismatch");
    }
    ++n;
    for (std::size_t i = 0; i < point.size(); ++i) {
      linear_sum[i] += point[i];
      square_sum += point[i] * point[i];
    }
  }

  std::vector<double> centroid() const {
    if (n == 0) throw Error("centroid of an empty CF entry");
    std::vector<double> c(linear_sum.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
      c[i] = linear_sum[i] / static_cast<double>(n);
    }
    return c;
  }

  /// RMS distance of absorbed points from the centroid.
  double radius() const {
    const auto c = centroid();
    double c2 = 0.0;
    for (double v : c) c2 += v * v;
    const double ms = square_sum / static_cast<double>(n) - c2;
    return std::sqrt(std::max(ms, 0.0));
  }
};

namespace detail {

inline double euclid(std::span<const double> a, std::span<const double> b) {
  double d2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    d2 += d * d;
  }
  return std::sqrt(d2);
}

}  // namespace detail

/**
 * Single-level CF tree: a flat list of leaf entries under an implicit
 * root. A point joins the nearest leaf when it lies within the merge
 * threshold, opens a new leaf otherwise, and falls back to the nearest
 * leaf once the branching cap is reached.
 */
class CfTree {
 public:
  explicit CfTree(double merge_threshold, std::size_t branching = 50)
      : threshold_(merge_threshold), branching_(branching) {}

  /// Inserts @p point, returning the index of the leaf that absorbed it.
  std::size_t insert(std::span<const double> point) {
    if (!leaves_.empty()) {
      const std::size_t near = nearest(point);
      const double dist = detail::euclid(point, leaves_[near].centroid());
      if (dist <= threshold_ || leaves_.size() >= branching_) {
        leaves_[near].absorb(point);
        return near;
      }
    }
    CfNode leaf;
    leaf.threshold = threshold_;
    leaf.absorb(point);
    leaves_.push_back(std::move(leaf));
    return leaves_.size() - 1;
  }

  /// Index of the leaf whose centroid is closest to @p point; first wins
  /// on ties so lookups are deterministic.
  std::size_t nearest(std::span<const double> point) const {
    if (leaves_.empty()) throw Error("nearest() on an empty CF tree");
    std::size_t best = 0;
    double best_d = detail::euclid(point, leaves_[0].centroid());
    for (std::size_t i = 1; i < leaves_.size(); ++i) {
      const double d = detail::euclid(point, leaves_[i].centroid());
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    return best;
  }

  const std::vector<CfNode>& leaves() const { return leaves_; }

 private:
  double threshold_;
  std::size_t branching_;
  std::vector<CfNode> leaves_;
};

struct DetectionResult {
  bool triggered = false;
  std::map<std::string, std::set<std::string>> anomalous_metrics;
  std::set<EdgeKey> anomalous_edges;
  /// Flagged series of one owner, grouped by CF-leaf membership.
  std::map<std::string, std::vector<std::vector<std::string>>> metric_clusters;
  std::map<EdgeKey, std::vector<std::vector<std::string>>> edge_clusters;

  friend bool operator==(const DetectionResult&, const DetectionResult&) =
      default;
};

namespace detail {

struct SeriesFeatures {
  double mean = 0.0;
  double variance = 0.0;
};

inline SeriesFeatures series_features(std::span<const double> v) {
  SeriesFeatures f;
  for (double x : v) f.mean += x;
  f.mean /= static_cast<double>(v.size());
  for (double x : v) f.variance += (x - f.mean) * (x - f.mean);
  f.variance /= static_cast<double>(v.size());
  return f;
}

struct SeriesVerdict {
  bool anomalous = false;
  std::array<double, 2> deviation{0.0, 0.0};  ///< scale-free, for grouping
};

/**
 * Core per-series test. History chunks of window length build the CF
 * tree; the merge threshold is twice the RMS spread of the chunk features
 * so a steady history collapses into few leaves. The window is anomalous
 * when its feature point sits beyond beta times the nearest leaf radius.
 */
inline SeriesVerdict assess_series(const std::vector<double>& values,
                                   const SampleWindow& w, double beta,
                                   const std::string& what) {
  if (w.start < 2 || w.size() < 2) {
    throw Error("series '" + what +
                "' needs at least 2 history and 2 window samples");
  }
  const auto history = history_view(values, w);
  const auto window = window_view(values, w);

  const std::size_t chunk = std::min(window.size(), history.size());
  const std::size_t k = history.size() / chunk;
  std::vector<std::array<double, 2>> points;
  points.reserve(k);
  // Oldest remainder samples are dropped so every chunk is full width.
  const std::size_t base = history.size() - k * chunk;
  for (std::size_t i = 0; i < k; ++i) {
    const auto f = series_features(history.subspan(base + i * chunk, chunk));
    points.push_back({f.mean, f.variance});
  }

  std::array<double, 2> mean{0.0, 0.0};
  for (const auto& p : points) {
    mean[0] += p[0];
    mean[1] += p[1];
  }
  mean[0] /= static_cast<double>(points.size());
  mean[1] /= static_cast<double>(points.size());
  double spread2 = 0.0;
  for (const auto& p : points) {
    const double d = euclid(p, mean);
    spread2 += d * d;
  }
  const double merge_threshold =
      2.0 * std::sqrt(spread2 / static_cast<double>(points.size()));

  CfTree tree(merge_threshold);
  for (const auto& p : points) tree.insert(p);

  const auto wf = series_features(window);
  const std::array<double, 2> wp{wf.mean, wf.variance};
  const auto& leaf = tree.leaves()[tree.nearest(wp)];
  const double dist = euclid(wp, leaf.centroid());

  SeriesVerdict v;
  v.anomalous = dist > beta * leaf.radius();

  const auto hf = series_features(history);
  const double scale =
      std::max({std::sqrt(hf.variance), 0.01 * std::abs(hf.mean), 1e-9});
  v.deviation = {(wf.mean - hf.mean) / scale,
                 (wf.variance - hf.variance) / (scale * scale)};
  return v;
}

/// Groups flagged series (in the given deterministic order) by CF-leaf
/// membership over their deviation features, unit merge threshold.
inline std::vector<std::vector<std::string>> group_by_leaf(
    const std::vector<std::pair<std::string, std::array<double, 2>>>& flagged) {
  CfTree tree(1.0);
  std::vector<std::vector<std::string>> groups;
  for (const auto& [name, dev] : flagged) {
    const std::size_t leaf = tree.insert(dev);
    if (leaf == groups.size()) groups.emplace_back();
    groups[leaf].push_back(name);
  }
  return groups;
}

}  // namespace detail

/**
 * Runs detection over every metric and edge-latency series of the bundle.
 * An edge is anomalous when any of its percentile series is. Pure and
 * deterministic for fixed (bundle, beta).
 */
inline DetectionResult detect(const ScenarioBundle& bundle, double beta) {
  if (!std::isfinite(beta) || beta <= 0.0 || beta >= 1.0) {
    throw Error("beta must lie in (0,1), got " + format_double(beta));
  }
  DetectionResult r;

  for (const auto& [ms, list] : bundle.metrics) {
    std::vector<std::pair<std::string, std::array<double, 2>>> flagged;
    for (const auto& s : list) {
      const auto v = detail::assess_series(s.values, bundle.window, beta,
                                           ms + "." + s.metric_name);
      if (v.anomalous) {
        r.anomalous_metrics[ms].insert(s.metric_name);
        flagged.emplace_back(s.metric_name, v.deviation);
      }
    }
    if (!flagged.empty()) {
      r.metric_clusters[ms] = detail::group_by_leaf(flagged);
    }
  }

  for (const auto& [key, per] : bundle.edge_latencies) {
    std::vector<std::pair<std::string, std::array<double, 2>>> flagged;
    for (const auto& [pct, s] : per) {
      const auto v = detail::assess_series(
          s.values, bundle.window, beta,
          edge_name(key) + "." + percentile_name(pct));
      if (v.anomalous) {
        flagged.emplace_back(percentile_name(pct), v.deviation);
      }
    }
    if (!flagged.empty()) {
      r.anomalous_edges.insert(key);
      r.edge_clusters[key] = detail::group_by_leaf(flagged);
    }
  }

  r.triggered = !r.anomalous_metrics.empty() || !r.anomalous_edges.empty();
  return r;
}

/// Anomalous edges of @p result that @p subgraph represents as edges into
/// one of its shadow nodes, returned in redirected (src, shadow id) form.
inline std::set<EdgeKey> mark_shadow_edge_anomalies(
    const DetectionResult& result, const ClusterSubgraph& subgraph) {
  std::set<EdgeKey> out;
  for (const auto& [key, freq] : subgraph.shadow_edges) {
    (void)freq;
    if (result.anomalous_edges.count(resolve_shadow_edge(subgraph, key))) {
      out.insert(key);
    }
  }
  return out;
}

}  // namespace edgercl

#endif  // EDGERCL_DETECT_HPP
