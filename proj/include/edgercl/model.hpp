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
 * Domain model for edge microservice deployments: devices, microservices,
 * the communication graph, telemetry series, and the scenario bundle that
 * ties them together. Everything downstream (detection, scoring, ranking)
 * consumes these types; all containers are ordered so that iteration, and
 * therefore every derived artifact, is deterministic.
 */

#ifndef EDGERCL_MODEL_HPP
#define EDGERCL_MODEL_HPP

#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "edgercl/core.hpp"

namespace edgercl {

struct EdgeDevice {
  std::string id;
  int capacity_rank = 0;  ///< relative compute capacity, larger is faster

  friend bool operator==(const EdgeDevice&, const EdgeDevice&) = default;
};

struct Microservice {
  std::string id;
  std::string device_id;  ///< device this instance is pinned to

  friend bool operator==(const Microservice&, const Microservice&) = default;
};

/**
 * Deployment topology: devices, microservice placements, and the directed
 * communication graph. An edge (p, q) means p calls q; its weight is the
 * observed communication frequency.
 */
struct TopologyGraph {
  std::map<std::string, EdgeDevice> devices;
  std::map<std::string, Microservice> microservices;
  std::map<EdgeKey, double> comm_edges;

  friend bool operator==(const TopologyGraph&, const TopologyGraph&) = default;

  bool has_microservice(const std::string& ms) const {
    return microservices.count(ms) != 0;
  }

  const std::string& device_of(const std::string& ms) const {
    auto it = microservices.find(ms);
    if (it == microservices.end()) {
      throw Error("unknown microservice '" + ms + "'");
    }
    return it->second.device_id;
  }

  /// Direct dependencies of @p ms: edges where ms is the source.
  std::vector<EdgeKey> out_edges(const std::string& ms) const {
    std::vector<EdgeKey> r;
    for (const auto& [key, freq] : comm_edges) {
      (void)freq;
      if (key.first == ms) r.push_back(key);
    }
    return r;
  }

  /// Edges whose target is @p ms (its callers).
  std::vector<EdgeKey> in_edges(const std::string& ms) const {
    std::vector<EdgeKey> r;
    for (const auto& [key, freq] : comm_edges) {
      (void)freq;
      if (key.second == ms) r.push_back(key);
    }
    return r;
  }
};

struct RawEdge {
  std::string src;
  std::string dst;
  double frequency = 0.0;
};

/**
 * Builds a validated topology from raw observations.
 *
 * Every edge endpoint must appear in @p deployments, self loops are
 * rejected, frequencies must be finite and non-negative, and duplicate
 * (src, dst) observations are aggregated by summing their frequencies.
 * Devices are derived from the deployment targets; @p device_ranks may
 * assign capacity ranks and defaults any missing device to rank 0.
 */
inline TopologyGraph build_topology(
    const std::vector<RawEdge>& raw_edges,
    const std::map<std::string, std::string>& deployments,
    const std::map<std::string, int>& device_ranks = {}) {
  TopologyGraph g;
  for (const auto& [ms, dev] : deployments) {
    require_valid_id(ms, "microservice");
    require_valid_id(dev, "device");
    g.microservices[ms] = Microservice{ms, dev};
    if (g.devices.count(dev) == 0) {
      int rank = 0;
      if (auto it = device_ranks.find(dev); it != device_ranks.end()) {
        rank = it->second;
      }
      g.devices[dev] = EdgeDevice{dev, rank};
    }
  }
  for (const auto& e : raw_edges) {
    if (!g.has_microservice(e.src)) {
      throw Error("edge references unknown microservice '" + e.src + "'");
    }
    if (!g.has_microservice(e.dst)) {
      throw Error("edge references unknown microservice '" + e.dst + "'");
    }
    if (e.src == e.dst) {
      throw Error("self loop on microservice '" + e.src + "' is not allowed");
    }
    if (!std::isfinite(e.frequency) || e.frequency < 0.0) {
      throw Error("edge " + edge_name({e.src, e.dst}) +
                  " has a negative or non-finite frequency");
    }
    g.comm_edges[{e.src, e.dst}] += e.frequency;
  }
  return g;
}

/// One named telemetry series owned by a microservice.
struct MetricSeries {
  std::string owner;
  std::string metric_name;
  std::string unit;
  std::vector<double> values;

  friend bool operator==(const MetricSeries&, const MetricSeries&) = default;
};

enum class Percentile { p50, p90, p99 };

inline const char* percentile_name(Percentile p) {
  switch (p) {
    case Percentile::p50: return "p50";
    case Percentile::p90: return "p90";
    case Percentile::p99: return "p99";
  }
  throw Error("invalid percentile tag");
}

inline Percentile parse_percentile(std::string_view s) {
  if (s == "p50") return Percentile::p50;
  if (s == "p90") return Percentile::p90;
  if (s == "p99") return Percentile::p99;
  throw Error("unknown percentile '" + std::string(s) +
              "', expected p50, p90 or p99");
}

/// Response-time percentile series observed on one communication edge.
struct EdgeLatencySeries {
  EdgeKey edge;
  Percentile percentile = Percentile::p90;
  std::vector<double> values;

  friend bool operator==(const EdgeLatencySeries&, const EdgeLatencySeries&) =
      default;
};

/// Half-open sample range [start, end) marking the detection window;
/// samples before @c start are the per-series history.
struct SampleWindow {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - start; }

  friend bool operator==(const SampleWindow&, const SampleWindow&) = default;
};

inline std::span<const double> window_view(const std::vector<double>& values,
                                           const SampleWindow& w) {
  return std::span<const double>(values).subspan(w.start, w.end - w.start);
}

inline std::span<const double> history_view(const std::vector<double>& values,
                                            const SampleWindow& w) {
  return std::span<const double>(values).first(w.start);
}

/**
 * A complete evaluation scenario: topology, aligned telemetry, the labeled
 * root cause, and the detection window. All series in a bundle share one
 * sample clock and one length.
 */
struct ScenarioBundle {
  TopologyGraph topology;
  /// Per microservice, its metric series sorted by metric name.
  std::map<std::string, std::vector<MetricSeries>> metrics;
  std::map<EdgeKey, std::map<Percentile, EdgeLatencySeries>> edge_latencies;
  std::string ground_truth;
  SampleWindow window;

  friend bool operator==(const ScenarioBundle&, const ScenarioBundle&) =
      default;

  std::size_t series_length() const {
    for (const auto& [ms, list] : metrics) {
      (void)ms;
      if (!list.empty()) return list.front().values.size();
    }
    for (const auto& [key, per] : edge_latencies) {
      (void)key;
      if (!per.empty()) return per.begin()->second.values.size();
    }
    return 0;
  }
};

namespace detail {

inline void check_series(const std::vector<double>& values,
                         std::size_t expected_len, const std::string& what) {
  if (values.size() != expected_len) {
    throw Error(what + " has length " + std::to_string(values.size()) +
                ", expected " + std::to_string(expected_len) +
                " (series lengths must be uniform per bundle)");
  }
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw Error(what + " contains a non-finite sample");
    }
  }
}

}  // namespace detail

/**
 * Checks every cross-reference and series invariant of a bundle. Throws
 * Error naming the first violation; a bundle that passes is safe input for
 * the whole pipeline.
 */
inline void validate_bundle(const ScenarioBundle& b) {
  const std::size_t len = b.series_length();
  if (len < 2) {
    throw Error("bundle carries no usable telemetry (series length < 2)");
  }
  for (const auto& [ms, list] : b.metrics) {
    if (!b.topology.has_microservice(ms)) {
      throw Error("metrics reference unknown microservice '" + ms + "'");
    }
    std::set<std::string> names;
    for (const auto& s : list) {
      if (s.owner != ms) {
        throw Error("metric '" + s.metric_name + "' filed under '" + ms +
                    "' claims owner '" + s.owner + "'");
      }
      require_valid_id(s.metric_name, "metric");
      if (!names.insert(s.metric_name).second) {
        throw Error("duplicate metric name '" + s.metric_name + "' on '" +
                    ms + "'");
      }
      detail::check_series(s.values, len, "metric " + ms + "." + s.metric_name);
    }
  }
  for (const auto& [ms, rec] : b.topology.microservices) {
    (void)rec;
    if (b.metrics.count(ms) == 0) {
      throw Error("missing metrics table for microservice '" + ms + "'");
    }
  }
  for (const auto& [key, per] : b.edge_latencies) {
    if (b.topology.comm_edges.count(key) == 0) {
      throw Error("latency series reference unknown edge " + edge_name(key));
    }
    for (const auto& [pct, s] : per) {
      if (s.edge != key || s.percentile != pct) {
        throw Error("latency series mis-filed for edge " + edge_name(key));
      }
      detail::check_series(s.values, len,
                           "latency " + edge_name(key) + " " +
                               percentile_name(pct));
    }
  }
  for (const auto& [key, freq] : b.topology.comm_edges) {
    (void)freq;
    auto it = b.edge_latencies.find(key);
    if (it == b.edge_latencies.end() ||
        it->second.count(Percentile::p90) == 0) {
      throw Error("edge " + edge_name(key) +
                  " is missing its p90 response-time series");
    }
  }
  if (!b.topology.has_microservice(b.ground_truth)) {
    throw Error("ground-truth root cause '" + b.ground_truth +
                "' is not a deployed microservice");
  }
  if (b.window.start >= b.window.end || b.window.end > len) {
    throw Error("detection window [" + std::to_string(b.window.start) + ", " +
                std::to_string(b.window.end) +
                ") does not fit the series length " + std::to_string(len));
  }
}

}  // namespace edgercl

#endif  // EDGERCL_MODEL_HPP
