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
 * Device clustering and per-cluster subgraph construction.
 *
 * Clustering greedily merges the device-cluster pair with the highest
 * inter-cluster communication weight while that weight exceeds the
 * threshold tau. Each resulting cluster then gets a topology subgraph in
 * which outgoing cross-cluster edges are redirected to shadow nodes that
 * stand in for the external target, so a cluster can run localization
 * without seeing its neighbors' internals.
 */

#ifndef EDGERCL_PARTITION_HPP
#define EDGERCL_PARTITION_HPP

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "edgercl/core.hpp"
#include "edgercl/model.hpp"

namespace edgercl {

/// Shadow vertices are namespaced so they can never collide with
/// microservice ids (':' is outside the id charset).
inline std::string shadow_id(const std::string& external_ms) {
  return "shadow:" + external_ms;
}

struct Cluster {
  std::string id;  ///< canonical: sorted member device ids joined by '+'
  std::set<std::string> member_devices;
  std::set<std::string> member_microservices;

  friend bool operator==(const Cluster&, const Cluster&) = default;
};

struct ClusterMap {
  std::map<std::string, Cluster> clusters;
  std::map<std::string, std::string> assignment;  ///< device id -> cluster id

  friend bool operator==(const ClusterMap&, const ClusterMap&) = default;

  const std::string& cluster_of_device(const std::string& device) const {
    auto it = assignment.find(device);
    if (it == assignment.end()) {
      throw Error("device '" + device + "' has no cluster assignment");
    }
    return it->second;
  }

  const std::string& cluster_of_ms(const TopologyGraph& g,
                                   const std::string& ms) const {
    return cluster_of_device(g.device_of(ms));
  }
};

struct ClusterSubgraph {
  std::string cluster_id;
  std::set<std::string> vertices;             ///< member ms ∪ shadow ids
  std::map<EdgeKey, double> intra_edges;      ///< both endpoints internal
  std::map<std::string, std::string> shadow_nodes;  ///< shadow id -> external ms
  std::map<EdgeKey, double> shadow_edges;     ///< internal src -> shadow id

  friend bool operator==(const ClusterSubgraph&, const ClusterSubgraph&) =
      default;
};

namespace detail {

inline std::string canonical_cluster_id(const std::set<std::string>& devices) {
  std::string id;
  for (const auto& d : devices) {
    if (!id.empty()) id += '+';
    id += d;
  }
  return id;
}

}  // namespace detail

/**
 * Groups devices into clusters by communication weight.
 *
 * Starts from one cluster per device. The weight between two clusters is
 * the sum of comm frequencies over all microservice pairs crossing them,
 * both directions. While the maximum weight exceeds @p tau the heaviest
 * pair merges (ties broken by lexicographically smallest cluster-id pair)
 * and all weights are recomputed. tau = +inf therefore keeps every device
 * separate and tau = 0 merges every communicating component.
 */
inline ClusterMap cluster_devices(const TopologyGraph& topology, double tau) {
  if (std::isnan(tau) || tau < 0.0) {
    throw Error("tau must be non-negative (got " + format_double(tau) + ")");
  }

  // Working state: cluster id -> member devices. Ids stay canonical after
  // every merge so the tie-break rule is well defined throughout.
  std::map<std::string, std::set<std::string>> members;
  std::map<std::string, std::string> device_cluster;
  for (const auto& [dev, rec] : topology.devices) {
    (void)rec;
    members[dev] = {dev};
    device_cluster[dev] = dev;
  }

  while (members.size() > 1) {
    std::map<std::pair<std::string, std::string>, double> weights;
    for (const auto& [key, freq] : topology.comm_edges) {
      const auto& cs = device_cluster.at(topology.device_of(key.first));
      const auto& ct = device_cluster.at(topology.device_of(key.second));
      if (cs == ct) continue;
      auto pair = cs < ct ? std::make_pair(cs, ct) : std::make_pair(ct, cs);
      weights[pair] += freq;
    }
    std::pair<std::string, std::string> best;
    double best_w = -1.0;
    for (const auto& [pair, w] : weights) {
      if (w > best_w) {  // map order makes the first maximum the smallest pair
        best_w = w;
        best = pair;
      }
    }
    if (best_w <= tau) break;

    std::set<std::string> merged = members.at(best.first);
    merged.insert(members.at(best.second).begin(),
                  members.at(best.second).end());
    members.erase(best.first);
    members.erase(best.second);
    const std::string id = detail::canonical_cluster_id(merged);
    for (const auto& d : merged) device_cluster[d] = id;
    members[id] = std::move(merged);
  }

  ClusterMap cmap;
  for (auto& [id, devs] : members) {
    Cluster c;
    c.id = detail::canonical_cluster_id(devs);
    c.member_devices = devs;
    cmap.clusters[c.id] = std::move(c);
  }
  for (const auto& [dev, cid] : device_cluster) {
    cmap.assignment[dev] = cid;
  }
  for (const auto& [ms, rec] : topology.microservices) {
    cmap.clusters.at(cmap.assignment.at(rec.device_id))
        .member_microservices.insert(ms);
  }
  return cmap;
}

/**
 * Builds one subgraph per cluster. Internal vertices and intra edges carry
 * over unchanged; each outgoing cross-cluster edge is redirected to a
 * shadow node for its external target (one shadow per external endpoint,
 * shared by all redirected edges). Incoming cross-cluster edges are not
 * represented; the owning cluster keeps them as its own shadow edges.
 */
inline std::vector<ClusterSubgraph> build_subgraphs(
    const TopologyGraph& topology, const ClusterMap& cmap) {
  std::map<std::string, ClusterSubgraph> by_cluster;
  for (const auto& [cid, cluster] : cmap.clusters) {
    ClusterSubgraph sg;
    sg.cluster_id = cid;
    sg.vertices = cluster.member_microservices;
    by_cluster[cid] = std::move(sg);
  }
  for (const auto& [key, freq] : topology.comm_edges) {
    const auto& cs = cmap.cluster_of_ms(topology, key.first);
    const auto& ct = cmap.cluster_of_ms(topology, key.second);
    auto& sg = by_cluster.at(cs);
    if (cs == ct) {
      sg.intra_edges[key] = freq;
    } else {
      const std::string sid = shadow_id(key.second);
      sg.shadow_nodes[sid] = key.second;
      sg.vertices.insert(sid);
      sg.shadow_edges[{key.first, sid}] = freq;
    }
  }
  std::vector<ClusterSubgraph> out;
  out.reserve(by_cluster.size());
  for (auto& [cid, sg] : by_cluster) {
    (void)cid;
    out.push_back(std::move(sg));
  }
  return out;
}

/// Original topology edge represented by a shadow edge of @p sg.
inline EdgeKey resolve_shadow_edge(const ClusterSubgraph& sg,
                                   const EdgeKey& shadow_edge) {
  auto it = sg.shadow_nodes.find(shadow_edge.second);
  if (it == sg.shadow_nodes.end()) {
    throw Error("edge " + edge_name(shadow_edge) +
                " does not end at a shadow node of cluster '" +
                sg.cluster_id + "'");
  }
  return {shadow_edge.first, it->second};
}

}  // namespace edgercl

#endif  // EDGERCL_PARTITION_HPP
