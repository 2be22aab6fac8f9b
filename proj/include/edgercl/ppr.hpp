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
 * Personalized PageRank over anomaly-scored propagation graphs.
 *
 * The personalization vector S normalizes node anomaly scores; the
 * transition matrix P normalizes edge anomaly scores per row. Elements
 * with zero score are excluded from the propagation graph entirely.
 * Iteration uses the mass-preserving transpose action (probability flows
 * along edges): r <- alpha * (P^T r + dangling correction) + (1-alpha) S,
 * with dangling rows redistributing uniformly over all vertices, until the
 * L1 step difference drops below epsilon. A dense linear solve of the same
 * fixed point serves as the test oracle.
 *
 * Vertices are indexed in sorted id order. This canonical ordering makes
 * runs over equal graph views bit-identical regardless of how the view
 * was assembled, which the single-cluster equivalence property relies on.
 */

#ifndef EDGERCL_PPR_HPP
#define EDGERCL_PPR_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "edgercl/core.hpp"
#include "edgercl/score.hpp"

namespace edgercl {

enum class VertexKind { microservice, shadow, cluster };

inline const char* vertex_kind_name(VertexKind k) {
  switch (k) {
    case VertexKind::microservice: return "microservice";
    case VertexKind::shadow: return "shadow";
    case VertexKind::cluster: return "cluster";
  }
  throw Error("invalid vertex kind");
}

/// Synthetic vertex id for a peer cluster inside an augmented problem.
inline std::string cluster_vertex_id(const std::string& cluster_id) {
  return "cluster:" + cluster_id;
}

/**
 * The anomalous slice of a graph: every node and edge that detection
 * flagged, with its anomaly score. Vertices missing from `kinds` default
 * to microservice.
 */
struct GraphView {
  std::map<std::string, double> node_scores;
  std::map<EdgeKey, double> edge_scores;
  std::map<std::string, VertexKind> kinds;

  friend bool operator==(const GraphView&, const GraphView&) = default;

  VertexKind kind_of(const std::string& id) const {
    auto it = kinds.find(id);
    return it == kinds.end() ? VertexKind::microservice : it->second;
  }
};

/// One peer cluster to splice into a local problem: the peer's exchanged
/// average anomaly score plus the link edges attaching it.
struct PeerClusterNode {
  std::string cluster_id;
  double avg_score = 0.0;
  struct Link {
    std::string internal_ms;
    bool peer_to_internal = false;  ///< direction of the link edge
    double edge_score = 0.0;
  };
  std::vector<Link> links;
};

struct PprVertex {
  std::string id;
  VertexKind kind = VertexKind::microservice;

  friend bool operator==(const PprVertex&, const PprVertex&) = default;
};

struct PprProblem {
  std::vector<PprVertex> vertices;  ///< sorted by id (canonical order)
  std::vector<double> s;            ///< personalization, sums to 1
  /// Sparse out-transitions per vertex; empty row = dangling vertex whose
  /// mass redistributes uniformly over all vertices.
  std::vector<std::vector<std::pair<std::uint32_t, double>>> rows;
  double alpha = 0.85;
  double epsilon = 1e-6;
  std::size_t edge_count = 0;

  std::size_t index_of(const std::string& id) const {
    auto it = std::lower_bound(
        vertices.begin(), vertices.end(), id,
        [](const PprVertex& v, const std::string& key) { return v.id < key; });
    if (it == vertices.end() || it->id != id) {
      throw Error("vertex '" + id + "' not in problem");
    }
    return static_cast<std::size_t>(it - vertices.begin());
  }
};

struct RankVector {
  std::vector<double> r;
  std::size_t iterations = 0;
  bool converged = false;
  std::uint64_t edge_visits = 0;
};

struct RankedVertex {
  std::string id;
  VertexKind kind = VertexKind::microservice;
  double probability = 0.0;
};

/**
 * Assembles S and P from a graph view.
 *
 * Zero-score nodes and edges are excluded; a vertex enters the problem
 * when its own score is positive or it touches a positively scored edge.
 * With include_shadow=false, shadow vertices and their edges are dropped
 * first (the fully local case). @p peers appends one cluster vertex each,
 * scored by the exchanged average, wired up by its link edges.
 *
 * S divides each vertex score by the total; when every vertex score is
 * zero (evidence lives only on edges) S falls back to uniform over the
 * vertices incident to anomalous edges. A view with no positive evidence
 * at all cannot seed a walk and raises "no localizable evidence".
 */
inline PprProblem build_problem(const GraphView& view, double alpha,
                                double epsilon, bool include_shadow,
                                const std::vector<PeerClusterNode>& peers = {}) {
  if (!std::isfinite(alpha) || alpha <= 0.0 || alpha >= 1.0) {
    throw Error("alpha must lie in (0,1), got " + format_double(alpha));
  }
  if (!std::isfinite(epsilon) || epsilon <= 0.0) {
    throw Error("epsilon must be positive, got " + format_double(epsilon));
  }

  std::map<std::string, double> nodes;
  std::map<std::string, VertexKind> kinds;
  std::map<EdgeKey, double> edges;
  for (const auto& [id, score] : view.node_scores) {
    if (!std::isfinite(score) || score < 0.0) {
      throw Error("negative or non-finite score on vertex '" + id + "'");
    }
    const VertexKind k = view.kind_of(id);
    if (!include_shadow && k == VertexKind::shadow) continue;
    nodes[id] = score;
    kinds[id] = k;
  }
  for (const auto& [key, score] : view.edge_scores) {
    if (!std::isfinite(score) || score < 0.0) {
      throw Error("negative or non-finite score on edge " + edge_name(key));
    }
    if (!include_shadow && (view.kind_of(key.first) == VertexKind::shadow ||
                            view.kind_of(key.second) == VertexKind::shadow)) {
      continue;
    }
    edges[key] = score;
    kinds.emplace(key.first, view.kind_of(key.first));
    kinds.emplace(key.second, view.kind_of(key.second));
    nodes.emplace(key.first, 0.0);
    nodes.emplace(key.second, 0.0);
  }
  for (const auto& peer : peers) {
    const std::string pid = cluster_vertex_id(peer.cluster_id);
    if (!std::isfinite(peer.avg_score) || peer.avg_score < 0.0) {
      throw Error("negative or non-finite peer score for '" + peer.cluster_id +
                  "'");
    }
    nodes[pid] = peer.avg_score;
    kinds[pid] = VertexKind::cluster;
    for (const auto& link : peer.links) {
      const EdgeKey key = link.peer_to_internal
                              ? EdgeKey{pid, link.internal_ms}
                              : EdgeKey{link.internal_ms, pid};
      edges[key] = link.edge_score;
      kinds.emplace(link.internal_ms, VertexKind::microservice);
      nodes.emplace(link.internal_ms, 0.0);
    }
  }

  // The propagation graph keeps positive edges and every vertex carrying
  // or touching evidence.
  std::map<EdgeKey, double> live_edges;
  std::map<std::string, bool> incident;
  for (const auto& [key, score] : edges) {
    if (score > 0.0) {
      live_edges[key] = score;
      incident[key.first] = true;
      incident[key.second] = true;
    }
  }
  PprProblem p;
  p.alpha = alpha;
  p.epsilon = epsilon;
  for (const auto& [id, score] : nodes) {
    if (score > 0.0 || incident.count(id)) {
      p.vertices.push_back(PprVertex{id, kinds.at(id)});
    }
  }
  if (p.vertices.empty()) {
    throw Error("no localizable evidence: all anomaly scores are zero");
  }

  const std::size_t n = p.vertices.size();
  p.s.assign(n, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    p.s[i] = nodes.at(p.vertices[i].id);
    total += p.s[i];
  }
  if (total > 0.0) {
    for (double& v : p.s) v /= total;
  } else {
    // Edge-only evidence: uniform over the incident vertices, which at
    // this point is every vertex of the problem.
    for (double& v : p.s) v = 1.0 / static_cast<double>(n);
  }

  p.rows.assign(n, {});
  std::vector<double> row_sum(n, 0.0);
  for (const auto& [key, score] : live_edges) {
    row_sum[p.index_of(key.first)] += score;
  }
  for (const auto& [key, score] : live_edges) {
    const std::size_t i = p.index_of(key.first);
    p.rows[i].emplace_back(static_cast<std::uint32_t>(p.index_of(key.second)),
                           score / row_sum[i]);
  }
  p.edge_count = live_edges.size();
  return p;
}

/**
 * Power iteration to the L1 tolerance. Starts from r = S; each sweep
 * costs exactly edge_count edge visits (dangling mass is folded in as a
 * scalar correction, not walked). Exhausting max_iters is reported via
 * converged=false, not an error.
 */
inline RankVector power_iterate(const PprProblem& p, std::size_t max_iters) {
  const std::size_t n = p.vertices.size();
  RankVector out;
  out.r = p.s;
  std::vector<double> next(n);
  for (std::size_t k = 1; k <= max_iters; ++k) {
    double dangling = 0.0;
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      if (p.rows[i].empty()) {
        dangling += out.r[i];
        continue;
      }
      for (const auto& [j, prob] : p.rows[i]) {
        next[j] += out.r[i] * prob;
      }
    }
    out.edge_visits += p.edge_count;
    const double spread = dangling / static_cast<double>(n);
    double diff = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double v =
          p.alpha * (next[i] + spread) + (1.0 - p.alpha) * p.s[i];
      diff += std::abs(v - out.r[i]);
      next[i] = v;
    }
    out.r.swap(next);
    out.iterations = k;
    if (diff < p.epsilon) {
      out.converged = true;
      break;
    }
  }
  return out;
}

/**
 * Dense oracle for the same fixed point: solves (I - alpha*M) r =
 * (1-alpha) S by Gaussian elimination with partial pivoting, where M is
 * the propagation operator of power_iterate (transpose action plus
 * uniform dangling redistribution), then normalizes r to sum 1. Intended
 * for test-sized problems.
 */
inline RankVector linear_solve_oracle(const PprProblem& p) {
  const std::size_t n = p.vertices.size();
  std::vector<std::vector<double>> a(n, std::vector<double>(n + 1, 0.0));
  for (std::size_t i = 0; i < n; ++i) a[i][i] = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (p.rows[i].empty()) {
      for (std::size_t j = 0; j < n; ++j) {
        a[j][i] -= p.alpha / static_cast<double>(n);
      }
    } else {
      for (const auto& [j, prob] : p.rows[i]) {
        a[j][i] -= p.alpha * prob;
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    a[i][n] = (1.0 - p.alpha) * p.s[i];
  }

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    }
    if (std::abs(a[pivot][col]) < 1e-14) {
      throw Error("singular PPR system (cannot happen for alpha < 1)");
    }
    std::swap(a[col], a[pivot]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = a[r][col] / a[col][col];
      if (f == 0.0) continue;
      for (std::size_t c = col; c <= n; ++c) {
        a[r][c] -= f * a[col][c];
      }
    }
  }

  RankVector out;
  out.converged = true;
  out.r.resize(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    out.r[i] = a[i][n] / a[i][i];
    total += out.r[i];
  }
  for (double& v : out.r) v /= total;
  return out;
}

/// Candidates in descending probability, ids ascending on exact ties.
/// Kind tags survive so callers can spot an external root cause.
inline std::vector<RankedVertex> rank_nodes(const PprProblem& p,
                                            const RankVector& rank) {
  if (rank.r.size() != p.vertices.size()) {
    throw Error("rank vector does not match the problem's vertex count");
  }
  std::vector<RankedVertex> out;
  out.reserve(p.vertices.size());
  for (std::size_t i = 0; i < p.vertices.size(); ++i) {
    out.push_back(
        RankedVertex{p.vertices[i].id, p.vertices[i].kind, rank.r[i]});
  }
  std::sort(out.begin(), out.end(),
            [](const RankedVertex& a, const RankedVertex& b) {
              if (a.probability != b.probability) {
                return a.probability > b.probability;
              }
              return a.id < b.id;
            });
  return out;
}

}  // namespace edgercl

#endif  // EDGERCL_PPR_HPP
