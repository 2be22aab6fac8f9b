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
 * Decentralized localization orchestration.
 *
 * When every anomalous element sits inside one cluster, that cluster runs
 * plain local PPR. When anomalous edges cross cluster boundaries, the
 * involved clusters run the peer-to-peer approximation protocol: the
 * detecting side announces itself with a wait message, both sides
 * exchange score messages carrying the average local anomaly score and
 * the boundary edge score, each side splices the peer in as a synthetic
 * cluster vertex, runs PPR independently, and the results are combined
 * either by the majority rule (one cluster claims an internal root while
 * all peers point at that cluster) or by averaging global-perspective
 * vectors. Everything runs on a seeded virtual clock, so transcripts,
 * timings and decisions replay byte-identically.
 */

#ifndef EDGERCL_COORDINATE_HPP
#define EDGERCL_COORDINATE_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "edgercl/core.hpp"
#include "edgercl/detect.hpp"
#include "edgercl/model.hpp"
#include "edgercl/netsim.hpp"
#include "edgercl/partition.hpp"
#include "edgercl/ppr.hpp"
#include "edgercl/score.hpp"

namespace edgercl {

enum class MessageKind { wait, score };

struct ProtocolMessage {
  MessageKind kind = MessageKind::wait;
  std::string from;
  std::string to;
  double avg_approx_anom_score = 0.0;  ///< score messages only
  double shadow_edge_score = 0.0;      ///< sender's boundary edge toward `to`
  std::string attach_ms;               ///< that edge's target inside `to`
  double send_time = 0.0;
  double deliver_time = 0.0;
};

enum class DecisionMode { single_cluster, multi_cluster, aggregated };

inline const char* decision_mode_name(DecisionMode m) {
  switch (m) {
    case DecisionMode::single_cluster: return "single_cluster";
    case DecisionMode::multi_cluster: return "multi_cluster";
    case DecisionMode::aggregated: return "aggregated";
  }
  throw Error("invalid decision mode");
}

/// A cluster's post-PPR view: probabilities of its own microservices plus
/// the probability it assigns each spliced-in peer cluster.
struct ClusterRanking {
  std::string cluster_id;
  std::map<std::string, double> r_local;
  std::map<std::string, double> r_peer;
};

/// Deterministic compute-cost model translating unit counts (correlation
/// samples, edge visits) into simulated milliseconds.
struct CostModel {
  double units_per_ms = 50.0;

  double ms_of(std::uint64_t units) const {
    return static_cast<double>(units) / units_per_ms;
  }
  static std::uint64_t ppr_units(const RankVector& rv, std::size_t vertices) {
    return rv.edge_visits +
           static_cast<std::uint64_t>(rv.iterations) * vertices;
  }
};

struct ClusterStats {
  std::string cluster_id;
  bool ran_ppr = false;
  std::size_t iterations = 0;
  bool converged = true;
  std::uint64_t edge_visits = 0;
  double evidence_mass = 0.0;
  double detect_ms = 0.0;
  double score_ms = 0.0;
  double ppr_ms = 0.0;
  double wait_ms = 0.0;
  double done_ms = 0.0;
};

struct GlobalDecision {
  DecisionMode mode = DecisionMode::single_cluster;
  std::map<std::string, double> combined;  ///< global ms index, zero-filled
  std::string root_cause;
  std::vector<ProtocolMessage> transcript;
  std::vector<ClusterRanking> rankings;
  std::vector<ClusterStats> cluster_stats;
  double localization_ms = 0.0;
};

/// Arithmetic mean of the personalization vector's entries, the compact
/// anomaly summary a cluster shares with its peers.
inline double avg_approx_score(const std::vector<double>& s) {
  if (s.empty()) {
    throw Error("avg_approx_score of an empty vector");
  }
  double sum = 0.0;
  for (double v : s) sum += v;
  return sum / static_cast<double>(s.size());
}

/// The anomalous slice of one cluster's subgraph: internal node and intra
/// edge scores, plus boundary evidence as shadow vertices and edges.
inline GraphView cluster_view(const ClusterSubgraph& sg,
                              const AnomalyScores& scores) {
  GraphView view;
  for (const auto& ms : sg.vertices) {
    if (sg.shadow_nodes.count(ms)) continue;
    auto it = scores.node_scores.find(ms);
    if (it != scores.node_scores.end()) {
      view.node_scores[ms] = it->second;
      view.kinds[ms] = VertexKind::microservice;
    }
  }
  for (const auto& [key, freq] : sg.intra_edges) {
    (void)freq;
    auto it = scores.edge_scores.find(key);
    if (it != scores.edge_scores.end()) view.edge_scores[key] = it->second;
  }
  for (const auto& [key, freq] : sg.shadow_edges) {
    (void)freq;
    auto it = scores.edge_scores.find(resolve_shadow_edge(sg, key));
    if (it != scores.edge_scores.end()) {
      view.edge_scores[key] = it->second;
      view.node_scores.emplace(key.second, 0.0);
      view.kinds[key.second] = VertexKind::shadow;
    }
  }
  return view;
}

/// Total positive anomaly mass of a view; the tie-breaking weight when
/// independent clusters each propose a root cause.
inline double evidence_mass(const GraphView& view) {
  double mass = 0.0;
  for (const auto& [id, v] : view.node_scores) {
    (void)id;
    if (v > 0.0) mass += v;
  }
  for (const auto& [key, v] : view.edge_scores) {
    (void)key;
    if (v > 0.0) mass += v;
  }
  return mass;
}

namespace detail {

inline ClusterRanking to_cluster_ranking(const std::string& cluster_id,
                                         const PprProblem& problem,
                                         const RankVector& rank) {
  ClusterRanking cr;
  cr.cluster_id = cluster_id;
  for (std::size_t i = 0; i < problem.vertices.size(); ++i) {
    const auto& v = problem.vertices[i];
    if (v.kind == VertexKind::cluster) {
      // strip the synthetic prefix back to the peer cluster id
      cr.r_peer[v.id.substr(std::string("cluster:").size())] = rank.r[i];
    } else {
      cr.r_local[v.id] = rank.r[i];
    }
  }
  return cr;
}

/// r_global of one cluster: its own probabilities plus, per peer, the
/// peer's local vector scaled by the probability assigned to that peer.
inline std::map<std::string, double> global_perspective(
    const ClusterRanking& own,
    const std::map<std::string, const ClusterRanking*>& by_id) {
  std::map<std::string, double> g = own.r_local;
  for (const auto& [peer_id, peer_prob] : own.r_peer) {
    auto it = by_id.find(peer_id);
    if (it == by_id.end()) {
      throw Error("ranking of cluster '" + own.cluster_id +
                  "' references peer '" + peer_id + "' with no ranking");
    }
    for (const auto& [ms, p] : it->second->r_local) {
      g[ms] += peer_prob * p;
    }
  }
  return g;
}

inline void fill_combined(GlobalDecision& d,
                          const std::vector<std::string>& global_index,
                          const std::map<std::string, double>& opinions) {
  d.combined.clear();
  for (const auto& ms : global_index) d.combined[ms] = 0.0;
  for (const auto& [ms, p] : opinions) {
    auto it = d.combined.find(ms);
    if (it == d.combined.end()) {
      throw Error("combined vector references '" + ms +
                  "' outside the global microservice index");
    }
    it->second = p;
  }
  d.root_cause.clear();
  double best = -1.0;
  for (const auto& [ms, p] : d.combined) {
    if (p > best) {
      best = p;
      d.root_cause = ms;
    }
  }
}

}  // namespace detail

/**
 * Averages the clusters' global-perspective vectors onto the global
 * microservice index (zero for positions a cluster has no opinion on)
 * and picks the argmax. Peer references must all resolve.
 */
inline GlobalDecision aggregate(const std::vector<ClusterRanking>& rankings,
                                const std::vector<std::string>& global_index) {
  if (rankings.empty()) {
    throw Error("aggregate over zero rankings");
  }
  std::map<std::string, const ClusterRanking*> by_id;
  for (const auto& r : rankings) by_id[r.cluster_id] = &r;

  std::map<std::string, double> sum;
  for (const auto& r : rankings) {
    for (const auto& [ms, p] : detail::global_perspective(r, by_id)) {
      sum[ms] += p;
    }
  }
  const double n = static_cast<double>(rankings.size());
  for (auto& [ms, p] : sum) {
    (void)ms;
    p /= n;
  }

  GlobalDecision d;
  d.mode = DecisionMode::aggregated;
  d.rankings = rankings;
  detail::fill_combined(d, global_index, sum);
  return d;
}

/// Fully local localization for a cluster whose anomaly does not touch
/// any shadow edge: PPR over the internal anomalous subgraph.
inline GlobalDecision localize_single_cluster(
    const ClusterSubgraph& sg, const AnomalyScores& scores, double alpha,
    double epsilon, std::size_t max_iters = 1000, const CostModel& cost = {}) {
  const GraphView view = cluster_view(sg, scores);
  const PprProblem problem =
      build_problem(view, alpha, epsilon, /*include_shadow=*/false);
  const RankVector rank = power_iterate(problem, max_iters);

  GlobalDecision d;
  d.mode = DecisionMode::single_cluster;
  d.rankings.push_back(detail::to_cluster_ranking(sg.cluster_id, problem, rank));

  std::vector<std::string> index;
  for (const auto& ms : sg.vertices) {
    if (sg.shadow_nodes.count(ms) == 0) index.push_back(ms);
  }
  detail::fill_combined(d, index, d.rankings.front().r_local);

  ClusterStats st;
  st.cluster_id = sg.cluster_id;
  st.ran_ppr = true;
  st.iterations = rank.iterations;
  st.converged = rank.converged;
  st.edge_visits = rank.edge_visits;
  st.evidence_mass = evidence_mass(view);
  st.ppr_ms = cost.ms_of(CostModel::ppr_units(rank, problem.vertices.size()));
  st.done_ms = st.ppr_ms;
  d.cluster_stats.push_back(st);
  d.localization_ms = st.done_ms;
  return d;
}

/// One participant of the p2p protocol.
struct P2pClusterInput {
  std::string cluster_id;
  GraphView view;  ///< local world, shadow vertices included
  struct Link {
    std::string src_ms;     ///< internal source of the boundary edge
    std::string target_ms;  ///< external target inside the peer
    double score = 0.0;     ///< that edge's anomaly score
  };
  /// Best anomalous boundary link per peer cluster this one detects toward.
  std::map<std::string, Link> detect_toward;
  std::uint64_t detect_units = 0;
  std::uint64_t score_units = 0;
};

/**
 * Runs the peer-to-peer approximation protocol between the linked
 * clusters on a virtual clock.
 *
 * Per cluster: detection finishes at its detect span; wait messages to
 * detected peers go out immediately after; scoring finishes one score
 * span later, at which point score messages go to every peer detected
 * toward (replies to wait senders leave once both the local scores and
 * the wait message are in). A cluster runs PPR whenever its expectations
 * are settled, and reruns with the peer augmentation if a wait or score
 * message arrives later, so the exchange is correct under any
 * latency/compute ratio. A peer that stays silent for 100x the mean
 * latency past the start of the wait aborts the protocol with a
 * diagnostic; @p drop exists to exercise exactly that in tests.
 */
inline GlobalDecision run_p2p(
    const std::vector<P2pClusterInput>& clusters,
    const std::vector<std::string>& global_index, double alpha, double epsilon,
    std::size_t max_iters, const LatencyModel& latency, std::uint64_t seed,
    const CostModel& cost = {},
    const std::function<bool(const ProtocolMessage&)>& drop = {}) {
  if (clusters.empty()) {
    throw Error("run_p2p with no clusters");
  }
  bool any_link = false;
  for (const auto& c : clusters) any_link |= !c.detect_toward.empty();
  if (!any_link) {
    throw Error("run_p2p without any anomalous shadow edge");
  }

  struct Actor {
    const P2pClusterInput* in = nullptr;
    double avg = 0.0;
    double detect_done = 0.0;
    double score_ready = 0.0;
    std::set<std::string> expected;  ///< peers whose score message is due
    std::map<std::string, ProtocolMessage> received;
    std::set<std::string> replied;  ///< peers already sent our score
    bool scores_done = false;
    // accumulated PPR accounting (a preliminary local run may be redone)
    double ppr_ms = 0.0;
    std::uint64_t edge_visits = 0;
    std::size_t iterations = 0;
    bool converged = true;
    bool ran_ppr = false;
    double final_start = 0.0;
    double done = 0.0;
    ClusterRanking ranking;
    std::vector<RankedVertex> ordered;
  };

  std::map<std::string, Actor> actors;
  for (const auto& c : clusters) {
    Actor a;
    a.in = &c;
    // the summary runs over the cluster's own personalization vector; a
    // cluster with no local evidence summarizes itself as 0.
    try {
      const PprProblem local =
          build_problem(c.view, alpha, epsilon, /*include_shadow=*/true);
      a.avg = avg_approx_score(local.s);
    } catch (const Error&) {
      a.avg = 0.0;
    }
    actors[c.cluster_id] = std::move(a);
  }
  for (const auto& c : clusters) {
    for (const auto& [peer, link] : c.detect_toward) {
      (void)link;
      if (actors.count(peer) == 0) {
        throw Error("cluster '" + c.cluster_id +
                    "' detects toward absent peer '" + peer + "'");
      }
      // the detector expects the peer's summary in return
      actors.at(c.cluster_id).expected.insert(peer);
    }
  }

  EventQueue queue;
  VirtualNet net(latency, seed);
  GlobalDecision decision;
  const double timeout = 100.0 * latency.mean_ms;

  // The PPR pass a cluster runs once its picture is settled; rerun (with
  // the augmentation) when a later message changes the picture.
  auto run_ppr = [&](const std::string& id) {
    Actor& a = actors.at(id);
    std::vector<PeerClusterNode> peers;
    std::set<std::string> peer_ids;
    for (const auto& [peer, link] : a.in->detect_toward) {
      (void)link;
      peer_ids.insert(peer);
    }
    for (const auto& [peer, msg] : a.received) {
      (void)msg;
      peer_ids.insert(peer);
    }
    for (const auto& peer : peer_ids) {
      PeerClusterNode node;
      node.cluster_id = peer;
      auto rec = a.received.find(peer);
      if (rec != a.received.end()) {
        node.avg_score = rec->second.avg_approx_anom_score;
        if (rec->second.shadow_edge_score > 0.0) {
          node.links.push_back({rec->second.attach_ms,
                                /*peer_to_internal=*/true,
                                rec->second.shadow_edge_score});
        }
      }
      auto det = a.in->detect_toward.find(peer);
      if (det != a.in->detect_toward.end()) {
        node.links.push_back(
            {det->second.src_ms, /*peer_to_internal=*/false,
             det->second.score});
      }
      peers.push_back(std::move(node));
    }
    PprProblem problem;
    try {
      problem = build_problem(a.in->view, alpha, epsilon,
                              /*include_shadow=*/false, peers);
    } catch (const Error&) {
      if (peers.empty()) {
        // a receiver with no local evidence before any peer message
        // arrived; the rerun after augmentation will have a problem
        return;
      }
      throw Error("cluster '" + id + "' has no localizable evidence even "
                  "after peer augmentation");
    }
    const RankVector rank = power_iterate(problem, max_iters);
    a.ppr_ms += cost.ms_of(CostModel::ppr_units(rank, problem.vertices.size()));
    a.edge_visits += rank.edge_visits;
    a.iterations = rank.iterations;
    a.converged = rank.converged;
    a.ran_ppr = true;
    a.final_start = queue.now();
    a.done = queue.now() + cost.ms_of(CostModel::ppr_units(
                               rank, problem.vertices.size()));
    a.ranking = detail::to_cluster_ranking(id, problem, rank);
    a.ordered = rank_nodes(problem, rank);
  };

  auto maybe_start = [&](const std::string& id) {
    Actor& a = actors.at(id);
    if (!a.scores_done) return;
    for (const auto& peer : a.expected) {
      if (a.received.count(peer) == 0) return;
    }
    run_ppr(id);
  };

  std::function<void(ProtocolMessage)> send = [&](ProtocolMessage msg) {
    msg.send_time = queue.now();
    msg.deliver_time = net.deliver_at(msg.from, msg.to, msg.send_time);
    decision.transcript.push_back(msg);
    if (drop && drop(msg)) return;
    queue.at(msg.deliver_time, [&, msg]() {
      Actor& a = actors.at(msg.to);
      if (msg.kind == MessageKind::wait) {
        a.expected.insert(msg.from);
        const double deadline =
            std::max(queue.now(), a.score_ready) + timeout;
        queue.at(deadline, [&, from = msg.from, to = msg.to, deadline]() {
          if (actors.at(to).received.count(from) == 0) {
            throw Error("cluster '" + to +
                        "' timed out waiting for the score message from '" +
                        from + "' (deadline " + format_double(deadline) +
                        " ms)");
          }
        });
        if (a.scores_done && a.replied.count(msg.from) == 0) {
          a.replied.insert(msg.from);
          ProtocolMessage reply;
          reply.kind = MessageKind::score;
          reply.from = msg.to;
          reply.to = msg.from;
          reply.avg_approx_anom_score = a.avg;
          auto det = a.in->detect_toward.find(msg.from);
          if (det != a.in->detect_toward.end()) {
            reply.shadow_edge_score = det->second.score;
            reply.attach_ms = det->second.target_ms;
          }
          send(reply);
        }
        maybe_start(msg.to);
      } else {
        a.received[msg.from] = msg;
        maybe_start(msg.to);
      }
    });
  };

  for (const auto& c : clusters) {
    Actor& a = actors.at(c.cluster_id);
    a.detect_done = cost.ms_of(c.detect_units);
    a.score_ready = a.detect_done + cost.ms_of(c.score_units);

    queue.at(a.detect_done, [&, id = c.cluster_id]() {
      const Actor& me = actors.at(id);
      for (const auto& [peer, link] : me.in->detect_toward) {
        (void)link;
        ProtocolMessage msg;
        msg.kind = MessageKind::wait;
        msg.from = id;
        msg.to = peer;
        send(msg);
      }
    });

    queue.at(a.score_ready, [&, id = c.cluster_id]() {
      Actor& me = actors.at(id);
      me.scores_done = true;
      // score messages to detected peers; replies to wait senders whose
      // wait already arrived
      std::set<std::string> targets;
      for (const auto& [peer, link] : me.in->detect_toward) {
        (void)link;
        targets.insert(peer);
      }
      for (const auto& peer : me.expected) {
        if (me.in->detect_toward.count(peer) == 0) targets.insert(peer);
      }
      // the detector's own expectations time out too
      for (const auto& [peer, link] : me.in->detect_toward) {
        (void)link;
        const double deadline = queue.now() + timeout;
        queue.at(deadline, [&, from = peer, to = id, deadline]() {
          if (actors.at(to).received.count(from) == 0) {
            throw Error("cluster '" + to +
                        "' timed out waiting for the score message from '" +
                        from + "' (deadline " + format_double(deadline) +
                        " ms)");
          }
        });
      }
      for (const auto& peer : targets) {
        if (!me.replied.insert(peer).second) continue;
        ProtocolMessage msg;
        msg.kind = MessageKind::score;
        msg.from = id;
        msg.to = peer;
        msg.avg_approx_anom_score = me.avg;
        auto det = me.in->detect_toward.find(peer);
        if (det != me.in->detect_toward.end()) {
          msg.shadow_edge_score = det->second.score;
          msg.attach_ms = det->second.target_ms;
        }
        send(msg);
      }
      maybe_start(id);
    });
  }

  queue.run();

  // Decision. Majority rule: exactly one cluster claims an internal root
  // while every other participant's top candidate is that cluster.
  std::vector<ClusterRanking> rankings;
  std::string internal_top_cluster;
  std::size_t internal_tops = 0;
  for (const auto& [id, a] : actors) {
    if (!a.ran_ppr || a.ordered.empty()) {
      throw Error("cluster '" + id + "' finished the protocol without a result");
    }
    rankings.push_back(a.ranking);
    if (a.ordered.front().kind == VertexKind::microservice) {
      ++internal_tops;
      internal_top_cluster = id;
    }
  }
  bool majority = internal_tops == 1;
  if (majority) {
    for (const auto& [id, a] : actors) {
      if (id == internal_top_cluster) continue;
      const auto& top = a.ordered.front();
      if (top.kind != VertexKind::cluster ||
          top.id != cluster_vertex_id(internal_top_cluster)) {
        majority = false;
        break;
      }
    }
  }

  if (majority) {
    decision.mode = DecisionMode::multi_cluster;
    decision.rankings = rankings;
    std::map<std::string, const ClusterRanking*> by_id;
    for (const auto& r : rankings) by_id[r.cluster_id] = &r;
    const ClusterRanking* winner = by_id.at(internal_top_cluster);
    detail::fill_combined(decision, global_index,
                          detail::global_perspective(*winner, by_id));
  } else {
    GlobalDecision agg = aggregate(rankings, global_index);
    decision.mode = agg.mode;
    decision.rankings = std::move(agg.rankings);
    decision.combined = std::move(agg.combined);
    decision.root_cause = std::move(agg.root_cause);
  }

  for (const auto& [id, a] : actors) {
    ClusterStats st;
    st.cluster_id = id;
    st.ran_ppr = a.ran_ppr;
    st.iterations = a.iterations;
    st.converged = a.converged;
    st.edge_visits = a.edge_visits;
    st.evidence_mass = evidence_mass(a.in->view);
    st.detect_ms = a.detect_done;
    st.score_ms = a.score_ready - a.detect_done;
    st.ppr_ms = a.ppr_ms;
    st.wait_ms = std::max(a.final_start - a.score_ready, 0.0);
    st.done_ms = a.done;
    decision.cluster_stats.push_back(st);
    decision.localization_ms = std::max(decision.localization_ms, a.done);
  }
  return decision;
}

struct DecentralizedParams {
  double alpha = 0.85;
  double epsilon = 1e-6;
  std::size_t max_iters = 1000;
  LatencyModel latency;
  std::uint64_t seed = 1;
  CostModel cost;
};

/**
 * Full decentralized pipeline step after detection and scoring.
 *
 * Anomalous shadow edges define the linked clusters, which run the p2p
 * protocol. Clusters with purely internal evidence localize locally and
 * stand as independent candidates; every cluster at least pays its
 * detection span. The final root cause comes from the candidate backed
 * by the most anomaly evidence: the linked component's total mass versus
 * each isolated cluster's mass. Localization time is the maximum cluster
 * completion time, never a sum, since clusters work concurrently.
 */
inline GlobalDecision localize_decentralized(
    const TopologyGraph& topology, const ClusterMap& cmap,
    const std::vector<ClusterSubgraph>& subgraphs,
    const DetectionResult& detection, const AnomalyScores& scores,
    const ScoreCost& score_cost,
    const std::map<std::string, std::uint64_t>& detect_units,
    const DecentralizedParams& params) {
  std::vector<std::string> global_index;
  for (const auto& [ms, rec] : topology.microservices) {
    (void)rec;
    global_index.push_back(ms);
  }

  std::map<std::string, std::uint64_t> score_units;
  for (const auto& [ms, units] : score_cost.node_units) {
    score_units[cmap.cluster_of_ms(topology, ms)] += units;
  }
  for (const auto& [key, units] : score_cost.edge_units) {
    // cross-cluster edges are scored by the detecting (source) side
    score_units[cmap.cluster_of_ms(topology, key.first)] += units;
  }

  std::map<std::string, P2pClusterInput> inputs;
  std::set<std::string> linked;
  for (const auto& sg : subgraphs) {
    P2pClusterInput in;
    in.cluster_id = sg.cluster_id;
    in.view = cluster_view(sg, scores);
    auto du = detect_units.find(sg.cluster_id);
    in.detect_units = du == detect_units.end() ? 0 : du->second;
    auto su = score_units.find(sg.cluster_id);
    in.score_units = su == score_units.end() ? 0 : su->second;
    for (const auto& shadow_edge : mark_shadow_edge_anomalies(detection, sg)) {
      const EdgeKey orig = resolve_shadow_edge(sg, shadow_edge);
      const std::string& peer = cmap.cluster_of_ms(topology, orig.second);
      const double edge_score = scores.edge_scores.at(orig);
      auto [it, fresh] = in.detect_toward.try_emplace(
          peer, P2pClusterInput::Link{orig.first, orig.second, edge_score});
      if (!fresh && edge_score > it->second.score) {
        it->second = {orig.first, orig.second, edge_score};
      }
      linked.insert(sg.cluster_id);
      linked.insert(peer);
    }
    inputs[sg.cluster_id] = std::move(in);
  }

  GlobalDecision result;
  double best_mass = -1.0;
  bool have_candidate = false;

  auto consider = [&](GlobalDecision&& candidate, double mass) {
    if (!have_candidate || mass > best_mass) {
      const auto stats = std::move(result.cluster_stats);
      auto transcript = std::move(result.transcript);
      result = std::move(candidate);
      for (const auto& st : stats) result.cluster_stats.push_back(st);
      for (auto& m : transcript) result.transcript.push_back(std::move(m));
      best_mass = mass;
      have_candidate = true;
    } else {
      for (const auto& st : candidate.cluster_stats) {
        result.cluster_stats.push_back(st);
      }
      for (auto& m : candidate.transcript) {
        result.transcript.push_back(std::move(m));
      }
    }
  };

  if (!linked.empty()) {
    std::vector<P2pClusterInput> participants;
    double mass = 0.0;
    for (const auto& cid : linked) {
      participants.push_back(inputs.at(cid));
      mass += evidence_mass(inputs.at(cid).view);
    }
    consider(run_p2p(participants, global_index, params.alpha, params.epsilon,
                     params.max_iters, params.latency, params.seed,
                     params.cost),
             mass);
  }

  for (const auto& sg : subgraphs) {
    if (linked.count(sg.cluster_id)) continue;
    const P2pClusterInput& in = inputs.at(sg.cluster_id);
    const double mass = evidence_mass(in.view);
    const double detect_ms = params.cost.ms_of(in.detect_units);
    const double score_ms = params.cost.ms_of(in.score_units);
    if (mass > 0.0) {
      GlobalDecision local =
          localize_single_cluster(sg, scores, params.alpha, params.epsilon,
                                  params.max_iters, params.cost);
      detail::fill_combined(local, global_index,
                            local.rankings.front().r_local);
      ClusterStats& st = local.cluster_stats.front();
      st.evidence_mass = mass;
      st.detect_ms = detect_ms;
      st.score_ms = score_ms;
      st.done_ms = detect_ms + score_ms + st.ppr_ms;
      local.localization_ms = st.done_ms;
      consider(std::move(local), mass);
    } else {
      // no evidence here; the cluster still spends its detection span
      ClusterStats st;
      st.cluster_id = sg.cluster_id;
      st.detect_ms = detect_ms;
      st.done_ms = detect_ms;
      result.cluster_stats.push_back(st);
    }
  }

  if (!have_candidate) {
    throw Error("no localizable evidence: all anomaly scores are zero");
  }
  if (!result.transcript.empty() &&
      result.mode == DecisionMode::single_cluster) {
    // an isolated cluster outweighed a linked component; messages were
    // exchanged, so the run cannot be labeled single_cluster
    result.mode = DecisionMode::aggregated;
  }

  result.localization_ms = 0.0;
  for (const auto& st : result.cluster_stats) {
    result.localization_ms = std::max(result.localization_ms, st.done_ms);
  }
  std::sort(result.cluster_stats.begin(), result.cluster_stats.end(),
            [](const ClusterStats& a, const ClusterStats& b) {
              return a.cluster_id < b.cluster_id;
            });
  return result;
}

}  // namespace edgercl

#endif  // EDGERCL_COORDINATE_HPP
