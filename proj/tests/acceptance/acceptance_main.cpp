// Copyright 2026 The edgercl authors
// SPDX-License-Identifier: Apache-2.0
//
// Acceptance gate: one self-contained check per shipping criterion,
// printed as a single PASS/FAIL line each. The process exits nonzero if
// any criterion fails, so CI can gate on this binary alone.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <iostream>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "edgercl/harness.hpp"
#include "edgercl/report.hpp"
#include "test_util.hpp"

namespace edgercl {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v, int digits = 4) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(digits) << v;
  return out.str();
}

struct Gate {
  int failed = 0;

  void line(int num, const std::string& name, bool ok,
            const std::string& detail) {
    std::cout << (ok ? "PASS" : "FAIL") << "  criterion " << std::setw(2)
              << num << "  " << name << ": " << detail << "\n"
              << std::flush;
    if (!ok) ++failed;
  }
};

GenSpec base_spec(std::uint64_t seed) {
  GenSpec spec;
  spec.seed = seed;
  spec.devices = 4;
  spec.groups = 2;
  spec.series_length = 60;
  spec.window_length = 12;
  return spec;
}

// ---------------------------------------------------------------- 1 ----

void criterion_ppr_oracle(Gate& gate) {
  const auto t0 = Clock::now();
  testing::Rng rng(101);
  const double alphas[] = {0.5, 0.85, 0.95};
  const double tolerance = 10.0 * 1e-6;
  int good = 0;
  double worst = 0.0;
  for (int i = 0; i < 500; ++i) {
    const GraphView view = testing::random_view(rng, 5, 50);
    const PprProblem p = build_problem(view, alphas[i % 3], 1e-6, true);
    const RankVector approx = power_iterate(p, 1000);
    const RankVector exact = linear_solve_oracle(p);
    double l1 = 0.0;
    for (std::size_t j = 0; j < exact.r.size(); ++j) {
      l1 += std::abs(approx.r[j] - exact.r[j]);
    }
    worst = std::max(worst, l1);
    if (l1 <= tolerance) ++good;
  }
  const double secs = seconds_since(t0);
  gate.line(1, "PPR power iteration vs dense linear solve",
            good == 500 && secs < 30.0,
            std::to_string(good) + "/500 problems within 1e-05, worst L1 " +
                fmt(worst, 9) + ", " + fmt(secs, 1) + " s (limit 30)");
}

// ---------------------------------------------------------------- 2 ----

void criterion_single_cluster_equivalence(Gate& gate) {
  const auto t0 = Clock::now();
  const PipelineParams params;
  int good = 0;
  std::string first_miss;
  for (int i = 0; i < 200; ++i) {
    const Generated gen = generate(base_spec(1000 + i));
    const ScenarioRun run = prepare_run(gen.bundle, params);
    const ModeOutcome c = run_centralized(gen.bundle, run, params);
    const ModeOutcome d = run_decentralized(gen.bundle, run, params);
    bool match = c.localized && d.localized &&
                 d.mode == DecisionMode::single_cluster &&
                 !c.ranking.empty() && c.ranking.size() == d.ranking.size() &&
                 c.ranking.front().id == d.ranking.front().id;
    if (match) {
      for (std::size_t j = 0; j < c.ranking.size(); ++j) {
        match &= c.ranking[j].id == d.ranking[j].id &&
                 std::abs(c.ranking[j].probability -
                          d.ranking[j].probability) <= 1e-9;
      }
    }
    if (match) {
      ++good;
    } else if (first_miss.empty()) {
      first_miss = " (first miss at seed " + std::to_string(1000 + i) + ")";
    }
  }
  const double secs = seconds_since(t0);
  gate.line(2, "single-cluster decentralized equals centralized",
            good == 200 && secs < 60.0,
            std::to_string(good) +
                "/200 rankings entrywise within 1e-09, top-1 identical" +
                first_miss + ", " + fmt(secs, 1) + " s (limit 60)");
}

// ---------------------------------------------------------------- 3 ----

void criterion_clean_localization(Gate& gate) {
  const auto t0 = Clock::now();
  const PipelineParams params;
  int good = 0;
  for (int i = 0; i < 100; ++i) {
    GenSpec spec = base_spec(3000 + i);
    spec.cross_cluster = (i % 2 == 1);
    const Generated gen = generate(spec);
    const ScenarioRun run = prepare_run(gen.bundle, params);
    const ModeOutcome c = run_centralized(gen.bundle, run, params);
    const ModeOutcome d = run_decentralized(gen.bundle, run, params);
    if (c.localized && d.localized && c.rank_of_truth == 1 &&
        d.rank_of_truth == 1) {
      ++good;
    }
  }
  const double secs = seconds_since(t0);
  gate.line(3, "clean injections localize at rank 1",
            good == 100 && secs < 60.0,
            std::to_string(good) + "/100 scenarios, both modes, " +
                fmt(secs, 1) + " s (limit 60)");
}

// ---------------------------------------------------------------- 4 ----

void criterion_noisy_accuracy(Gate& gate) {
  const PipelineParams params;
  std::vector<std::size_t> ranks_c, ranks_d;
  for (int i = 0; i < 200; ++i) {
    GenSpec spec = base_spec(4000 + i);
    spec.cross_cluster = (i % 2 == 1);
    spec.noise_level = 0.25;
    spec.background_events = 1;
    const Generated gen = generate(spec);
    const ScenarioRun run = prepare_run(gen.bundle, params);
    const ModeOutcome c = run_centralized(gen.bundle, run, params);
    const ModeOutcome d = run_decentralized(gen.bundle, run, params);
    ranks_c.push_back(c.localized ? c.rank_of_truth : 1000000);
    ranks_d.push_back(d.localized ? d.rank_of_truth : 1000000);
  }
  const double acc3_c = compute_rank_metrics(ranks_c).acc.at(3);
  const double acc3_d = compute_rank_metrics(ranks_d).acc.at(3);
  gate.line(4, "noise does not degrade decentralized accuracy",
            acc3_d >= acc3_c - 0.05 - 1e-12,
            "Acc@3 centralized " + fmt(acc3_c) + ", decentralized " +
                fmt(acc3_d) + " (allowed gap 0.05)");
}

// ---------------------------------------------------------------- 5 ----

void criterion_efficiency(Gate& gate) {
  const PipelineParams params;
  int cheaper = 0;
  std::vector<double> tc, td;
  for (int i = 0; i < 200; ++i) {
    GenSpec spec = base_spec(5000 + i);
    spec.noise_level = 0.1;
    spec.background_events = 1;  // off-cluster evidence, confined root path
    const Generated gen = generate(spec);
    const ScenarioRun run = prepare_run(gen.bundle, params);
    if (run.cmap.clusters.size() < 2) continue;
    const ModeOutcome c = run_centralized(gen.bundle, run, params);
    const ModeOutcome d = run_decentralized(gen.bundle, run, params);
    if (!c.localized || !d.localized) continue;
    tc.push_back(c.total_ms);
    td.push_back(d.total_ms);
    if (d.compute_ms < c.compute_ms && d.edge_visits_max < c.edge_visits) {
      ++cheaper;
    }
  }
  const bool enough = tc.size() == 200;
  const TimeReduction tr =
      tc.empty() ? TimeReduction{} : compute_time_reduction(tc, td);
  gate.line(5, "decentralized is strictly cheaper per cluster",
            enough && cheaper >= 190,
            std::to_string(cheaper) + "/" + std::to_string(tc.size()) +
                " scenarios strictly cheaper; Average Time Reduction " +
                fmt(tr.avg_pct, 2) + "%, Total Time Reduction " +
                fmt(tr.total_pct, 2) + "%");
}

// ---------------------------------------------------------------- 6 ----

void criterion_protocol_conservation(Gate& gate) {
  const PipelineParams params;
  int good = 0;
  const int cases = 50;
  for (int i = 0; i < cases; ++i) {
    GenSpec spec = base_spec(6000 + i);
    spec.cross_cluster = true;
    const Generated gen = generate(spec);
    const ScenarioRun run = prepare_run(gen.bundle, params);

    // detector->peer pairs implied by anomalous boundary edges
    std::set<std::pair<std::string, std::string>> detects;
    for (const auto& sg : run.subgraphs) {
      for (const auto& [edge, freq] : sg.shadow_edges) {
        (void)freq;
        const EdgeKey orig = resolve_shadow_edge(sg, edge);
        if (run.detection.anomalous_edges.count(orig) == 0) continue;
        detects.insert({sg.cluster_id,
                        run.cmap.cluster_of_ms(gen.bundle.topology,
                                               orig.second)});
      }
    }
    std::set<std::pair<std::string, std::string>> closure;
    for (const auto& [a, b] : detects) {
      closure.insert({a, b});
      closure.insert({b, a});
    }

    const ModeOutcome c1 = run_centralized(gen.bundle, run, params);
    const ModeOutcome d1 = run_decentralized(gen.bundle, run, params);
    const ModeOutcome c2 = run_centralized(gen.bundle, run, params);
    const ModeOutcome d2 = run_decentralized(gen.bundle, run, params);

    std::size_t waits = 0, scores = 0;
    for (const auto& m : d1.decision.transcript) {
      (m.kind == MessageKind::wait ? waits : scores) += 1;
    }
    const bool conserved =
        !detects.empty() && waits == detects.size() &&
        scores == closure.size();

    const auto same_message = [](const ProtocolMessage& x,
                                 const ProtocolMessage& y) {
      return x.kind == y.kind && x.from == y.from && x.to == y.to &&
             x.avg_approx_anom_score == y.avg_approx_anom_score &&
             x.shadow_edge_score == y.shadow_edge_score &&
             x.attach_ms == y.attach_ms && x.send_time == y.send_time &&
             x.deliver_time == y.deliver_time;
    };
    bool deterministic =
        d1.decision.transcript.size() == d2.decision.transcript.size();
    for (std::size_t j = 0; deterministic && j < d1.decision.transcript.size();
         ++j) {
      deterministic =
          same_message(d1.decision.transcript[j], d2.decision.transcript[j]);
    }

    RunReportInput report;
    report.scenario_id = "acceptance6";
    report.bundle = &gen.bundle;
    report.run = &run;
    report.params = &params;
    report.mode = "both";
    report.centralized = &c1;
    report.decentralized = &d1;
    const std::string bytes1 = run_report_json(report).dump(2);
    report.centralized = &c2;
    report.decentralized = &d2;
    const std::string bytes2 = run_report_json(report).dump(2);
    deterministic &= bytes1 == bytes2;

    if (conserved && deterministic) ++good;
  }
  gate.line(6, "protocol conservation and determinism",
            good == cases,
            std::to_string(good) + "/" + std::to_string(cases) +
                " multi-cluster scenarios: wait/score counts exact, reruns "
                "byte-identical");
}

// ---------------------------------------------------------------- 7 ----

double cross_weight(const TopologyGraph& g, const Cluster& x,
                    const Cluster& y) {
  double w = 0.0;
  for (const auto& [edge, freq] : g.comm_edges) {
    const std::string& ds = g.device_of(edge.first);
    const std::string& dt = g.device_of(edge.second);
    const bool forward = x.member_devices.count(ds) != 0 &&
                         y.member_devices.count(dt) != 0;
    const bool backward = y.member_devices.count(ds) != 0 &&
                          x.member_devices.count(dt) != 0;
    if (forward || backward) w += freq;
  }
  return w;
}

std::set<std::set<std::string>> device_components(const TopologyGraph& g) {
  std::map<std::string, std::set<std::string>> adjacent;
  for (const auto& [dev, rec] : g.devices) {
    (void)rec;
    adjacent[dev];
  }
  for (const auto& [edge, freq] : g.comm_edges) {
    if (freq <= 0.0) continue;
    const std::string& a = g.device_of(edge.first);
    const std::string& b = g.device_of(edge.second);
    if (a == b) continue;
    adjacent[a].insert(b);
    adjacent[b].insert(a);
  }
  std::set<std::set<std::string>> components;
  std::set<std::string> seen;
  for (const auto& [dev, peers] : adjacent) {
    (void)peers;
    if (seen.count(dev)) continue;
    std::set<std::string> comp;
    std::vector<std::string> frontier{dev};
    while (!frontier.empty()) {
      const std::string cur = frontier.back();
      frontier.pop_back();
      if (!comp.insert(cur).second) continue;
      seen.insert(cur);
      for (const auto& next : adjacent.at(cur)) {
        if (!comp.count(next)) frontier.push_back(next);
      }
    }
    components.insert(std::move(comp));
  }
  return components;
}

void criterion_partition_properties(Gate& gate) {
  testing::Rng rng(707);
  const double inf = std::numeric_limits<double>::infinity();
  bool ok = true;
  for (int i = 0; i < 100 && ok; ++i) {
    const TopologyGraph g = testing::random_topology(rng);

    std::set<std::pair<std::string, std::string>> device_pairs;
    for (const auto& [edge, freq] : g.comm_edges) {
      if (freq <= 0.0) continue;
      std::string a = g.device_of(edge.first);
      std::string b = g.device_of(edge.second);
      if (a == b) continue;
      if (b < a) std::swap(a, b);
      device_pairs.insert({a, b});
    }

    for (double tau : {0.0, 5.0, inf}) {
      const ClusterMap cmap = cluster_devices(g, tau);

      // totality and disjointness
      std::set<std::string> covered;
      std::size_t total = 0;
      for (const auto& [id, c] : cmap.clusters) {
        ok &= c.id == id && !c.member_devices.empty();
        total += c.member_devices.size();
        covered.insert(c.member_devices.begin(), c.member_devices.end());
      }
      ok &= covered.size() == g.devices.size() &&
            total == g.devices.size();

      // termination: a merge consumes one positive pair, one cluster
      const std::size_t merges = g.devices.size() - cmap.clusters.size();
      ok &= merges <= device_pairs.size() &&
            merges <= (g.devices.empty() ? 0 : g.devices.size() - 1);

      // terminal pairwise weights
      if (std::isfinite(tau)) {
        for (auto a = cmap.clusters.begin(); a != cmap.clusters.end(); ++a) {
          for (auto b = std::next(a); b != cmap.clusters.end(); ++b) {
            ok &= cross_weight(g, a->second, b->second) <= tau;
          }
        }
      }

      // limit behaviors
      if (tau == inf) {
        ok &= cmap.clusters.size() == g.devices.size();
      }
      if (tau == 0.0) {
        std::set<std::set<std::string>> got;
        for (const auto& [id, c] : cmap.clusters) {
          (void)id;
          got.insert(c.member_devices);
        }
        ok &= got == device_components(g);
      }
    }
  }
  gate.line(7, "partition totality, bounds and limits", ok,
            "100 random topologies x tau in {0, 5, +inf}");
}

// ---------------------------------------------------------------- 8 ----

void criterion_subgraph_reconstruction(Gate& gate) {
  testing::Rng rng(808);
  const double inf = std::numeric_limits<double>::infinity();
  bool ok = true;
  for (int i = 0; i < 100 && ok; ++i) {
    const TopologyGraph g = testing::random_topology(rng);
    for (double tau : {0.0, 7.0, inf}) {
      const ClusterMap cmap = cluster_devices(g, tau);
      const auto subgraphs = build_subgraphs(g, cmap);

      std::map<EdgeKey, double> flat;
      bool duplicate = false;
      for (const auto& sg : subgraphs) {
        for (const auto& [edge, freq] : sg.intra_edges) {
          duplicate |= !flat.emplace(edge, freq).second;
        }
        for (const auto& [edge, freq] : sg.shadow_edges) {
          duplicate |= !flat.emplace(resolve_shadow_edge(sg, edge), freq)
                            .second;
        }

        // shadow nodes deduplicated per external endpoint and all used
        std::set<std::string> externals, used;
        for (const auto& [sid, ext] : sg.shadow_nodes) {
          (void)sid;
          externals.insert(ext);
        }
        for (const auto& [edge, freq] : sg.shadow_edges) {
          (void)freq;
          used.insert(sg.shadow_nodes.at(edge.second));
        }
        ok &= externals.size() == sg.shadow_nodes.size() && used == externals;
      }
      ok &= !duplicate && flat == g.comm_edges;
    }
  }
  gate.line(8, "subgraph flattening rebuilds the topology", ok,
            "100 random topologies x tau in {0, 7, +inf}, exact edge "
            "multisets");
}

// ---------------------------------------------------------------- 9 ----

long double ref_pearson(const std::vector<double>& x,
                        const std::vector<double>& y) {
  const long double n = static_cast<long double>(x.size());
  long double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += static_cast<long double>(x[i]) * x[i];
    syy += static_cast<long double>(y[i]) * y[i];
    sxy += static_cast<long double>(x[i]) * y[i];
  }
  const long double cov = sxy / n - (sx / n) * (sy / n);
  const long double vx = sxx / n - (sx / n) * (sx / n);
  const long double vy = syy / n - (sy / n) * (sy / n);
  if (vx <= 0 || vy <= 0) return 0;
  const long double r = std::abs(cov) / std::sqrt(vx * vy);
  return r > 1 ? 1 : r;
}

struct RandomScoreCase {
  ScenarioBundle bundle;
  DetectionResult detection;
};

RandomScoreCase random_score_case(testing::Rng& rng) {
  const std::size_t n_ms = rng.range(2, 4);
  const std::size_t length = 10;
  testing::BundleBuilder bb;
  bb.length = length;
  bb.window = SampleWindow{2, 10};
  const char* metric_names[] = {"a", "b", "c"};

  std::vector<std::string> ids;
  for (std::size_t m = 0; m < n_ms; ++m) {
    const std::string id = "svc" + std::to_string(m);
    bb.deployments[id] = "d1";
    const std::size_t metrics = rng.range(1, 3);
    for (std::size_t k = 0; k < metrics; ++k) {
      std::vector<double> values(length);
      for (auto& v : values) v = rng.uniform(0.0, 100.0);
      bb.metric_values[id][metric_names[k]] = values;
    }
    if (m > 0) bb.edges.push_back({ids.back(), id, 5.0});
    ids.push_back(id);
  }
  for (const auto& edge : bb.edges) {
    for (Percentile pct : {Percentile::p50, Percentile::p90}) {
      std::vector<double> values(length);
      for (auto& v : values) v = rng.uniform(1.0, 50.0);
      bb.latency_values[{edge.src, edge.dst}][pct] = values;
    }
  }

  RandomScoreCase c;
  c.bundle = bb.build();
  c.detection.triggered = true;
  for (const auto& id : ids) {
    if (rng.u01() > 0.7) continue;
    const auto& available = bb.metric_values.at(id);
    std::set<std::string> flagged;
    for (const auto& [name, values] : available) {
      (void)values;
      if (rng.u01() < 0.6) flagged.insert(name);
    }
    if (flagged.empty()) flagged.insert(available.begin()->first);
    c.detection.anomalous_metrics[id] = std::move(flagged);
  }
  if (c.detection.anomalous_metrics.empty()) {
    c.detection.anomalous_metrics[ids.front()] = {
        bb.metric_values.at(ids.front()).begin()->first};
  }
  for (const auto& edge : bb.edges) {
    if (rng.u01() < 0.5) {
      const EdgeKey key{edge.src, edge.dst};
      c.detection.anomalous_edges.insert(key);
      c.detection.edge_clusters[key] = {{"p50", "p90"}};
    }
  }
  return c;
}

std::vector<double> window_slice(const std::vector<double>& values,
                                 const SampleWindow& w) {
  return std::vector<double>(values.begin() + static_cast<long>(w.start),
                             values.begin() + static_cast<long>(w.end));
}

void criterion_scoring_invariants(Gate& gate) {
  testing::Rng rng(909);
  bool ok = true;
  int brute_matches = 0;
  for (int i = 0; i < 1000 && ok; ++i) {
    const RandomScoreCase c = random_score_case(rng);
    const AnomalyScores scores =
        score_all(c.bundle.topology, c.detection, c.bundle);

    // non-negativity and the pair bounds
    for (const auto& [ms, score] : scores.node_scores) {
      const double k =
          static_cast<double>(c.detection.anomalous_metrics.at(ms).size());
      double in_edges = 0;
      for (const auto& key : c.bundle.topology.in_edges(ms)) {
        in_edges += c.detection.anomalous_edges.count(key) ? 1.0 : 0.0;
      }
      ok &= score >= 0.0 && score <= k * (k - 1) / 2 + in_edges + 1e-9;
    }
    for (const auto& [key, score] : scores.edge_scores) {
      double g = 0;
      for (const auto& group : c.detection.edge_clusters.at(key)) {
        g += static_cast<double>(group.size());
      }
      ok &= score >= 0.0 && score <= g * (g - 1) / 2 + 1e-9;
    }

    // scale invariance: correlation ignores positive affine transforms
    {
      ScenarioBundle scaled = c.bundle;
      for (auto& [ms, list] : scaled.metrics) {
        (void)ms;
        for (auto& s : list) {
          for (auto& v : s.values) v = 3.0 * v + 7.0;
        }
      }
      for (auto& [key, by_pct] : scaled.edge_latencies) {
        (void)key;
        for (auto& [pct, s] : by_pct) {
          (void)pct;
          for (auto& v : s.values) v = 3.0 * v + 7.0;
        }
      }
      const AnomalyScores again =
          score_all(scaled.topology, c.detection, scaled);
      for (const auto& [ms, score] : scores.node_scores) {
        ok &= std::abs(again.node_scores.at(ms) - score) <= 1e-9;
      }
      for (const auto& [key, score] : scores.edge_scores) {
        ok &= std::abs(again.edge_scores.at(key) - score) <= 1e-9;
      }
    }

    // permutation invariance: one shared shuffle of the window samples
    {
      std::vector<std::size_t> perm(c.bundle.window.size());
      std::iota(perm.begin(), perm.end(), std::size_t{0});
      for (std::size_t j = perm.size(); j > 1; --j) {
        std::swap(perm[j - 1], perm[rng.index(j)]);
      }
      const auto permute = [&](std::vector<double>& values) {
        const std::vector<double> window = window_slice(values,
                                                        c.bundle.window);
        for (std::size_t j = 0; j < perm.size(); ++j) {
          values[c.bundle.window.start + j] = window[perm[j]];
        }
      };
      ScenarioBundle shuffled = c.bundle;
      for (auto& [ms, list] : shuffled.metrics) {
        (void)ms;
        for (auto& s : list) permute(s.values);
      }
      for (auto& [key, by_pct] : shuffled.edge_latencies) {
        (void)key;
        for (auto& [pct, s] : by_pct) {
          (void)pct;
          permute(s.values);
        }
      }
      const AnomalyScores again =
          score_all(shuffled.topology, c.detection, shuffled);
      for (const auto& [ms, score] : scores.node_scores) {
        ok &= std::abs(again.node_scores.at(ms) - score) <= 1e-9;
      }
      for (const auto& [key, score] : scores.edge_scores) {
        ok &= std::abs(again.edge_scores.at(key) - score) <= 1e-9;
      }
    }

    // independent brute force of the scoring formulas on the first 50
    if (i < 50) {
      const auto metric_window = [&](const std::string& ms,
                                     const std::string& name) {
        for (const auto& s : c.bundle.metrics.at(ms)) {
          if (s.metric_name == name) {
            return window_slice(s.values, c.bundle.window);
          }
        }
        throw Error("missing metric in brute force");
      };
      bool case_ok = true;
      for (const auto& [ms, names] : c.detection.anomalous_metrics) {
        std::vector<std::vector<double>> windows;
        for (const auto& name : names) windows.push_back(metric_window(ms,
                                                                       name));
        long double expect = 0;
        for (std::size_t x = 0; x < windows.size(); ++x) {
          for (std::size_t y = x + 1; y < windows.size(); ++y) {
            expect += ref_pearson(windows[x], windows[y]);
          }
        }
        for (const auto& key : c.bundle.topology.in_edges(ms)) {
          if (c.detection.anomalous_edges.count(key) == 0) continue;
          const std::vector<double> rt = window_slice(
              c.bundle.edge_latencies.at(key).at(Percentile::p90).values,
              c.bundle.window);
          long double best = 0;
          for (const auto& w : windows) {
            best = std::max(best, ref_pearson(rt, w));
          }
          expect += best;
        }
        case_ok &= std::abs(scores.node_scores.at(ms) -
                            static_cast<double>(expect)) <= 1e-9;
      }
      for (const auto& key : c.detection.anomalous_edges) {
        std::vector<std::vector<double>> windows;
        for (const auto& group : c.detection.edge_clusters.at(key)) {
          for (const auto& pct : group) {
            windows.push_back(window_slice(
                c.bundle.edge_latencies.at(key).at(parse_percentile(pct))
                    .values,
                c.bundle.window));
          }
        }
        long double expect = 0;
        for (std::size_t x = 0; x < windows.size(); ++x) {
          for (std::size_t y = x + 1; y < windows.size(); ++y) {
            expect += ref_pearson(windows[x], windows[y]);
          }
        }
        case_ok &= std::abs(scores.edge_scores.at(key) -
                            static_cast<double>(expect)) <= 1e-9;
      }
      brute_matches += case_ok ? 1 : 0;
      ok &= case_ok;
    }
  }
  gate.line(9, "scoring invariants and brute-force equality",
            ok && brute_matches == 50,
            "1000 randomized score_all inputs, " +
                std::to_string(brute_matches) + "/50 brute-force matches");
}

// --------------------------------------------------------------- 10 ----

void criterion_metric_arithmetic(Gate& gate) {
  const auto row = [](const std::string& id, std::size_t rank, double tc,
                      double td) {
    EvalRow r;
    r.scenario_id = id;
    r.rank_centralized = rank;
    r.rank_decentralized = rank;
    r.total_ms_centralized = tc;
    r.total_ms_decentralized = td;
    r.compute_ms_centralized = tc;
    r.compute_ms_decentralized = td;
    r.decision_mode = "single_cluster";
    return r;
  };

  const EvalReport ranks = evaluate({row("r1", 1, 1.0, 1.0),
                                     row("r2", 2, 1.0, 1.0),
                                     row("r3", 1, 1.0, 1.0),
                                     row("r4", 3, 1.0, 1.0)});
  const RankMetrics& m = ranks.overall.decentralized;
  bool ok = m.acc.at(1) == 0.5 && m.acc.at(3) == 1.0 && m.mar == 1.75 &&
            std::abs(m.mrr - (1.0 + 0.5 + 1.0 + 1.0 / 3.0) / 4.0) <= 1e-12;

  const EvalReport times =
      evaluate({row("t1", 1, 10.0, 8.0), row("t2", 1, 20.0, 10.0)});
  ok &= std::abs(times.overall.total_time.avg_pct - 35.0) <= 1e-9 &&
        std::abs(times.overall.total_time.total_pct - 40.0) <= 1e-9;

  gate.line(10, "evaluate() reproduces the definitional examples", ok,
            "Acc@1 " + fmt(m.acc.at(1), 2) + ", MAR " + fmt(m.mar, 2) +
                ", MRR " + fmt(m.mrr, 4) + "; avg " +
                fmt(times.overall.total_time.avg_pct, 0) + "%, total " +
                fmt(times.overall.total_time.total_pct, 0) + "%");
}

}  // namespace
}  // namespace edgercl

int main() {
  using namespace edgercl;
  Gate gate;
  try {
    criterion_ppr_oracle(gate);
    criterion_single_cluster_equivalence(gate);
    criterion_clean_localization(gate);
    criterion_noisy_accuracy(gate);
    criterion_efficiency(gate);
    criterion_protocol_conservation(gate);
    criterion_partition_properties(gate);
    criterion_subgraph_reconstruction(gate);
    criterion_scoring_invariants(gate);
    criterion_metric_arithmetic(gate);
  } catch (const std::exception& e) {
    std::cout << "FAIL  acceptance run aborted: " << e.what() << "\n";
    return 2;
  }
  if (gate.failed != 0) {
    std::cout << gate.failed << " criterion(s) failed\n";
    return 1;
  }
  std::cout << "all 10 criteria passed\n";
  return 0;
}
