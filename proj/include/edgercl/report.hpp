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
 * Report schemas. Run reports (`edgercl-run-report/1`) capture one
 * scenario execution; eval reports (`edgercl-eval-report/1`) aggregate a
 * batch. All times are simulated milliseconds from the cost and latency
 * models, so reports are byte-identical for a fixed seed.
 */

#ifndef EDGERCL_REPORT_HPP
#define EDGERCL_REPORT_HPP

#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

#include "edgercl/core.hpp"
#include "edgercl/harness.hpp"

namespace edgercl {

using Json = nlohmann::ordered_json;

inline constexpr const char* kRunReportSchema = "edgercl-run-report/1";
inline constexpr const char* kEvalReportSchema = "edgercl-eval-report/1";

namespace detail {

inline std::string fixed(double v, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
  return buf;
}

inline Json json_of_transcript(const std::vector<ProtocolMessage>& transcript) {
  Json list = Json::array();
  for (const auto& m : transcript) {
    Json entry;
    entry["kind"] = m.kind == MessageKind::wait ? "wait" : "score";
    entry["from"] = m.from;
    entry["to"] = m.to;
    entry["send_ms"] = m.send_time;
    entry["deliver_ms"] = m.deliver_time;
    if (m.kind == MessageKind::score) {
      entry["avg_approx_anom_score"] = m.avg_approx_anom_score;
      entry["shadow_edge_score"] = m.shadow_edge_score;
      entry["attach_ms"] = m.attach_ms;
    }
    list.push_back(std::move(entry));
  }
  return list;
}

inline Json json_of_outcome(const ModeOutcome& out, bool decentralized) {
  Json j;
  j["localized"] = out.localized;
  if (!out.localized) {
    j["note"] = out.note;
  } else {
    j["root_cause"] = out.root_cause;
    j["rank_of_ground_truth"] = out.rank_of_truth;
    if (decentralized) {
      j["decision_mode"] = decision_mode_name(out.mode);
    }
    Json ranking = Json::array();
    for (const auto& rv : out.ranking) {
      Json entry;
      entry["id"] = rv.id;
      entry["kind"] = vertex_kind_name(rv.kind);
      entry["probability"] = rv.probability;
      ranking.push_back(std::move(entry));
    }
    j["ranking"] = std::move(ranking);
    j["iterations"] = out.iterations;
    j["edge_visits"] = out.edge_visits;
    if (decentralized) {
      j["edge_visits_max_cluster"] = out.edge_visits_max;
    }
  }
  Json times;
  if (!decentralized) times["transfer_ms"] = out.transfer_ms;
  times["detect_ms"] = out.detect_ms;
  times["score_ms"] = out.score_ms;
  times["ppr_ms"] = out.ppr_ms;
  if (decentralized) times["wait_ms"] = out.wait_ms;
  times["compute_ms"] = out.compute_ms;
  times["total_ms"] = out.total_ms;
  j["times"] = std::move(times);
  if (decentralized && out.localized) {
    Json stats = Json::array();
    for (const auto& st : out.decision.cluster_stats) {
      Json entry;
      entry["cluster"] = st.cluster_id;
      entry["ran_ppr"] = st.ran_ppr;
      entry["iterations"] = st.iterations;
      entry["converged"] = st.converged;
      entry["edge_visits"] = st.edge_visits;
      entry["evidence_mass"] = st.evidence_mass;
      entry["detect_ms"] = st.detect_ms;
      entry["score_ms"] = st.score_ms;
      entry["ppr_ms"] = st.ppr_ms;
      entry["wait_ms"] = st.wait_ms;
      entry["done_ms"] = st.done_ms;
      stats.push_back(std::move(entry));
    }
    j["clusters"] = std::move(stats);
    j["transcript"] = json_of_transcript(out.decision.transcript);
  }
  return j;
}

}  // namespace detail

struct RunReportInput {
  std::string scenario_id;
  const ScenarioBundle* bundle = nullptr;
  const ScenarioRun* run = nullptr;
  const PipelineParams* params = nullptr;
  std::string mode;  ///< centralized | decentralized | both
  const ModeOutcome* centralized = nullptr;    ///< null if mode excludes it
  const ModeOutcome* decentralized = nullptr;  ///< null if mode excludes it
};

inline Json run_report_json(const RunReportInput& in) {
  Json j;
  j["schema"] = kRunReportSchema;

  Json scenario;
  scenario["id"] = in.scenario_id;
  scenario["ground_truth"] = in.bundle->ground_truth;
  scenario["devices"] = in.bundle->topology.devices.size();
  scenario["microservices"] = in.bundle->topology.microservices.size();
  scenario["comm_edges"] = in.bundle->topology.comm_edges.size();
  scenario["series_length"] = in.bundle->series_length();
  Json window;
  window["start"] = in.bundle->window.start;
  window["end"] = in.bundle->window.end;
  scenario["window"] = std::move(window);
  Json clusters = Json::array();
  for (const auto& [cid, cluster] : in.run->cmap.clusters) {
    Json entry;
    entry["id"] = cid;
    entry["devices"] = cluster.member_devices;
    clusters.push_back(std::move(entry));
  }
  scenario["clusters"] = std::move(clusters);
  j["scenario"] = std::move(scenario);

  Json params;
  params["mode"] = in.mode;
  params["tau"] = in.params->tau;
  params["alpha"] = in.params->alpha;
  params["epsilon"] = in.params->epsilon;
  params["beta"] = in.params->beta;
  params["max_iters"] = in.params->max_iters;
  params["seed"] = in.params->seed;
  params["net_latency_ms"] = in.params->latency.mean_ms;
  params["net_jitter_ms"] = in.params->latency.jitter_ms;
  j["params"] = std::move(params);

  Json detection;
  detection["triggered"] = in.run->detection.triggered;
  detection["anomalous_metrics"] = in.run->detection.anomalous_metrics.size();
  detection["anomalous_edges"] = in.run->detection.anomalous_edges.size();
  j["detection"] = std::move(detection);

  if (in.centralized != nullptr) {
    j["centralized"] = detail::json_of_outcome(*in.centralized, false);
  }
  if (in.decentralized != nullptr) {
    j["decentralized"] = detail::json_of_outcome(*in.decentralized, true);
  }
  return j;
}

/**
 * Extracts the eval-relevant row from a stored run report. Returns false
 * (with a reason) for partial reports, which the caller lists and skips.
 */
inline bool eval_row_of_report(const Json& report, EvalRow* row,
                               std::string* reason) {
  const auto fail = [&](const std::string& why) {
    *reason = why;
    return false;
  };
  if (!report.contains("schema") || report["schema"] != kRunReportSchema) {
    return fail("unrecognized schema");
  }
  if (!report.contains("centralized") || !report.contains("decentralized")) {
    return fail("needs both centralized and decentralized outcomes");
  }
  const Json& c = report["centralized"];
  const Json& d = report["decentralized"];
  if (!c["localized"].get<bool>() || !d["localized"].get<bool>()) {
    return fail("a mode did not localize");
  }
  row->scenario_id = report["scenario"]["id"].get<std::string>();
  row->decision_mode = d["decision_mode"].get<std::string>();
  row->multi_cluster = row->decision_mode != "single_cluster";
  row->rank_centralized = c["rank_of_ground_truth"].get<std::size_t>();
  row->rank_decentralized = d["rank_of_ground_truth"].get<std::size_t>();
  row->total_ms_centralized = c["times"]["total_ms"].get<double>();
  row->total_ms_decentralized = d["times"]["total_ms"].get<double>();
  row->compute_ms_centralized = c["times"]["compute_ms"].get<double>();
  row->compute_ms_decentralized = d["times"]["compute_ms"].get<double>();
  row->visits_centralized = c["edge_visits"].get<std::uint64_t>();
  row->visits_decentralized = d["edge_visits"].get<std::uint64_t>();
  return true;
}

namespace detail {

inline Json json_of_group(const EvalGroup& g) {
  Json j;
  j["name"] = g.name;
  j["scenarios"] = g.count;
  for (const char* mode : {"centralized", "decentralized"}) {
    const RankMetrics& m =
        mode[0] == 'c' ? g.centralized : g.decentralized;
    Json mj;
    Json acc;
    for (const auto& [k, v] : m.acc) {
      acc["acc@" + std::to_string(k)] = v;
    }
    mj["accuracy"] = std::move(acc);
    mj["mar"] = m.mar;
    mj["mrr"] = m.mrr;
    j[mode] = std::move(mj);
  }
  Json tr;
  tr["avg_pct"] = g.total_time.avg_pct;
  tr["total_pct"] = g.total_time.total_pct;
  j["total_time_reduction"] = std::move(tr);
  Json cr;
  cr["avg_pct"] = g.compute_time.avg_pct;
  cr["total_pct"] = g.compute_time.total_pct;
  j["compute_time_reduction"] = std::move(cr);
  j["mean_edge_visits_centralized"] = g.mean_visits_centralized;
  j["mean_edge_visits_decentralized"] = g.mean_visits_decentralized;
  return j;
}

}  // namespace detail

inline Json eval_report_json(const EvalReport& rep) {
  Json j;
  j["schema"] = kEvalReportSchema;
  j["overall"] = detail::json_of_group(rep.overall);
  Json breakdown = Json::array();
  for (const auto& g : rep.breakdown) {
    breakdown.push_back(detail::json_of_group(g));
  }
  j["breakdown"] = std::move(breakdown);
  Json rows = Json::array();
  for (const auto& r : rep.rows) {
    Json entry;
    entry["scenario"] = r.scenario_id;
    entry["propagation"] = r.multi_cluster ? "multi_cluster" : "single_cluster";
    entry["decision_mode"] = r.decision_mode;
    entry["rank_centralized"] = r.rank_centralized;
    entry["rank_decentralized"] = r.rank_decentralized;
    entry["total_ms_centralized"] = r.total_ms_centralized;
    entry["total_ms_decentralized"] = r.total_ms_decentralized;
    entry["compute_ms_centralized"] = r.compute_ms_centralized;
    entry["compute_ms_decentralized"] = r.compute_ms_decentralized;
    entry["edge_visits_centralized"] = r.visits_centralized;
    entry["edge_visits_decentralized"] = r.visits_decentralized;
    rows.push_back(std::move(entry));
  }
  j["scenarios"] = std::move(rows);
  return j;
}

/// Injection manifest, written next to generated scenarios. The harness
/// tests treat the in-memory manifest as the detection/scoring oracle;
/// the file is for inspection and replay.
inline Json manifest_json(const GenManifest& man) {
  Json j;
  j["schema"] = "edgercl-manifest/1";
  j["seed"] = man.seed;
  j["root_cause"] = man.root_cause;
  j["propagation_path"] = man.propagation_path;
  j["cross_cluster"] = man.cross_cluster;
  j["tau"] = man.tau;
  Json groups = Json::array();
  for (const auto& g : man.device_groups) groups.push_back(g);
  j["device_groups"] = std::move(groups);
  const auto edges = [](const std::set<EdgeKey>& set) {
    Json list = Json::array();
    for (const auto& [src, dst] : set) {
      list.push_back(Json::array({src, dst}));
    }
    return list;
  };
  j["injected_metrics"] = man.injected_metrics;
  j["injected_edges"] = edges(man.injected_edges);
  j["crossing_edges"] = edges(man.crossing_edges);
  j["background_metrics"] = man.background_metrics;
  j["background_edges"] = edges(man.background_edges);
  return j;
}

/// Flat tab-separated table, one row per scenario group, for plotting.
inline std::string eval_table_tsv(const EvalReport& rep) {
  std::string out =
      "group\tscenarios\tmode\tacc@1\tacc@2\tacc@3\tacc@5\tacc@10\tmar\tmrr"
      "\tavg_time_reduction_pct\ttotal_time_reduction_pct"
      "\tavg_compute_reduction_pct\ttotal_compute_reduction_pct\n";
  const auto row = [&](const EvalGroup& g, const char* mode,
                       const RankMetrics& m) {
    out += g.name;
    out += '\t';
    out += std::to_string(g.count);
    out += '\t';
    out += mode;
    for (std::size_t k : acc_at_ks()) {
      out += '\t';
      out += format_double(m.acc.at(k));
    }
    out += '\t';
    out += format_double(m.mar);
    out += '\t';
    out += format_double(m.mrr);
    for (double v : {g.total_time.avg_pct, g.total_time.total_pct,
                     g.compute_time.avg_pct, g.compute_time.total_pct}) {
      out += '\t';
      out += format_double(v);
    }
    out += '\n';
  };
  const auto group = [&](const EvalGroup& g) {
    row(g, "centralized", g.centralized);
    row(g, "decentralized", g.decentralized);
  };
  group(rep.overall);
  for (const auto& g : rep.breakdown) group(g);
  return out;
}

/// Human-readable summary printed by `eval` and `bench`.
inline std::string render_eval_text(const EvalReport& rep) {
  std::string out;
  const auto line = [&](const EvalGroup& g) {
    out += "  " + g.name + " (" + std::to_string(g.count) + " scenarios)\n";
    const auto mode = [&](const char* name, const RankMetrics& m) {
      out += "    ";
      out += name;
      out += ": ";
      for (std::size_t k : acc_at_ks()) {
        out += "Acc@" + std::to_string(k) + "=" + detail::fixed(m.acc.at(k), 4) +
               " ";
      }
      out += "MAR=" + detail::fixed(m.mar, 4) +
             " MRR=" + detail::fixed(m.mrr, 4) + "\n";
    };
    mode("centralized  ", g.centralized);
    mode("decentralized", g.decentralized);
    out += "    time reduction: avg=" + detail::fixed(g.total_time.avg_pct, 2) +
           "% total=" + detail::fixed(g.total_time.total_pct, 2) +
           "%  (compute only: avg=" + detail::fixed(g.compute_time.avg_pct, 2) +
           "% total=" + detail::fixed(g.compute_time.total_pct, 2) + "%)\n";
    out += "    mean edge visits: centralized=" +
           detail::fixed(g.mean_visits_centralized, 1) + " decentralized=" +
           detail::fixed(g.mean_visits_decentralized, 1) + "\n";
  };
  out += "evaluation over " + std::to_string(rep.rows.size()) + " scenarios\n";
  line(rep.overall);
  for (const auto& g : rep.breakdown) line(g);
  return out;
}

}  // namespace edgercl

#endif  // EDGERCL_REPORT_HPP
