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
 * Command implementations behind the `edgercl` binary. Kept out of
 * main() so the test suite can drive them with in-memory streams. Every
 * command validates its configuration before touching the filesystem and
 * maps any pipeline error to a nonzero exit with a diagnostic.
 */

#ifndef EDGERCL_CLI_HPP
#define EDGERCL_CLI_HPP

#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "edgercl/harness.hpp"
#include "edgercl/report.hpp"
#include "edgercl/scenario_io.hpp"

namespace edgercl {

struct RunConfig {
  std::string scenario;
  std::string mode = "both";  ///< centralized | decentralized | both
  double tau = 10.0;
  double alpha = 0.85;
  double epsilon = 1e-6;
  double beta = 0.07;
  std::size_t max_iters = 1000;
  std::uint64_t seed = 1;
  double net_latency_ms = 5.0;
  double net_jitter_ms = 1.0;
  std::string report;  ///< optional JSON output path
};

inline void validate(const RunConfig& cfg) {
  if (!(cfg.alpha > 0.0) || !(cfg.alpha < 1.0)) {
    throw Error("alpha must lie in (0, 1)");
  }
  if (!(cfg.epsilon > 0.0)) {
    throw Error("epsilon must be positive");
  }
  if (!(cfg.beta > 0.0) || !(cfg.beta < 1.0)) {
    throw Error("beta must lie in (0, 1)");
  }
  if (!(cfg.tau >= 0.0)) {
    throw Error("tau must be non-negative");
  }
  if (cfg.max_iters == 0) {
    throw Error("max-iters must be at least 1");
  }
  if (!(cfg.net_latency_ms > 0.0) || !(cfg.net_jitter_ms >= 0.0) ||
      cfg.net_jitter_ms >= cfg.net_latency_ms) {
    throw Error("net latency must be positive and exceed the jitter");
  }
  if (cfg.mode != "centralized" && cfg.mode != "decentralized" &&
      cfg.mode != "both") {
    throw Error("mode must be centralized, decentralized or both");
  }
}

inline PipelineParams params_of(const RunConfig& cfg) {
  PipelineParams p;
  p.tau = cfg.tau;
  p.alpha = cfg.alpha;
  p.epsilon = cfg.epsilon;
  p.beta = cfg.beta;
  p.max_iters = cfg.max_iters;
  p.seed = cfg.seed;
  p.latency.mean_ms = cfg.net_latency_ms;
  p.latency.jitter_ms = cfg.net_jitter_ms;
  return p;
}

namespace detail {

inline std::string scenario_id_of(const std::string& path) {
  std::filesystem::path p(path);
  if (!p.has_filename()) p = p.parent_path();  // trailing slash
  return p.filename().string();
}

inline void write_text_file(const std::filesystem::path& path,
                            const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error("cannot write '" + path.string() + "'");
  }
  out << content;
  if (!out.flush()) {
    throw Error("write to '" + path.string() + "' failed");
  }
}

inline void summarize_outcome(std::ostream& out, const char* label,
                              const ModeOutcome& o) {
  out << label << ": ";
  if (!o.localized) {
    out << o.note << " (detect " << fixed(o.detect_ms, 3) << " ms)\n";
    return;
  }
  out << "root cause " << o.root_cause << " (rank of ground truth "
      << o.rank_of_truth << ", mode " << decision_mode_name(o.mode)
      << ", total " << fixed(o.total_ms, 3) << " ms, compute "
      << fixed(o.compute_ms, 3) << " ms, " << o.edge_visits
      << " edge visits)\n";
}

}  // namespace detail

/// `run`: execute the configured mode(s) on one scenario directory.
inline int cmd_run(const RunConfig& cfg, std::ostream& out,
                   std::ostream& err) {
  try {
    validate(cfg);
    if (cfg.scenario.empty()) {
      throw Error("a scenario directory is required (--scenario)");
    }
    const ScenarioBundle bundle = load_scenario(cfg.scenario);
    const PipelineParams params = params_of(cfg);
    const ScenarioRun run = prepare_run(bundle, params);

    RunReportInput report;
    report.scenario_id = detail::scenario_id_of(cfg.scenario);
    report.bundle = &bundle;
    report.run = &run;
    report.params = &params;
    report.mode = cfg.mode;

    ModeOutcome central, decentral;
    if (cfg.mode != "decentralized") {
      central = run_centralized(bundle, run, params);
      report.centralized = &central;
      detail::summarize_outcome(out, "centralized", central);
    }
    if (cfg.mode != "centralized") {
      decentral = run_decentralized(bundle, run, params);
      report.decentralized = &decentral;
      detail::summarize_outcome(out, "decentralized", decentral);
    }
    if (!cfg.report.empty()) {
      detail::write_text_file(cfg.report, run_report_json(report).dump(2) +
                                              "\n");
      out << "report written to " << cfg.report << "\n";
    }
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << " (scenario '" << cfg.scenario << "')\n";
    return 1;
  }
}

/// `gen`: generate a scenario bundle plus manifest into a directory.
inline int cmd_gen(const GenSpec& spec, const std::string& out_dir,
                   std::ostream& out, std::ostream& err) {
  try {
    if (out_dir.empty()) {
      throw Error("an output directory is required (--out)");
    }
    const Generated gen = generate(spec);
    write_scenario(gen.bundle, out_dir);
    detail::write_text_file(std::filesystem::path(out_dir) / "manifest.json",
                            manifest_json(gen.manifest).dump(2) + "\n");
    out << "scenario written to " << out_dir << " (root cause "
        << gen.manifest.root_cause << ", "
        << gen.bundle.topology.microservices.size() << " microservices on "
        << gen.bundle.topology.devices.size() << " devices, "
        << (gen.manifest.cross_cluster ? "multi" : "single")
        << "-cluster propagation)\n";
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

/// `eval`: aggregate stored run reports into an EvalReport.
inline int cmd_eval(const std::string& results_dir, const std::string& report,
                    std::ostream& out, std::ostream& err) {
  try {
    if (!std::filesystem::is_directory(results_dir)) {
      throw Error("results directory '" + results_dir + "' does not exist");
    }
    std::vector<std::filesystem::path> files;
    for (const auto& entry :
         std::filesystem::directory_iterator(results_dir)) {
      if (entry.is_regular_file() && entry.path().extension() == ".json") {
        files.push_back(entry.path());
      }
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) {
      throw Error("no run reports (*.json) in '" + results_dir + "'");
    }
    std::vector<EvalRow> rows;
    for (const auto& file : files) {
      std::ifstream in(file);
      Json parsed;
      std::string reason;
      EvalRow row;
      try {
        parsed = Json::parse(in);
      } catch (const nlohmann::json::exception& e) {
        err << "warning: skipping " << file.filename().string() << ": "
            << e.what() << "\n";
        continue;
      }
      if (!eval_row_of_report(parsed, &row, &reason)) {
        err << "warning: skipping " << file.filename().string() << ": "
            << reason << "\n";
        continue;
      }
      rows.push_back(std::move(row));
    }
    if (rows.empty()) {
      throw Error("no usable run reports in '" + results_dir + "'");
    }
    const EvalReport rep = evaluate(rows);
    out << render_eval_text(rep);
    if (!report.empty()) {
      detail::write_text_file(report, eval_report_json(rep).dump(2) + "\n");
      std::filesystem::path table(report);
      table.replace_extension(".tsv");
      detail::write_text_file(table, eval_table_tsv(rep));
      out << "report written to " << report << " and " << table.string()
          << "\n";
    }
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

struct BenchConfig {
  std::size_t scenarios = 20;
  GenSpec gen;        ///< template; seed and cross_cluster vary per scenario
  RunConfig run;      ///< pipeline parameters; scenario/report ignored
  bool mixed = true;  ///< alternate single- and multi-cluster propagation
  std::string report;
};

/// `bench`: generate a batch, run both modes in memory, evaluate.
inline int cmd_bench(const BenchConfig& cfg, std::ostream& out,
                     std::ostream& err) {
  try {
    validate(cfg.run);
    if (cfg.scenarios == 0) {
      throw Error("bench needs at least one scenario");
    }
    const PipelineParams params = params_of(cfg.run);
    std::vector<EvalRow> rows;
    for (std::size_t i = 0; i < cfg.scenarios; ++i) {
      GenSpec spec = cfg.gen;
      spec.seed = cfg.gen.seed + i;
      spec.tau = cfg.run.tau;
      if (cfg.mixed && spec.groups >= 2) {
        spec.cross_cluster = (i % 2 == 1);
      }
      const Generated gen = generate(spec);
      const ScenarioRun run = prepare_run(gen.bundle, params);
      const ModeOutcome central = run_centralized(gen.bundle, run, params);
      const ModeOutcome decentral = run_decentralized(gen.bundle, run, params);
      if (!central.localized || !decentral.localized) {
        err << "warning: scenario seed " << spec.seed
            << " did not localize; excluded\n";
        continue;
      }
      EvalRow row;
      row.scenario_id = "bench-" + std::to_string(spec.seed);
      row.decision_mode = decision_mode_name(decentral.mode);
      row.multi_cluster = decentral.mode != DecisionMode::single_cluster;
      row.rank_centralized = central.rank_of_truth;
      row.rank_decentralized = decentral.rank_of_truth;
      row.total_ms_centralized = central.total_ms;
      row.total_ms_decentralized = decentral.total_ms;
      row.compute_ms_centralized = central.compute_ms;
      row.compute_ms_decentralized = decentral.compute_ms;
      row.visits_centralized = central.edge_visits;
      row.visits_decentralized = decentral.edge_visits;
      rows.push_back(std::move(row));
    }
    if (rows.empty()) {
      throw Error("no scenario in the batch produced a usable result");
    }
    const EvalReport rep = evaluate(rows);
    out << render_eval_text(rep);
    if (!cfg.report.empty()) {
      detail::write_text_file(cfg.report, eval_report_json(rep).dump(2) + "\n");
      std::filesystem::path table(cfg.report);
      table.replace_extension(".tsv");
      detail::write_text_file(table, eval_table_tsv(rep));
      out << "report written to " << cfg.report << " and " << table.string()
          << "\n";
    }
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace edgercl

#endif  // EDGERCL_CLI_HPP
