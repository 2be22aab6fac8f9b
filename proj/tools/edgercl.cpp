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

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "edgercl/cli.hpp"

namespace {

void add_pipeline_flags(CLI::App* cmd, edgercl::RunConfig* cfg) {
  cmd->add_option("--mode", cfg->mode,
                  "centralized, decentralized or both")
      ->default_val(cfg->mode);
  cmd->add_option("--tau", cfg->tau, "device clustering threshold")
      ->default_val(cfg->tau);
  cmd->add_option("--alpha", cfg->alpha, "PPR damping factor")
      ->default_val(cfg->alpha);
  cmd->add_option("--epsilon", cfg->epsilon, "PPR convergence threshold")
      ->default_val(cfg->epsilon);
  cmd->add_option("--beta", cfg->beta, "detection sensitivity")
      ->default_val(cfg->beta);
  cmd->add_option("--max-iters", cfg->max_iters, "PPR iteration cap")
      ->default_val(cfg->max_iters);
  cmd->add_option("--seed", cfg->seed, "seed for all randomness")
      ->default_val(cfg->seed);
  cmd->add_option("--net-latency-ms", cfg->net_latency_ms,
                  "mean simulated network latency")
      ->default_val(cfg->net_latency_ms);
  cmd->add_option("--net-jitter-ms", cfg->net_jitter_ms,
                  "simulated latency jitter (half-range)")
      ->default_val(cfg->net_jitter_ms);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "edgercl: decentralized root cause localization for microservices "
      "on edge devices"};
  app.require_subcommand(1);

  edgercl::RunConfig run_cfg;
  CLI::App* run = app.add_subcommand("run", "run the pipeline on a scenario");
  run->add_option("--scenario", run_cfg.scenario, "scenario directory")
      ->required();
  add_pipeline_flags(run, &run_cfg);
  run->add_option("--report", run_cfg.report, "write a JSON run report here");

  edgercl::GenSpec gen_spec;
  std::string gen_out;
  CLI::App* gen = app.add_subcommand("gen", "generate a synthetic scenario");
  gen->add_option("--out", gen_out, "output scenario directory")->required();
  gen->add_option("--seed", gen_spec.seed, "generator seed")
      ->default_val(gen_spec.seed);
  gen->add_option("--devices", gen_spec.devices, "edge device count")
      ->default_val(gen_spec.devices);
  gen->add_option("--groups", gen_spec.groups,
                  "device groups the partition should recover")
      ->default_val(gen_spec.groups);
  gen->add_option("--ms-min", gen_spec.ms_per_device_min,
                  "min microservices per device")
      ->default_val(gen_spec.ms_per_device_min);
  gen->add_option("--ms-max", gen_spec.ms_per_device_max,
                  "max microservices per device")
      ->default_val(gen_spec.ms_per_device_max);
  gen->add_option("--extra-edges", gen_spec.extra_edge_fraction,
                  "extra intra-group edges per microservice")
      ->default_val(gen_spec.extra_edge_fraction);
  gen->add_option("--intra-freq", gen_spec.intra_freq,
                  "communication frequency inside a group")
      ->default_val(gen_spec.intra_freq);
  gen->add_option("--cross-freq", gen_spec.cross_freq,
                  "communication frequency across groups")
      ->default_val(gen_spec.cross_freq);
  gen->add_option("--series-length", gen_spec.series_length,
                  "telemetry samples per series")
      ->default_val(gen_spec.series_length);
  gen->add_option("--window", gen_spec.window_length,
                  "detection window length")
      ->default_val(gen_spec.window_length);
  gen->add_option("--noise", gen_spec.noise_level,
                  "baseline noise amplitude in [0, 0.5]")
      ->default_val(gen_spec.noise_level);
  gen->add_option("--background-events", gen_spec.background_events,
                  "weak anomalies per non-root group")
      ->default_val(gen_spec.background_events);
  gen->add_flag("--cross-cluster", gen_spec.cross_cluster,
                "propagate the anomaly across device groups");
  gen->add_option("--depth", gen_spec.depth, "propagation path length")
      ->default_val(gen_spec.depth);
  gen->add_option("--tau", gen_spec.tau,
                  "clustering threshold the topology is built for")
      ->default_val(gen_spec.tau);

  std::string eval_results, eval_report;
  CLI::App* eval = app.add_subcommand("eval", "aggregate stored run reports");
  eval->add_option("--results", eval_results,
                   "directory of run report JSON files")
      ->required();
  eval->add_option("--report", eval_report,
                   "write the eval report (JSON + TSV table) here");

  edgercl::BenchConfig bench_cfg;
  CLI::App* bench = app.add_subcommand(
      "bench", "generate a batch, run both modes, report metrics");
  bench->add_option("--scenarios", bench_cfg.scenarios, "batch size")
      ->default_val(bench_cfg.scenarios);
  bench->add_option("--devices", bench_cfg.gen.devices, "edge device count")
      ->default_val(bench_cfg.gen.devices);
  bench->add_option("--groups", bench_cfg.gen.groups, "device groups")
      ->default_val(bench_cfg.gen.groups);
  bench->add_option("--noise", bench_cfg.gen.noise_level,
                    "baseline noise amplitude")
      ->default_val(bench_cfg.gen.noise_level);
  bench->add_option("--background-events", bench_cfg.gen.background_events,
                    "weak anomalies per non-root group")
      ->default_val(bench_cfg.gen.background_events);
  bench->add_flag("!--no-mixed", bench_cfg.mixed,
                  "keep every scenario single-cluster");
  add_pipeline_flags(bench, &bench_cfg.run);
  bench->add_option("--report", bench_cfg.report,
                    "write the eval report (JSON + TSV table) here");

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) {
    return edgercl::cmd_run(run_cfg, std::cout, std::cerr);
  }
  if (gen->parsed()) {
    return edgercl::cmd_gen(gen_spec, gen_out, std::cout, std::cerr);
  }
  if (eval->parsed()) {
    return edgercl::cmd_eval(eval_results, eval_report, std::cout, std::cerr);
  }
  if (bench->parsed()) {
    bench_cfg.gen.seed = bench_cfg.run.seed;
    return edgercl::cmd_bench(bench_cfg, std::cout, std::cerr);
  }
  return 1;
}
