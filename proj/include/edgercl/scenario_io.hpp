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
 * Scenario bundle (de)serialization. A bundle is a directory:
 *
 *   topology            devices, placements, communication edges
 *   metrics/<ms>.tsv    one table per microservice, self-describing header
 *   edge_latencies/<n>.tsv one table per edge, percentile columns
 *   label               ground-truth root cause and detection window
 *
 * The format is line oriented, whitespace separated, with '#' comments.
 * Writing is deterministic: fixed file order, sorted keys, and shortest
 * round-tripping decimal text for every value, so identical bundles
 * produce byte-identical trees. See docs/formats.md for the grammar.
 */

#ifndef EDGERCL_SCENARIO_IO_HPP
#define EDGERCL_SCENARIO_IO_HPP

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "edgercl/core.hpp"
#include "edgercl/model.hpp"

namespace edgercl {

namespace detail {

inline std::vector<std::string> read_lines(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) {
    throw Error("cannot open '" + p.string() + "'");
  }
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

inline std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> toks;
  std::istringstream ss(line);
  std::string t;
  while (ss >> t) toks.push_back(t);
  return toks;
}

inline bool skippable(const std::vector<std::string>& toks) {
  return toks.empty() || toks.front().front() == '#';
}

struct TableFile {
  std::filesystem::path path;
  std::vector<std::vector<std::string>> rows;  ///< tokenized non-blank lines
};

inline TableFile read_table(const std::filesystem::path& p) {
  TableFile t{p, {}};
  for (const auto& line : read_lines(p)) {
    auto toks = tokenize(line);
    if (!skippable(toks)) t.rows.push_back(std::move(toks));
  }
  return t;
}

inline std::vector<std::filesystem::path> sorted_tables(
    const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw Error("missing directory '" + dir.string() + "'");
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

inline std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error("cannot write '" + p.string() + "'");
  }
  return out;
}

}  // namespace detail

/**
 * Loads and fully validates a scenario bundle from @p dir. Any structural
 * problem (missing file, dangling reference, ragged or non-finite series,
 * missing p90 table) raises Error naming the offending element.
 */
inline ScenarioBundle load_scenario(const std::filesystem::path& dir) {
  ScenarioBundle b;

  std::vector<RawEdge> raw_edges;
  std::map<std::string, std::string> deployments;
  std::map<std::string, int> ranks;
  {
    const auto path = dir / "topology";
    const auto table = detail::read_table(path);
    for (const auto& toks : table.rows) {
      const std::string ctx = path.string();
      if (toks[0] == "device" && toks.size() == 3) {
        ranks[toks[1]] = static_cast<int>(parse_double(toks[2], ctx));
      } else if (toks[0] == "microservice" && toks.size() == 3) {
        if (!deployments.emplace(toks[1], toks[2]).second) {
          throw Error("duplicate microservice '" + toks[1] + "' in " + ctx);
        }
      } else if (toks[0] == "edge" && toks.size() == 4) {
        raw_edges.push_back(RawEdge{toks[1], toks[2], parse_double(toks[3], ctx)});
      } else {
        throw Error("unrecognized topology line starting '" + toks[0] +
                    "' in " + ctx);
      }
    }
  }
  b.topology = build_topology(raw_edges, deployments, ranks);

  for (const auto& path : detail::sorted_tables(dir / "metrics")) {
    const auto table = detail::read_table(path);
    if (table.rows.size() < 3 || table.rows[0].size() < 2 ||
        table.rows[0][0] != "microservice" || table.rows[1][0] != "metric" ||
        table.rows[2][0] != "unit") {
      throw Error("malformed metrics table '" + path.string() +
                  "': expected microservice/metric/unit header lines");
    }
    const std::string owner = table.rows[0][1];
    const auto& names = table.rows[1];
    const auto& units = table.rows[2];
    if (names.size() != units.size()) {
      throw Error("metric/unit column mismatch in '" + path.string() + "'");
    }
    std::vector<MetricSeries> list;
    for (std::size_t c = 1; c < names.size(); ++c) {
      list.push_back(MetricSeries{owner, names[c], units[c], {}});
    }
    for (std::size_t r = 3; r < table.rows.size(); ++r) {
      if (table.rows[r].size() != list.size()) {
        throw Error("row with " + std::to_string(table.rows[r].size()) +
                    " values, expected " + std::to_string(list.size()) +
                    " in '" + path.string() + "'");
      }
      for (std::size_t c = 0; c < list.size(); ++c) {
        list[c].values.push_back(parse_double(table.rows[r][c], path.string()));
      }
    }
    std::sort(list.begin(), list.end(),
              [](const MetricSeries& a, const MetricSeries& x) {
                return a.metric_name < x.metric_name;
              });
    if (!b.metrics.emplace(owner, std::move(list)).second) {
      throw Error("duplicate metrics table for microservice '" + owner + "'");
    }
  }

  for (const auto& path : detail::sorted_tables(dir / "edge_latencies")) {
    const auto table = detail::read_table(path);
    if (table.rows.size() < 2 || table.rows[0].size() != 3 ||
        table.rows[0][0] != "edge" || table.rows[1][0] != "percentile") {
      throw Error("malformed latency table '" + path.string() +
                  "': expected edge/percentile header lines");
    }
    const EdgeKey key{table.rows[0][1], table.rows[0][2]};
    auto& per = b.edge_latencies[key];
    std::vector<Percentile> cols;
    for (std::size_t c = 1; c < table.rows[1].size(); ++c) {
      const Percentile p = parse_percentile(table.rows[1][c]);
      if (!per.emplace(p, EdgeLatencySeries{key, p, {}}).second) {
        throw Error("duplicate percentile column in '" + path.string() + "'");
      }
      cols.push_back(p);
    }
    for (std::size_t r = 2; r < table.rows.size(); ++r) {
      if (table.rows[r].size() != cols.size()) {
        throw Error("row width mismatch in '" + path.string() + "'");
      }
      for (std::size_t c = 0; c < cols.size(); ++c) {
        per[cols[c]].values.push_back(
            parse_double(table.rows[r][c], path.string()));
      }
    }
  }

  {
    const auto path = dir / "label";
    for (const auto& toks : detail::read_table(path).rows) {
      if (toks[0] == "root_cause" && toks.size() == 2) {
        b.ground_truth = toks[1];
      } else if (toks[0] == "window" && toks.size() == 3) {
        b.window.start = parse_index(toks[1], path.string());
        b.window.end = parse_index(toks[2], path.string());
      } else {
        throw Error("unrecognized label line starting '" + toks[0] + "' in " +
                    path.string());
      }
    }
    if (b.ground_truth.empty()) {
      throw Error("label file '" + path.string() + "' lacks a root_cause line");
    }
  }

  validate_bundle(b);
  return b;
}

/// Writes @p b under @p dir; the result reloads to an equal bundle.
inline void write_scenario(const ScenarioBundle& b,
                           const std::filesystem::path& dir) {
  validate_bundle(b);
  std::filesystem::create_directories(dir / "metrics");
  std::filesystem::create_directories(dir / "edge_latencies");

  {
    auto out = detail::open_out(dir / "topology");
    out << "# devices, placements and communication edges\n";
    for (const auto& [id, d] : b.topology.devices) {
      out << "device " << id << " " << d.capacity_rank << "\n";
    }
    for (const auto& [id, ms] : b.topology.microservices) {
      out << "microservice " << id << " " << ms.device_id << "\n";
    }
    for (const auto& [key, freq] : b.topology.comm_edges) {
      out << "edge " << key.first << " " << key.second << " "
          << format_double(freq) << "\n";
    }
  }

  for (const auto& [ms, list] : b.metrics) {
    auto out = detail::open_out(dir / "metrics" / (ms + ".tsv"));
    out << "microservice " << ms << "\n";
    out << "metric";
    for (const auto& s : list) out << "\t" << s.metric_name;
    out << "\nunit";
    for (const auto& s : list) out << "\t" << s.unit;
    out << "\n";
    const std::size_t len = list.empty() ? 0 : list.front().values.size();
    for (std::size_t r = 0; r < len; ++r) {
      for (std::size_t c = 0; c < list.size(); ++c) {
        out << (c ? "\t" : "") << format_double(list[c].values[r]);
      }
      out << "\n";
    }
  }

  for (const auto& [key, per] : b.edge_latencies) {
    auto out = detail::open_out(dir / "edge_latencies" /
                                (key.first + "__" + key.second + ".tsv"));
    out << "edge " << key.first << " " << key.second << "\n";
    out << "percentile";
    for (const auto& [pct, s] : per) {
      (void)s;
      out << "\t" << percentile_name(pct);
    }
    out << "\n";
    const std::size_t len = per.begin()->second.values.size();
    for (std::size_t r = 0; r < len; ++r) {
      bool first = true;
      for (const auto& [pct, s] : per) {
        (void)pct;
        out << (first ? "" : "\t") << format_double(s.values[r]);
        first = false;
      }
      out << "\n";
    }
  }

  {
    auto out = detail::open_out(dir / "label");
    out << "root_cause " << b.ground_truth << "\n";
    out << "window " << b.window.start << " " << b.window.end << "\n";
  }
}

}  // namespace edgercl

#endif  // EDGERCL_SCENARIO_IO_HPP
