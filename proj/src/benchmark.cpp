// Copyright 2026 The objbound Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "objbound/benchmark.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include "objbound/error.hpp"
#include "objbound/random.hpp"

namespace objbound {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr Percent kUndefined{kNaN, true};
}  // namespace

std::string_view to_string(RunLabel label) {
  switch (label) {
    case RunLabel::kOriginal: return "original";
    case RunLabel::kBoth: return "both";
    case RunLabel::kUpper: return "upper";
    case RunLabel::kFixed: return "fixed";
  }
  return "?";
}

RunLabel parse_run_label(std::string_view name) {
  for (const RunLabel label : kAllRunLabels) {
    if (to_string(label) == name) return label;
  }
  throw ValidationError("unknown run configuration '" + std::string(name) + "'");
}

FixedBound fixed_upper_bound(std::int64_t z_opt, std::int64_t z_first, Sense sense) {
  // Both operands of the halving are non-negative when z_first is feasible.
  const std::int64_t distance =
      sense == Sense::kMinimize ? z_first - z_opt : z_opt - z_first;
  if (distance < 0) {
    throw ValidationError("first solution is better than the optimum");
  }
  const std::int64_t half = distance / 2;
  return {sense == Sense::kMinimize ? z_opt + half : z_opt - half, distance == 0};
}

double relative_change(double bounded, double original) {
  if (original == 0.0) return kNaN;
  return (bounded - original) / original * 100.0;
}

namespace {

double effort_of(const Incumbent& incumbent, Effort effort) {
  return effort == Effort::kTime ? incumbent.elapsed_ms
                                 : static_cast<double>(incumbent.nodes);
}

double total_effort(const SolveResult& result, Effort effort) {
  return effort == Effort::kTime ? result.elapsed_ms
                                 : static_cast<double>(result.nodes_explored);
}

bool at_least_as_good(std::int64_t candidate, std::int64_t reference, Sense sense) {
  return sense == Sense::kMinimize ? candidate <= reference : candidate >= reference;
}

Percent checked(double value, bool flagged) {
  return {value, flagged || std::isnan(value)};
}

}  // namespace

Percent equivalent_solution(const SolveResult& original, const SolveResult& bounded,
                            Sense sense, Effort effort) {
  if (!bounded.first_solution || !original.first_solution) return kUndefined;
  const Incumbent& target = *bounded.first_solution;
  const double mine = effort_of(target, effort);
  for (const Incumbent& step : original.timeline) {
    if (at_least_as_good(step.objective, target.objective, sense)) {
      return checked(relative_change(mine, effort_of(step, effort)), false);
    }
  }
  return checked(relative_change(mine, total_effort(original, effort)), true);
}

Percent quality_of_first(std::optional<std::int64_t> z_bounds,
                         std::optional<std::int64_t> z_original) {
  if (!z_bounds || !z_original || *z_original == 0) return kUndefined;
  const double ratio = static_cast<double>(*z_bounds) / static_cast<double>(*z_original);
  return {(1.0 - ratio) * 100.0, false};
}

Percent time_to_completion(const SolveResult& original, const SolveResult& bounded,
                           Effort effort) {
  if (original.status != SolveStatus::kOptimal || bounded.status != SolveStatus::kOptimal) {
    return kUndefined;
  }
  return checked(relative_change(total_effort(bounded, effort), total_effort(original, effort)),
                 false);
}

std::vector<RunLabel> selected_labels(std::optional<InjectMode> mode) {
  if (!mode) return {kAllRunLabels.begin(), kAllRunLabels.end()};
  return {RunLabel::kOriginal, *mode == InjectMode::kBoth ? RunLabel::kBoth : RunLabel::kUpper,
          RunLabel::kFixed};
}

namespace {

std::optional<std::int64_t> first_objective(const SolveResult& result) {
  if (!result.first_solution) return std::nullopt;
  return result.first_solution->objective;
}

RunMetrics compare(const SolveResult& original, const SolveResult& bounded, Sense sense) {
  return {equivalent_solution(original, bounded, sense, Effort::kTime),
          equivalent_solution(original, bounded, sense, Effort::kNodes),
          quality_of_first(first_objective(bounded), first_objective(original)),
          time_to_completion(original, bounded, Effort::kTime),
          time_to_completion(original, bounded, Effort::kNodes)};
}

}  // namespace

BenchmarkResult run_benchmark(std::span<const Instance> held_out,
                              std::span<const std::string> training_ids,
                              const EstimatorPair& models, const BenchmarkOptions& options) {
  options.solve.validate();
  const std::set<std::string> training(training_ids.begin(), training_ids.end());
  for (const auto& instance : held_out) {
    if (training.contains(instance.id)) {
      throw DatasetError("benchmark instance '" + instance.id + "' was used for training");
    }
  }

  std::vector<std::size_t> order(held_out.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(derive_seed(options.seed, 0x42454e43));
  shuffle(std::span<std::size_t>(order), rng);
  order.resize(std::min(order.size(), options.n_instances));
  std::sort(order.begin(), order.end());

  BenchmarkResult out;
  const std::vector<RunLabel> labels = selected_labels(options.mode);
  for (const std::size_t index : order) {
    const Instance& instance = held_out[index];
    if (!instance.known_optimum) {
      out.skipped_ids.push_back(instance.id);
      continue;
    }
    const Sense sense = instance.sense();
    const FlatModel model = compile(instance);
    const BoundaryEstimate domain = original_domain(instance);
    const BoundaryEstimate estimate = estimate_bounds(models.lower, models.upper, instance);

    const SolveResult original = solve(model, options.solve);
    out.records.push_back({instance.problem, instance.id, RunLabel::kOriginal, domain, original,
                           std::nullopt, false});

    for (const RunLabel label : labels) {
      if (label == RunLabel::kOriginal) continue;
      BenchmarkRecord record{instance.problem, instance.id, label, estimate, {}, {}, false};
      InjectMode mode = label == RunLabel::kBoth ? InjectMode::kBoth : InjectMode::kUpperOnly;
      if (label == RunLabel::kFixed) {
        const std::int64_t z_opt = *instance.known_optimum;
        // Without a first solution the bound collapses onto the optimum.
        const FixedBound fixed =
            fixed_upper_bound(z_opt, first_objective(original).value_or(z_opt), sense);
        record.degenerate_fixed = fixed.degenerate;
        record.bounds = domain;
        (sense == Sense::kMinimize ? record.bounds.est_ub : record.bounds.est_lb) = fixed.value;
      }
      record.result = solve_with_fallback(model, record.bounds, mode, options.solve);
      record.metrics = compare(original, record.result, sense);
      out.records.push_back(std::move(record));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

std::string optional_number(const std::optional<std::int64_t>& value) {
  return value ? std::to_string(*value) : std::string();
}

}  // namespace

std::string benchmark_csv_header() {
  return "class,instance_id,config,status,best_obj,first_obj,first_ms,first_nodes,total_ms,"
         "total_nodes,fallback_used,eqtime_pct,eqnodes_pct,qof_pct,ttc_pct,ttc_nodes_pct\n";
}

std::string benchmark_csv_row(const BenchmarkRecord& record) {
  const SolveResult& r = record.result;
  const auto& first = r.first_solution;
  const auto cell = [&record](Percent RunMetrics::*field) {
    return record.metrics ? format_number(((*record.metrics).*field).value) : std::string();
  };
  std::ostringstream out;
  out << to_string(record.problem) << ',' << record.instance_id << ',' << to_string(record.label)
      << ',' << to_string(r.status) << ',' << optional_number(r.best_objective) << ','
      << (first ? std::to_string(first->objective) : "") << ','
      << (first ? format_number(first->elapsed_ms) : "") << ','
      << (first ? std::to_string(first->nodes) : "") << ',' << format_number(r.elapsed_ms) << ','
      << r.nodes_explored << ',' << (r.fallback_used ? "true" : "false") << ','
      << cell(&RunMetrics::eqtime) << ',' << cell(&RunMetrics::eqnodes) << ','
      << cell(&RunMetrics::qof) << ',' << cell(&RunMetrics::ttc) << ','
      << cell(&RunMetrics::ttc_nodes) << '\n';
  return out.str();
}

std::string benchmark_csv(std::span<const BenchmarkRecord> records) {
  std::string out = benchmark_csv_header();
  for (const auto& record : records) out += benchmark_csv_row(record);
  return out;
}

namespace {

nlohmann::json percent_json(const Percent& p) {
  return {{"value", std::isnan(p.value) ? nlohmann::json(nullptr) : nlohmann::json(p.value)},
          {"flagged", p.flagged}};
}

}  // namespace

nlohmann::json benchmark_runs_json(const BenchmarkResult& result) {
  nlohmann::json runs = nlohmann::json::array();
  for (const auto& record : result.records) {
    nlohmann::json entry = {{"class", std::string(to_string(record.problem))},
                            {"instance_id", record.instance_id},
                            {"config", std::string(to_string(record.label))},
                            {"bounds", {record.bounds.est_lb, record.bounds.est_ub}},
                            {"result", solve_result_to_json(record.result)}};
    if (record.label == RunLabel::kFixed) entry["degenerate_fixed"] = record.degenerate_fixed;
    if (record.metrics) {
      const RunMetrics& m = *record.metrics;
      entry["metrics"] = {{"eqtime_pct", percent_json(m.eqtime)},
                          {"eqnodes_pct", percent_json(m.eqnodes)},
                          {"qof_pct", percent_json(m.qof)},
                          {"ttc_pct", percent_json(m.ttc)},
                          {"ttc_nodes_pct", percent_json(m.ttc_nodes)}};
    }
    runs.push_back(std::move(entry));
  }
  return {{"runs", std::move(runs)}, {"skipped", result.skipped_ids}};
}

// ---------------------------------------------------------------------------

std::size_t CsvTable::column(std::string_view name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw ParseError("missing CSV column '" + std::string(name) + "'", "");
  return static_cast<std::size_t>(it - header.begin());
}

namespace {

std::vector<std::string> split_line(std::string_view line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    cells.emplace_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

}  // namespace

CsvTable parse_csv(std::string_view text) {
  CsvTable table;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const std::size_t end = text.find('\n');
    std::string_view line = text.substr(0, end);
    text = end == std::string_view::npos ? std::string_view() : text.substr(end + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    ++line_no;
    if (line.empty()) continue;
    auto cells = split_line(line);
    if (table.header.empty()) {
      table.header = std::move(cells);
    } else if (cells.size() != table.header.size()) {
      throw ParseError("CSV line " + std::to_string(line_no) + " has " +
                           std::to_string(cells.size()) + " cells, expected " +
                           std::to_string(table.header.size()),
                       "");
    } else {
      table.rows.push_back(std::move(cells));
    }
  }
  if (table.header.empty()) throw ParseError("empty CSV", "");
  return table;
}

std::string format_csv(const CsvTable& table) {
  const auto join = [](const std::vector<std::string>& cells) {
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i > 0) line += ',';
      line += cells[i];
    }
    return line + '\n';
  };
  std::string out = join(table.header);
  for (const auto& row : table.rows) out += join(row);
  return out;
}

CsvTable drop_columns(const CsvTable& table, std::span<const std::string_view> names) {
  std::vector<bool> keep(table.header.size(), true);
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    keep[c] = std::find(names.begin(), names.end(), table.header[c]) == names.end();
  }
  const auto filter = [&keep](const std::vector<std::string>& cells) {
    std::vector<std::string> out;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (keep[c]) out.push_back(cells[c]);
    }
    return out;
  };
  CsvTable out{filter(table.header), {}};
  for (const auto& row : table.rows) out.rows.push_back(filter(row));
  return out;
}

namespace {

std::optional<double> parse_cell(const std::string& cell) {
  if (cell.empty() || cell == "nan") return std::nullopt;
  try {
    std::size_t used = 0;
    const double value = std::stod(cell, &used);
    if (used != cell.size()) throw ParseError("malformed number '" + cell + "'", "");
    return value;
  } catch (const std::logic_error&) {
    throw ParseError("malformed number '" + cell + "'", "");
  }
}

}  // namespace

std::vector<ConfigAverages> benchmark_averages(const CsvTable& table) {
  const std::size_t class_col = table.column("class");
  const std::size_t config_col = table.column("config");
  std::array<std::size_t, 5> metric_cols{};
  for (std::size_t m = 0; m < metric_cols.size(); ++m) {
    metric_cols[m] = table.column(kBenchmarkMetricColumns[m]);
  }

  std::vector<std::string> classes;
  for (const auto& row : table.rows) {
    if (std::find(classes.begin(), classes.end(), row[class_col]) == classes.end()) {
      classes.push_back(row[class_col]);
    }
  }
  std::vector<ConfigAverages> out;
  for (const auto& problem : classes) {
    for (const RunLabel label : kAllRunLabels) {
      ConfigAverages avg{problem, std::string(to_string(label)), 0, {}, {}};
      std::array<double, 5> sum{};
      for (const auto& row : table.rows) {
        if (row[class_col] != problem || row[config_col] != avg.config) continue;
        ++avg.runs;
        for (std::size_t m = 0; m < metric_cols.size(); ++m) {
          if (const auto v = parse_cell(row[metric_cols[m]])) {
            sum[m] += *v;
            ++avg.defined[m];
          }
        }
      }
      if (avg.runs == 0) continue;
      for (std::size_t m = 0; m < sum.size(); ++m) {
        avg.mean[m] = avg.defined[m] > 0 ? sum[m] / static_cast<double>(avg.defined[m]) : kNaN;
      }
      out.push_back(std::move(avg));
    }
  }
  return out;
}

namespace {

std::string fixed2(double value) {
  if (std::isnan(value)) return "n/a";
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(2);
  out << value;
  return out.str();
}

std::string metrics_section(const CsvTable& metrics) {
  const std::size_t class_col = metrics.column("class");
  const std::size_t model_col = metrics.column("model");
  const std::size_t dir_col = metrics.column("direction");
  const std::size_t lambda_col = metrics.column("lambda");
  const std::array<std::string_view, 6> cols = {"admissible_med", "admissible_mad", "gap_med",
                                                "gap_mad", "size_med", "size_mad"};
  std::ostringstream out;
  out << "## Estimation quality (median, MAD over 10x10 cross-validation)\n\n"
      << "| class | model | direction | lambda | admissible % | gap reduction % | "
         "size reduction % | excluded |\n"
      << "|---|---|---|---|---|---|---|---|\n";
  for (const auto& row : metrics.rows) {
    const auto cell = [&](std::size_t i) {
      const auto v = parse_cell(row[metrics.column(cols[i])]);
      return fixed2(v.value_or(kNaN));
    };
    out << "| " << row[class_col] << " | " << row[model_col] << " | " << row[dir_col] << " | "
        << row[lambda_col] << " | " << cell(0) << " (" << cell(1) << ") | " << cell(2) << " ("
        << cell(3) << ") | " << cell(4) << " (" << cell(5) << ") | "
        << row[metrics.column("n_excluded")] << " |\n";
  }
  return out.str();
}

std::string benchmark_section(const CsvTable& benchmark) {
  const auto averages = benchmark_averages(benchmark);
  std::ostringstream out;
  out << "## Effect of boundaries on solver performance (%, averaged per class)\n\n"
      << "Negative values mean the bounded run needed less effort or found a better first "
         "solution when minimizing. Node-based columns are deterministic; time-based columns "
         "are wall clock. Cells count only instances where the metric is defined "
         "(defined/runs in parentheses when some are missing).\n\n"
      << "| class | config | runs | eq. time | eq. nodes | quality of first | "
         "time to completion | nodes to completion |\n"
      << "|---|---|---|---|---|---|---|---|\n";
  for (const auto& avg : averages) {
    out << "| " << avg.problem << " | " << avg.config << " | " << avg.runs;
    for (std::size_t m = 0; m < avg.mean.size(); ++m) {
      if (avg.config == "original") {
        out << " | -";
        continue;
      }
      out << " | " << fixed2(avg.mean[m]);
      if (avg.defined[m] != avg.runs) out << " (" << avg.defined[m] << '/' << avg.runs << ')';
    }
    out << " |\n";
  }
  out << "\nAll runs use the same single built-in solver, so solver-specific differences "
         "in how bounds pay off cannot be observed here.\n";
  return out.str();
}

}  // namespace

std::string markdown_report(const CsvTable* metrics, const CsvTable* benchmark) {
  std::string out = "# objbound report\n";
  if (metrics) out += "\n" + metrics_section(*metrics);
  if (benchmark) out += "\n" + benchmark_section(*benchmark);
  return out;
}

}  // namespace objbound
