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

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "objbound/cop.hpp"
#include "objbound/evaluation.hpp"
#include "objbound/solver.hpp"

namespace objbound {

enum class RunLabel { kOriginal, kBoth, kUpper, kFixed };

inline constexpr std::array<RunLabel, 4> kAllRunLabels = {
    RunLabel::kOriginal, RunLabel::kBoth, RunLabel::kUpper, RunLabel::kFixed};

std::string_view to_string(RunLabel label);
RunLabel parse_run_label(std::string_view name);

struct FixedBound {
  std::int64_t value;
  bool degenerate;  // z_first == z_opt
};

// Midpoint between the optimum and the first incumbent of the unbounded run,
// rounded toward the optimum.
FixedBound fixed_upper_bound(std::int64_t z_opt, std::int64_t z_first, Sense sense);

// A percentage that may be undefined (NaN) or computed against a fallback
// reference; both cases set `flagged`.
struct Percent {
  double value;
  bool flagged;
};

// (bounded - original) / original * 100. NaN when original == 0.
double relative_change(double bounded, double original);

enum class Effort { kTime, kNodes };

// Effort the original run needed to first reach an objective at least as good
// as the bounded run's first solution, compared to the bounded run's effort
// for that solution. Falls back to the original run's total effort (flagged)
// when it never got there; NaN (flagged) when the bounded run found nothing.
Percent equivalent_solution(const SolveResult& original, const SolveResult& bounded,
                            Sense sense, Effort effort);

// (1 - z_bounds / z_original) * 100; NaN (flagged) without both solutions or
// when z_original == 0.
Percent quality_of_first(std::optional<std::int64_t> z_bounds,
                         std::optional<std::int64_t> z_original);

// Relative total effort; NaN (flagged) unless both runs ended optimal.
Percent time_to_completion(const SolveResult& original, const SolveResult& bounded,
                           Effort effort);

struct RunMetrics {
  Percent eqtime;
  Percent eqnodes;
  Percent qof;
  Percent ttc;
  Percent ttc_nodes;
};

struct BenchmarkRecord {
  ProblemClass problem;
  std::string instance_id;
  RunLabel label;
  BoundaryEstimate bounds;  // what was injected; the original domain for kOriginal
  SolveResult result;
  std::optional<RunMetrics> metrics;  // absent for kOriginal
  bool degenerate_fixed = false;
};

struct BenchmarkOptions {
  std::size_t n_instances = 30;
  std::optional<InjectMode> mode;  // unset runs both bounded variants
  SolveConfig solve;
  std::uint64_t seed = 0;
};

struct BenchmarkResult {
  std::vector<BenchmarkRecord> records;
  std::vector<std::string> skipped_ids;  // no known optimum
};

// Picks n_instances of `held_out` at random (seeded), in their original
// order, and runs each in the selected configurations. Throws DatasetError if
// a held-out id also appears in `training_ids` or the classes disagree with
// the models.
BenchmarkResult run_benchmark(std::span<const Instance> held_out,
                              std::span<const std::string> training_ids,
                              const EstimatorPair& models, const BenchmarkOptions& options);

std::vector<RunLabel> selected_labels(std::optional<InjectMode> mode);

std::string benchmark_csv_header();
std::string benchmark_csv_row(const BenchmarkRecord& record);
std::string benchmark_csv(std::span<const BenchmarkRecord> records);

nlohmann::json benchmark_runs_json(const BenchmarkResult& result);

// Columns that depend on wall-clock time.
inline constexpr std::array<std::string_view, 4> kWallClockColumns = {
    "first_ms", "total_ms", "eqtime_pct", "ttc_pct"};

// ---------------------------------------------------------------------------
// Reports, computed from emitted CSV text only.

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(std::string_view name) const;  // throws ParseError
};

// Plain comma-separated text without quoting, as emitted by this library.
CsvTable parse_csv(std::string_view text);
std::string format_csv(const CsvTable& table);
CsvTable drop_columns(const CsvTable& table, std::span<const std::string_view> names);

struct ConfigAverages {
  std::string problem;
  std::string config;
  std::size_t runs = 0;
  // Mean over defined entries, with the defined count; NaN if none.
  std::array<double, 5> mean{};
  std::array<std::size_t, 5> defined{};
};

inline constexpr std::array<std::string_view, 5> kBenchmarkMetricColumns = {
    "eqtime_pct", "eqnodes_pct", "qof_pct", "ttc_pct", "ttc_nodes_pct"};

// One entry per (class, config) present, classes in order of appearance and
// configs in canonical order.
std::vector<ConfigAverages> benchmark_averages(const CsvTable& table);

// Markdown with a solver-effect table (rows: configurations, one column
// group per class) and, if given, an estimation-quality table built from a
// metrics CSV.
std::string markdown_report(const CsvTable* metrics, const CsvTable* benchmark);

}  // namespace objbound
