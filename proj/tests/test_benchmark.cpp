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

#include <doctest.h>

#include <cmath>
#include <numeric>
#include <set>

#include "objbound/benchmark.hpp"
#include "objbound/random.hpp"
#include "objbound/error.hpp"
#include "oracles.hpp"

using namespace objbound;

namespace {

SolveResult run(std::vector<Incumbent> timeline, double total_ms, std::int64_t total_nodes,
                SolveStatus status = SolveStatus::kOptimal) {
  SolveResult r;
  r.status = status;
  r.timeline = std::move(timeline);
  if (!r.timeline.empty()) {
    r.first_solution = r.timeline.front();
    r.best_objective = r.timeline.back().objective;
  }
  r.elapsed_ms = total_ms;
  r.nodes_explored = total_nodes;
  return r;
}

std::vector<Instance> solved(ProblemClass p, int size, std::size_t count, std::uint64_t stream) {
  std::vector<Instance> out;
  for (std::uint64_t i = 0; i < count; ++i) {
    Instance x = generate_instance(p, size, derive_seed(stream, i));
    x.id = std::string(to_string(p)) + "-" + std::to_string(stream) + "-" + std::to_string(i);
    x.known_optimum = oracle::optimum(x);
    out.push_back(std::move(x));
  }
  return out;
}

}  // namespace

TEST_CASE("fixed upper bound sits halfway toward the first solution") {
  const FixedBound a = fixed_upper_bound(10, 20, Sense::kMinimize);
  CHECK(a.value == 15);
  CHECK_FALSE(a.degenerate);
  CHECK(fixed_upper_bound(10, 21, Sense::kMinimize).value == 15);
  const FixedBound b = fixed_upper_bound(10, 10, Sense::kMinimize);
  CHECK(b.value == 10);
  CHECK(b.degenerate);
  CHECK(fixed_upper_bound(20, 15, Sense::kMaximize).value == 18);
  CHECK_THROWS_AS(fixed_upper_bound(10, 9, Sense::kMinimize), ValidationError);
}

TEST_CASE("equivalent-solution effort") {
  // The original run reaches 30 after 40 ms / 400 nodes.
  const SolveResult original = run({{50, 10, 100}, {30, 40, 400}, {25, 90, 900}}, 100, 1000);
  const SolveResult fast = run({{30, 20, 200}}, 50, 500);
  const Percent t = equivalent_solution(original, fast, Sense::kMinimize, Effort::kTime);
  CHECK(t.value == doctest::Approx(-50.0));
  CHECK_FALSE(t.flagged);
  CHECK(equivalent_solution(original, fast, Sense::kMinimize, Effort::kNodes).value ==
        doctest::Approx(-50.0));

  // A better first solution than anything seen at 40 ms: compared with 25 at 90 ms.
  const SolveResult better = run({{26, 90, 900}}, 95, 950);
  CHECK(equivalent_solution(original, better, Sense::kMinimize, Effort::kTime).value ==
        doctest::Approx(0.0));

  // Never reached by the original run: measured against its total effort.
  const SolveResult best = run({{20, 200, 2000}}, 300, 3000);
  const Percent never = equivalent_solution(original, best, Sense::kMinimize, Effort::kTime);
  CHECK(never.value == doctest::Approx(100.0));
  CHECK(never.flagged);

  const Percent none = equivalent_solution(original, run({}, 5, 5, SolveStatus::kBudgetExhausted),
                                           Sense::kMinimize, Effort::kTime);
  CHECK(std::isnan(none.value));
  CHECK(none.flagged);

  // Maximizing flips "at least as good".
  const SolveResult up = run({{10, 10, 10}, {30, 40, 40}}, 100, 100);
  CHECK(equivalent_solution(up, run({{20, 10, 10}}, 20, 20), Sense::kMaximize, Effort::kNodes)
            .value == doctest::Approx(-75.0));
}

TEST_CASE("quality of the first solution") {
  CHECK(quality_of_first(60, 100).value == doctest::Approx(40.0));
  CHECK(quality_of_first(100, 100).value == 0.0);
  CHECK(quality_of_first(50, 30).value == doctest::Approx(-200.0 / 3.0));
  CHECK(std::isnan(quality_of_first(std::nullopt, 30).value));
  CHECK(quality_of_first(std::nullopt, 30).flagged);
  CHECK(std::isnan(quality_of_first(5, 0).value));
}

TEST_CASE("time to completion") {
  const SolveResult original = run({{5, 1, 1}}, 100, 1000);
  CHECK(time_to_completion(original, run({{5, 1, 1}}, 80, 800), Effort::kTime).value ==
        doctest::Approx(-20.0));
  CHECK(time_to_completion(original, run({{5, 1, 1}}, 100, 1000), Effort::kNodes).value == 0.0);
  const Percent open = time_to_completion(
      original, run({{5, 1, 1}}, 100, 1000, SolveStatus::kBudgetExhausted), Effort::kTime);
  CHECK(std::isnan(open.value));
  CHECK(open.flagged);
  CHECK(std::isnan(relative_change(3, 0)));
}

TEST_CASE("run labels per mode") {
  CHECK(selected_labels(InjectMode::kUpperOnly) ==
        std::vector<RunLabel>{RunLabel::kOriginal, RunLabel::kUpper, RunLabel::kFixed});
  CHECK(selected_labels(InjectMode::kBoth) ==
        std::vector<RunLabel>{RunLabel::kOriginal, RunLabel::kBoth, RunLabel::kFixed});
  CHECK(selected_labels(std::nullopt).size() == 4);
  for (const auto label : kAllRunLabels) CHECK(parse_run_label(to_string(label)) == label);
}

TEST_CASE("benchmark runs, CSV and report") {
  const auto training = solved(ProblemClass::kKnapsack, 6, 24, 1);
  const auto held_out = solved(ProblemClass::kKnapsack, 6, 8, 2);
  const Dataset data = dataset_from_solved(ProblemClass::kKnapsack, training);
  std::vector<std::size_t> all(training.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  const EstimatorPair models = train_pair(data, all, preset("LR", Direction::kUnderestimate),
                                          preset("LR", Direction::kOverestimate));
  std::vector<std::string> training_ids;
  for (const auto& x : training) training_ids.push_back(x.id);

  BenchmarkOptions options;
  options.n_instances = 5;
  options.seed = 9;
  const BenchmarkResult result = run_benchmark(held_out, training_ids, models, options);
  REQUIRE(result.records.size() == 5 * 4);

  std::set<std::string> ids;
  for (const auto& r : result.records) {
    ids.insert(r.instance_id);
    const Instance& instance = *std::find_if(held_out.begin(), held_out.end(),
                                             [&](const Instance& x) { return x.id == r.instance_id; });
    CHECK(r.result.status == SolveStatus::kOptimal);
    CHECK(r.result.best_objective == instance.known_optimum);
    CHECK(r.metrics.has_value() == (r.label != RunLabel::kOriginal));
    if (r.label == RunLabel::kFixed) {
      // The fixed bound lies between the optimum and a feasible value.
      CHECK_FALSE(r.result.fallback_used);
      CHECK(r.bounds.est_ub == instance.objective_ub);
      CHECK(r.bounds.est_lb <= *instance.known_optimum);
    }
  }
  CHECK(ids.size() == 5);

  // Same seed, same selection.
  const BenchmarkResult again = run_benchmark(held_out, training_ids, models, options);
  for (std::size_t i = 0; i < result.records.size(); ++i) {
    CHECK(again.records[i].instance_id == result.records[i].instance_id);
    CHECK(again.records[i].result.nodes_explored == result.records[i].result.nodes_explored);
  }

  const CsvTable table = parse_csv(benchmark_csv(result.records));
  CHECK(format_csv(table) == benchmark_csv(result.records));
  CHECK(table.header.size() == 16);
  CHECK(table.rows.size() == 20);
  for (const auto& row : table.rows) {
    const bool original = row[table.column("config")] == "original";
    CHECK(row[table.column("qof_pct")].empty() == original);
  }
  const CsvTable stable = drop_columns(table, kWallClockColumns);
  CHECK(stable.header.size() == 12);
  CHECK_THROWS_AS(stable.column("first_ms"), ParseError);

  // Averages recomputed by hand from the node column.
  const auto averages = benchmark_averages(table);
  REQUIRE(averages.size() == 4);
  const auto col = table.column("eqnodes_pct");
  for (const auto& avg : averages) {
    double sum = 0;
    std::size_t n = 0;
    for (const auto& row : table.rows) {
      if (row[table.column("config")] != avg.config || row[col].empty() || row[col] == "nan") continue;
      sum += std::stod(row[col]);
      ++n;
    }
    CHECK(avg.runs == 5);
    CHECK(avg.defined[1] == n);
    if (n > 0) CHECK(avg.mean[1] == doctest::Approx(sum / static_cast<double>(n)));
  }

  const std::string report = markdown_report(nullptr, &table);
  std::size_t rows = 0;
  for (std::size_t at = report.find("\n| knapsack |"); at != std::string::npos;
       at = report.find("\n| knapsack |", at + 1)) {
    ++rows;
  }
  CHECK(rows == 4);

  const auto json = benchmark_runs_json(result);
  CHECK(json.at("runs").size() == 20);

  BenchmarkOptions upper = options;
  upper.mode = InjectMode::kUpperOnly;
  const BenchmarkResult only = run_benchmark(held_out, training_ids, models, upper);
  for (const auto& r : only.records) CHECK(r.label != RunLabel::kBoth);
  CHECK(only.records.size() == 15);

  CHECK_THROWS_AS(run_benchmark(training, training_ids, models, options), DatasetError);
}
