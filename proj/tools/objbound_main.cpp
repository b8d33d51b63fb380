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

// Command-line driver for the objective-bounding pipeline:
//   generate -> build-dataset -> train / evaluate / sweep-lambda -> benchmark -> report
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "objbound/benchmark.hpp"
#include "objbound/error.hpp"
#include "objbound/estimator.hpp"
#include "objbound/evaluation.hpp"
#include "objbound/io.hpp"
#include "objbound/random.hpp"
#include "objbound/solver.hpp"

namespace fs = std::filesystem;
using namespace objbound;

namespace {

struct Globals {
  std::uint64_t seed = 0;
  std::string out;
  std::string problem;
  std::string model;
  std::optional<double> lambda;
  std::optional<double> alpha;
  std::string mode;
  std::int64_t budget_ms = SolveConfig{}.time_budget_ms;
  std::int64_t budget_nodes = SolveConfig{}.node_budget;

  SolveConfig solve_config() const {
    SolveConfig config;
    config.time_budget_ms = budget_ms;
    config.node_budget = budget_nodes;
    config.validate();
    return config;
  }

  std::optional<InjectMode> inject_mode() const {
    if (mode.empty()) return std::nullopt;
    return parse_inject_mode(mode);
  }

  const std::string& require_out() const {
    if (out.empty()) throw ValidationError("--out is required");
    return out;
  }

  const std::string& require_model() const {
    if (model.empty()) throw ValidationError("--model is required");
    if (!is_known_variant(model)) throw ValidationError("unknown model variant '" + model + "'");
    return model;
  }

  void check_class(ProblemClass actual) const {
    if (!problem.empty() && parse_problem_class(problem) != actual) {
      throw ValidationError("--class " + problem + " does not match the data (" +
                            std::string(to_string(actual)) + ")");
    }
  }
};

// BION_SEED wins over --seed so whole pipelines can be pinned from outside.
void apply_seed_override(Globals& g) {
  const char* env = std::getenv("BION_SEED");
  if (env == nullptr || *env == '\0') return;
  try {
    std::size_t used = 0;
    const unsigned long long value = std::stoull(env, &used);
    if (used != std::string(env).size()) throw std::invalid_argument(env);
    g.seed = value;
  } catch (const std::logic_error&) {
    throw ValidationError("BION_SEED must be a non-negative integer, got '" + std::string(env) +
                          "'");
  }
}

// Lower (underestimating) and upper (overestimating) configs of a variant.
// --alpha A sets alpha to -|A| for the upper model and +|A| for the lower.
std::pair<EstimatorConfig, EstimatorConfig> estimator_configs(const Globals& g) {
  const std::string& variant = g.require_model();
  EstimatorConfig lower = preset(variant, Direction::kUnderestimate, derive_seed(g.seed, 1));
  EstimatorConfig upper = preset(variant, Direction::kOverestimate, derive_seed(g.seed, 2));
  if (g.lambda) {
    lower.lambda = *g.lambda;
    upper.lambda = *g.lambda;
  }
  if (g.alpha) {
    lower.loss = LossSpec::shifted(std::abs(*g.alpha));
    upper.loss = LossSpec::shifted(-std::abs(*g.alpha));
  }
  lower.validate();
  upper.validate();
  return {lower, upper};
}

void write_or_print(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
  } else {
    if (const fs::path parent = fs::path(path).parent_path(); !parent.empty()) {
      fs::create_directories(parent);
    }
    write_text_file(path, text);
  }
}

void make_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir.string() + "': " + ec.message());
}

std::vector<fs::path> json_files(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError("'" + dir.string() + "' is not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

// Default instance sizes: small enough that every instance is proved optimal
// in well under a second.
SizeRange desk_sizes(ProblemClass problem) {
  switch (problem) {
    case ProblemClass::kBinPacking: return {20, 30};
    case ProblemClass::kJobshop: return {3, 4};
    case ProblemClass::kKnapsack: return {12, 22};
  }
  return {0, 0};
}

// ---------------------------------------------------------------------------

struct GenerateArgs {
  int count = 0;
  std::optional<int> min_size;
  std::optional<int> max_size;
};

void run_generate(const Globals& g, const GenerateArgs& args) {
  if (g.problem.empty()) throw ValidationError("--class is required");
  const ProblemClass problem = parse_problem_class(g.problem);
  if (args.count < 1) throw ValidationError("--count must be positive");
  SizeRange sizes = desk_sizes(problem);
  sizes.min = args.min_size.value_or(sizes.min);
  sizes.max = args.max_size.value_or(sizes.max);
  if (sizes.min > sizes.max) throw ValidationError("--min-size exceeds --max-size");

  const fs::path dir = g.require_out();
  make_directory(dir);
  for (int i = 0; i < args.count; ++i) {
    const std::uint64_t seed = derive_seed(g.seed, static_cast<std::uint64_t>(i));
    Rng rng(seed);
    const int a = static_cast<int>(uniform_int(rng, sizes.min, sizes.max));
    Instance instance;
    if (problem == ProblemClass::kJobshop) {
      const int b = static_cast<int>(uniform_int(rng, sizes.min, sizes.max));
      instance = generate_jobshop(a, b, seed);
    } else {
      instance = generate_instance(problem, a, seed);
    }
    write_instance(instance, dir / (instance.id + ".json"));
  }
  std::cerr << "wrote " << args.count << " instances to " << dir.string() << "\n";
}

struct SolveArgs {
  std::string instance;
  std::string lower;
  std::string upper;
};

void run_solve(const Globals& g, const SolveArgs& args) {
  const Instance instance = read_instance(args.instance);
  g.check_class(instance.problem);
  const FlatModel model = compile(instance);
  const SolveConfig config = g.solve_config();
  SolveResult result;
  nlohmann::json doc;
  if (args.lower.empty() != args.upper.empty()) {
    throw ValidationError("--lower and --upper must be given together");
  }
  if (!args.lower.empty()) {
    const BoundaryEstimate estimate =
        estimate_bounds(load_model(args.lower), load_model(args.upper), instance);
    const InjectMode mode = g.inject_mode().value_or(InjectMode::kBoth);
    result = solve_with_fallback(model, estimate, mode, config);
    doc["bounds"] = {estimate.est_lb, estimate.est_ub};
    doc["mode"] = std::string(to_string(mode));
  } else {
    result = solve(model, config);
  }
  doc["instance_id"] = instance.id;
  doc["result"] = solve_result_to_json(result);
  write_or_print(g.out, dump(doc));
}

struct DatasetArgs {
  std::string input;
};

void run_build_dataset(const Globals& g, const DatasetArgs& args) {
  std::vector<Instance> instances;
  for (const auto& file : json_files(args.input)) instances.push_back(read_instance(file));
  if (instances.empty()) throw DatasetError("no instance files in '" + args.input + "'");
  const Dataset dataset = build_dataset(std::move(instances), g.solve_config());
  g.check_class(dataset.problem);
  save_dataset(dataset, g.require_out());
  std::cerr << "dataset: " << dataset.size() << " solved, " << dataset.excluded_ids.size()
            << " excluded, " << dataset.schema.kept_count() << " features kept\n";
}

struct DatasetRef {
  std::string dataset;
};

Dataset open_dataset(const Globals& g, const std::string& path) {
  if (path.empty()) throw ValidationError("--dataset is required");
  Dataset dataset = load_dataset(path);
  g.check_class(dataset.problem);
  return dataset;
}

void run_train(const Globals& g, const DatasetRef& args) {
  const Dataset dataset = open_dataset(g, args.dataset);
  const auto [lower, upper] = estimator_configs(g);
  std::vector<std::size_t> all(dataset.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  const EstimatorPair pair = train_pair(dataset, all, lower, upper);
  const fs::path dir = g.require_out();
  make_directory(dir);
  save_model(pair.lower, dir / "lower.json");
  save_model(pair.upper, dir / "upper.json");
}

struct CvArgs {
  std::string dataset;
  int folds = 10;
  int repeats = 10;
};

void run_evaluate(const Globals& g, const CvArgs& args) {
  const Dataset dataset = open_dataset(g, args.dataset);
  const auto [lower, upper] = estimator_configs(g);
  const CrossValidationResult cv =
      cross_validate(dataset, lower, upper, {args.folds, args.repeats, g.seed});
  write_or_print(g.out, metrics_csv_header() +
                            metrics_csv_row(dataset.problem, g.model, "both", upper.lambda,
                                            upper.loss.alpha, cv.metrics));
}

void run_sweep(const Globals& g, const CvArgs& args) {
  const Dataset dataset = open_dataset(g, args.dataset);
  const auto [lower, upper] = estimator_configs(g);
  const std::vector<double> grid = default_lambda_grid();
  std::string csv = metrics_csv_header();
  for (const SweepRow& row :
       lambda_sweep(dataset, lower, upper, grid, {args.folds, args.repeats, g.seed})) {
    csv += metrics_csv_row(dataset.problem, g.model, "both", row.lambda, upper.loss.alpha,
                           row.metrics);
  }
  write_or_print(g.out, csv);
}

struct BenchArgs {
  std::string dataset;
  std::string training;
  std::string models;
  std::size_t n = 30;
};

void run_bench(const Globals& g, const BenchArgs& args) {
  const Dataset held_out = open_dataset(g, args.dataset);
  if (args.models.empty()) throw ValidationError("--models is required");
  std::vector<std::string> training_ids;
  if (!args.training.empty()) {
    for (const auto& instance : load_dataset(args.training).instances) {
      training_ids.push_back(instance.id);
    }
  }
  const fs::path models = args.models;
  const EstimatorPair pair{load_model(models / "lower.json"), load_model(models / "upper.json")};

  BenchmarkOptions options;
  options.n_instances = args.n;
  options.mode = g.inject_mode();
  options.solve = g.solve_config();
  options.seed = g.seed;
  const BenchmarkResult result = run_benchmark(held_out.instances, training_ids, pair, options);

  const fs::path dir = g.require_out();
  make_directory(dir);
  write_text_file(dir / "benchmark.csv", benchmark_csv(result.records));
  write_text_file(dir / "runs.json", dump(benchmark_runs_json(result)));
  std::cerr << "benchmark: " << result.records.size() << " runs, " << result.skipped_ids.size()
            << " skipped\n";
}

struct ReportArgs {
  std::vector<std::string> metrics;
  std::vector<std::string> benchmark;
};

std::optional<CsvTable> merged_csv(const std::vector<std::string>& paths) {
  std::optional<CsvTable> merged;
  for (const auto& path : paths) {
    CsvTable table = parse_csv(read_text_file(path));
    if (!merged) {
      merged = std::move(table);
    } else if (table.header != merged->header) {
      throw ParseError("'" + path + "' has a different CSV header", "");
    } else {
      merged->rows.insert(merged->rows.end(), table.rows.begin(), table.rows.end());
    }
  }
  return merged;
}

void run_report(const Globals& g, const ReportArgs& args) {
  if (args.metrics.empty() && args.benchmark.empty()) {
    throw ValidationError("report needs --metrics and/or --benchmark");
  }
  const auto metrics = merged_csv(args.metrics);
  const auto benchmark = merged_csv(args.benchmark);
  write_or_print(g.out, markdown_report(metrics ? &*metrics : nullptr,
                                        benchmark ? &*benchmark : nullptr));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learned objective bounds for constraint optimization problems"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--seed", g.seed, "Master seed (BION_SEED overrides)");
  app.add_option("--out", g.out, "Output file or directory");
  app.add_option("--class", g.problem, "Problem class")
      ->check(CLI::IsMember({"bin-packing", "jobshop", "knapsack"}));
  app.add_option("--model", g.model, "Model variant")
      ->check(CLI::IsMember({"LR", "GTB_s", "GTB_a", "NN_s", "NN_a"}));
  app.add_option("--lambda", g.lambda, "Label shift in [0, 1)");
  app.add_option("--alpha", g.alpha, "Loss asymmetry magnitude in [0, 1]");
  app.add_option("--mode", g.mode, "Bound injection mode")
      ->check(CLI::IsMember({"both", "upper"}));
  app.add_option("--budget-ms", g.budget_ms, "Solver time budget per run");
  app.add_option("--budget-nodes", g.budget_nodes, "Solver node budget per run");

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Write random instances");
  generate->add_option("--count", gen.count, "Number of instances")->required();
  generate->add_option("--min-size", gen.min_size, "Smallest size");
  generate->add_option("--max-size", gen.max_size, "Largest size");

  SolveArgs sol;
  auto* solve_cmd = app.add_subcommand("solve", "Solve one instance");
  solve_cmd->add_option("instance", sol.instance, "Instance file")->required();
  solve_cmd->add_option("--lower", sol.lower, "Underestimating model file");
  solve_cmd->add_option("--upper", sol.upper, "Overestimating model file");

  DatasetArgs ds;
  auto* build = app.add_subcommand("build-dataset", "Solve instances into a dataset");
  build->add_option("--in", ds.input, "Directory of instance files")->required();

  DatasetRef tr;
  auto* train_cmd = app.add_subcommand("train", "Train the lower/upper estimator pair");
  train_cmd->add_option("--dataset", tr.dataset, "Dataset file")->required();

  CvArgs ev;
  auto* evaluate = app.add_subcommand("evaluate", "Repeated k-fold estimation quality");
  evaluate->add_option("--dataset", ev.dataset, "Dataset file")->required();
  evaluate->add_option("--folds", ev.folds, "Folds per repeat");
  evaluate->add_option("--repeats", ev.repeats, "Repeats");

  CvArgs sw;
  auto* sweep = app.add_subcommand("sweep-lambda", "Estimation quality over the lambda grid");
  sweep->add_option("--dataset", sw.dataset, "Dataset file")->required();
  sweep->add_option("--folds", sw.folds, "Folds per repeat");
  sweep->add_option("--repeats", sw.repeats, "Repeats");

  BenchArgs bench;
  auto* benchmark = app.add_subcommand("benchmark", "Solver runs with and without bounds");
  benchmark->add_option("--dataset", bench.dataset, "Solved held-out dataset")->required();
  benchmark->add_option("--training", bench.training, "Dataset the models were trained on");
  benchmark->add_option("--models", bench.models, "Directory with lower.json and upper.json")
      ->required();
  benchmark->add_option("--instances", bench.n, "Instances to run");

  ReportArgs rep;
  auto* report = app.add_subcommand("report", "Markdown summary of metric and benchmark CSVs");
  report->add_option("--metrics", rep.metrics, "Metrics CSV files");
  report->add_option("--benchmark", rep.benchmark, "Benchmark CSV files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    apply_seed_override(g);
    if (*generate) run_generate(g, gen);
    if (*solve_cmd) run_solve(g, sol);
    if (*build) run_build_dataset(g, ds);
    if (*train_cmd) run_train(g, tr);
    if (*evaluate) run_evaluate(g, ev);
    if (*sweep) run_sweep(g, sw);
    if (*benchmark) run_bench(g, bench);
    if (*report) run_report(g, rep);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
