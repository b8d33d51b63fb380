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

#include "objbound/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include "objbound/error.hpp"
#include "objbound/io.hpp"
#include "objbound/random.hpp"

namespace objbound {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

std::uint64_t Dataset::hash() const {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  const auto mix = [&hash](std::string_view bytes) {
    for (const unsigned char c : bytes) {
      hash ^= c;
      hash *= 0x100000001b3ULL;
    }
  };
  mix(to_string(problem));
  for (const auto& instance : instances) {
    mix(instance.id);
    mix("=");
    mix(std::to_string(instance.known_optimum.value_or(0)));
    mix(";");
  }
  return hash;
}

Dataset dataset_from_solved(ProblemClass problem, std::vector<Instance> instances,
                            std::vector<std::string> excluded_ids) {
  if (instances.size() < kMinDatasetSize) {
    throw DatasetError("dataset needs at least " + std::to_string(kMinDatasetSize) +
                       " solved instances, got " + std::to_string(instances.size()));
  }
  Dataset dataset;
  dataset.problem = problem;
  dataset.excluded_ids = std::move(excluded_ids);
  for (auto& instance : instances) {
    if (instance.problem != problem) throw DatasetError("dataset mixes problem classes");
    if (!instance.known_optimum) {
      throw DatasetError("instance '" + instance.id + "' has no known optimum");
    }
    dataset.raw.push_back(extract_features(instance));
  }
  dataset.instances = std::move(instances);
  dataset.schema = fit_schema(dataset.raw);
  return dataset;
}

Dataset build_dataset(std::vector<Instance> instances, const SolveConfig& budget) {
  try {
    budget.validate();
  } catch (const ValidationError& e) {
    throw DatasetError(e.what());
  }
  if (instances.empty()) throw DatasetError("no instances given");
  const ProblemClass problem = instances.front().problem;
  std::vector<Instance> solved;
  std::vector<std::string> excluded;
  for (auto& instance : instances) {
    if (instance.problem != problem) throw DatasetError("dataset mixes problem classes");
    if (!instance.known_optimum) {
      const SolveResult result = solve(compile(instance), budget);
      if (result.status != SolveStatus::kOptimal) {
        excluded.push_back(instance.id);
        continue;
      }
      instance.known_optimum = result.best_objective;
    }
    solved.push_back(std::move(instance));
  }
  return dataset_from_solved(problem, std::move(solved), std::move(excluded));
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& path) {
  nlohmann::json instances = nlohmann::json::array();
  for (const auto& instance : dataset.instances) instances.push_back(instance_to_json(instance));
  const nlohmann::json doc = {{"format_version", kDatasetFormatVersion},
                              {"class", std::string(to_string(dataset.problem))},
                              {"instances", std::move(instances)},
                              {"excluded", dataset.excluded_ids}};
  write_text_file(path, dump(doc));
}

Dataset load_dataset(const std::filesystem::path& path) {
  const nlohmann::json doc = read_json_file(path);
  if (!doc.is_object() || !doc.contains("format_version") ||
      !doc.at("format_version").is_number_integer()) {
    throw ParseError("missing format_version", "/format_version");
  }
  if (doc.at("format_version").get<int>() != kDatasetFormatVersion) {
    throw VersionError("unsupported dataset format version", "/format_version");
  }
  try {
    const ProblemClass problem = parse_problem_class(doc.at("class").get<std::string>());
    std::vector<Instance> instances;
    const auto& list = doc.at("instances");
    for (std::size_t i = 0; i < list.size(); ++i) {
      try {
        instances.push_back(instance_from_json(list[i]));
      } catch (const ParseError& e) {
        throw ParseError(e.what(), "/instances/" + std::to_string(i) + e.pointer());
      }
    }
    return dataset_from_solved(problem, std::move(instances),
                               doc.at("excluded").get<std::vector<std::string>>());
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(e.what(), "");
  }
}

// ---------------------------------------------------------------------------

bool admissible(const BoundaryEstimate& estimate, std::int64_t optimum) {
  return estimate.est_lb <= optimum && optimum <= estimate.est_ub;
}

namespace {

// 100 * (1 - part / whole) as a single rounding of the exact rational.
double percent_reduction(std::int64_t part, std::int64_t whole) {
  return static_cast<double>(100 * (whole - part)) / static_cast<double>(whole);
}

}  // namespace

double gap_reduction(const BoundaryEstimate& estimate, std::int64_t optimum,
                     const Domain& original, Sense sense) {
  const bool minimize = sense == Sense::kMinimize;
  const std::int64_t cut_original = minimize ? original.ub : original.lb;
  const std::int64_t cut_estimate = minimize ? estimate.est_ub : estimate.est_lb;
  const std::int64_t whole = std::llabs(cut_original - optimum);
  if (whole == 0) return kNaN;
  return percent_reduction(std::llabs(cut_estimate - optimum), whole);
}

double size_reduction(const BoundaryEstimate& estimate, const Domain& original) {
  const std::int64_t whole = std::llabs(original.ub - original.lb);
  if (whole == 0) return kNaN;
  return percent_reduction(std::llabs(estimate.est_ub - estimate.est_lb), whole);
}

MedianMad median_mad(std::vector<double> values) {
  std::erase_if(values, [](double v) { return std::isnan(v); });
  if (values.empty()) return {kNaN, kNaN};
  const auto median_of = [](std::vector<double>& v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
  };
  MedianMad out;
  out.median = median_of(values);
  for (auto& v : values) v = std::abs(v - out.median);
  out.mad = median_of(values);
  return out;
}

CrossValidationResult cross_validate(const Dataset& dataset, const FoldTrainer& trainer,
                                     const CrossValidationOptions& options) {
  const std::size_t n = dataset.size();
  if (options.folds < 2 || options.repeats < 1) {
    throw DatasetError("cross-validation needs at least 2 folds and 1 repeat");
  }
  const auto k = static_cast<std::size_t>(options.folds);
  if (n < 2 * k) {
    throw DatasetError("dataset of " + std::to_string(n) + " entries is too small for " +
                       std::to_string(k) + "-fold validation");
  }

  CrossValidationResult result;
  std::vector<double> fold_admissible;
  std::vector<double> gaps;
  std::vector<double> sizes;
  std::set<std::size_t> undefined;
  std::vector<std::size_t> fold_of(n);
  for (int repeat = 0; repeat < options.repeats; ++repeat) {
    Rng rng(derive_seed(options.seed, static_cast<std::uint64_t>(repeat)));
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    shuffle(std::span<std::size_t>(order), rng);
    for (std::size_t i = 0; i < n; ++i) fold_of[order[i]] = i % k;

    for (std::size_t fold = 0; fold < k; ++fold) {
      std::vector<std::size_t> training;
      std::vector<std::size_t> held_out;
      for (std::size_t i = 0; i < n; ++i) (fold_of[i] == fold ? held_out : training).push_back(i);
      const auto predictor = trainer(dataset, training);

      std::size_t hits = 0;
      for (const std::size_t i : held_out) {
        const Instance& instance = dataset.instances[i];
        const std::int64_t optimum = *instance.known_optimum;
        const Domain domain{instance.objective_lb, instance.objective_ub};
        Evaluation e{repeat, static_cast<int>(fold), i,
                     predictor->estimate(instance, dataset.raw[i]), false, 0.0, 0.0};
        e.admissible = admissible(e.estimate, optimum);
        e.gap_pct = gap_reduction(e.estimate, optimum, domain, instance.sense());
        e.size_pct = size_reduction(e.estimate, domain);
        if (std::isnan(e.gap_pct) || std::isnan(e.size_pct)) undefined.insert(i);
        hits += e.admissible ? 1 : 0;
        gaps.push_back(e.gap_pct);
        sizes.push_back(e.size_pct);
        result.evaluations.push_back(e);
      }
      fold_admissible.push_back(100.0 * static_cast<double>(hits) /
                                static_cast<double>(held_out.size()));
    }
  }
  result.metrics.admissible_pct = median_mad(std::move(fold_admissible));
  result.metrics.gap_pct = median_mad(std::move(gaps));
  result.metrics.size_pct = median_mad(std::move(sizes));
  result.metrics.n_evaluated = result.evaluations.size();
  result.metrics.n_excluded = undefined.size();
  return result;
}

EstimatorPair train_pair(const Dataset& dataset, std::span<const std::size_t> training,
                         const EstimatorConfig& lower, const EstimatorConfig& upper) {
  std::vector<NamedFeatures> raw;
  raw.reserve(training.size());
  for (const auto i : training) raw.push_back(dataset.raw[i]);
  const FeatureSchema schema = fit_schema(raw, dataset.schema.variance_threshold);
  const Eigen::MatrixXd features = feature_matrix(schema, raw);

  const auto labels = [&](const EstimatorConfig& config) {
    Eigen::VectorXd y(static_cast<Eigen::Index>(training.size()));
    for (std::size_t r = 0; r < training.size(); ++r) {
      y(static_cast<Eigen::Index>(r)) =
          training_label(dataset.instances[training[r]], config.lambda, config.direction);
    }
    return y;
  };
  return {train(lower, schema, {features, labels(lower)}),
          train(upper, schema, {features, labels(upper)})};
}

namespace {

class EstimatorPredictor : public BoundPredictor {
 public:
  explicit EstimatorPredictor(EstimatorPair pair) : pair_(std::move(pair)) {}

  BoundaryEstimate estimate(const Instance& instance, const NamedFeatures& raw) const override {
    return estimate_bounds(pair_.lower, pair_.upper, instance, raw);
  }

 private:
  EstimatorPair pair_;
};

}  // namespace

FoldTrainer estimator_trainer(const EstimatorConfig& lower, const EstimatorConfig& upper) {
  return [lower, upper](const Dataset& dataset, std::span<const std::size_t> training) {
    return std::make_unique<EstimatorPredictor>(train_pair(dataset, training, lower, upper));
  };
}

CrossValidationResult cross_validate(const Dataset& dataset, const EstimatorConfig& lower,
                                     const EstimatorConfig& upper,
                                     const CrossValidationOptions& options) {
  return cross_validate(dataset, estimator_trainer(lower, upper), options);
}

std::vector<double> default_lambda_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 10; ++i) grid.push_back(static_cast<double>(8 * i) / 100.0);
  return grid;
}

std::vector<SweepRow> lambda_sweep(const Dataset& dataset, const EstimatorConfig& lower,
                                   const EstimatorConfig& upper,
                                   std::span<const double> lambdas,
                                   const CrossValidationOptions& options) {
  std::vector<SweepRow> rows;
  for (const double lambda : lambdas) {
    EstimatorConfig lo = lower;
    EstimatorConfig hi = upper;
    lo.lambda = lambda;
    hi.lambda = lambda;
    rows.push_back({lambda, cross_validate(dataset, lo, hi, options).metrics, dataset.hash()});
  }
  return rows;
}

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  return nlohmann::json(value).dump();
}

std::string metrics_csv_header() {
  return "class,model,direction,lambda,alpha,admissible_med,admissible_mad,gap_med,gap_mad,"
         "size_med,size_mad,n_excluded\n";
}

std::string metrics_csv_row(ProblemClass problem, const std::string& model,
                            const std::string& direction, double lambda, double alpha,
                            const EstimationMetrics& m) {
  std::ostringstream out;
  out << to_string(problem) << ',' << model << ',' << direction << ',' << format_number(lambda)
      << ',' << format_number(alpha) << ',' << format_number(m.admissible_pct.median) << ','
      << format_number(m.admissible_pct.mad) << ',' << format_number(m.gap_pct.median) << ','
      << format_number(m.gap_pct.mad) << ',' << format_number(m.size_pct.median) << ','
      << format_number(m.size_pct.mad) << ',' << m.n_excluded << '\n';
  return out.str();
}

}  // namespace objbound
