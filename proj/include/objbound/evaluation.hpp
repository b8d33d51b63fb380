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

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "objbound/cop.hpp"
#include "objbound/estimator.hpp"
#include "objbound/features.hpp"
#include "objbound/solver.hpp"

namespace objbound {

// Solved instances of one class with their raw features. The schema is
// fitted over every entry; cross-validation refits it per training fold.
struct Dataset {
  ProblemClass problem = ProblemClass::kBinPacking;
  std::vector<Instance> instances;  // known_optimum always set
  std::vector<NamedFeatures> raw;
  FeatureSchema schema;
  std::vector<std::string> excluded_ids;

  std::size_t size() const { return instances.size(); }
  // FNV-1a over ids and optima.
  std::uint64_t hash() const;
};

inline constexpr std::size_t kMinDatasetSize = 20;

// Solves every instance lacking a known optimum and keeps those proven
// optimal within `budget`. Throws DatasetError on mixed classes, an invalid
// budget, or fewer than kMinDatasetSize solved instances.
Dataset build_dataset(std::vector<Instance> instances, const SolveConfig& budget);

// Assembles a dataset from instances that already carry their optimum.
Dataset dataset_from_solved(ProblemClass problem, std::vector<Instance> instances,
                            std::vector<std::string> excluded_ids = {});

inline constexpr int kDatasetFormatVersion = 1;
void save_dataset(const Dataset& dataset, const std::filesystem::path& path);
Dataset load_dataset(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Estimation quality.

struct Domain {
  std::int64_t lb;
  std::int64_t ub;
};

bool admissible(const BoundaryEstimate& estimate, std::int64_t optimum);

// 100 * (1 - |cut_est - z| / |cut_orig - z|) on the cutting side (ub when
// minimizing, lb when maximizing). NaN when cut_orig == z.
double gap_reduction(const BoundaryEstimate& estimate, std::int64_t optimum,
                     const Domain& original, Sense sense);

// 100 * (1 - (est_ub - est_lb) / (ub - lb)). NaN for a point domain.
double size_reduction(const BoundaryEstimate& estimate, const Domain& original);

struct MedianMad {
  double median = 0.0;
  double mad = 0.0;
};

// NaN entries are ignored; an empty input yields NaN for both.
MedianMad median_mad(std::vector<double> values);

struct EstimationMetrics {
  MedianMad admissible_pct;  // per evaluation fold
  MedianMad gap_pct;         // per evaluated instance
  MedianMad size_pct;        // per evaluated instance
  std::size_t n_evaluated = 0;
  std::size_t n_excluded = 0;  // instances with an undefined gap or size
};

struct Evaluation {
  int repeat;
  int fold;
  std::size_t index;  // into Dataset::instances
  BoundaryEstimate estimate;
  bool admissible;
  double gap_pct;
  double size_pct;
};

struct CrossValidationResult {
  EstimationMetrics metrics;
  std::vector<Evaluation> evaluations;
};

// Something that maps an instance (and its raw features) to bounds.
class BoundPredictor {
 public:
  virtual ~BoundPredictor() = default;
  virtual BoundaryEstimate estimate(const Instance& instance,
                                    const NamedFeatures& raw) const = 0;
};

// Builds a predictor from the training indices of one fold.
using FoldTrainer = std::function<std::unique_ptr<BoundPredictor>(
    const Dataset& dataset, std::span<const std::size_t> training)>;

struct CrossValidationOptions {
  int folds = 10;
  int repeats = 10;
  std::uint64_t seed = 0;
};

// Repeated k-fold validation: a fresh seeded fold assignment per repeat, a
// predictor trained on k-1 folds, estimates on the held-out fold. Throws
// DatasetError when the dataset has fewer than 2k entries.
CrossValidationResult cross_validate(const Dataset& dataset, const FoldTrainer& trainer,
                                     const CrossValidationOptions& options);

// Trainer that fits a schema on the fold and trains one estimator per
// direction from the two configs.
FoldTrainer estimator_trainer(const EstimatorConfig& lower, const EstimatorConfig& upper);

CrossValidationResult cross_validate(const Dataset& dataset, const EstimatorConfig& lower,
                                     const EstimatorConfig& upper,
                                     const CrossValidationOptions& options);

// Trains the lower/upper pair on the whole dataset.
struct EstimatorPair {
  TrainedEstimator lower;
  TrainedEstimator upper;
};
EstimatorPair train_pair(const Dataset& dataset, std::span<const std::size_t> training,
                         const EstimatorConfig& lower, const EstimatorConfig& upper);

// 11 values evenly spaced over [0, 0.8].
std::vector<double> default_lambda_grid();

struct SweepRow {
  double lambda;
  EstimationMetrics metrics;
  std::uint64_t dataset_hash;
};

// One cross-validation per lambda with both directions' label shift set to
// it; the fold assignment depends on options.seed only, so every row sees
// the same folds.
std::vector<SweepRow> lambda_sweep(const Dataset& dataset, const EstimatorConfig& lower,
                                   const EstimatorConfig& upper,
                                   std::span<const double> lambdas,
                                   const CrossValidationOptions& options);

// Metrics CSV: class, model, direction, lambda, alpha, admissible_med,
// admissible_mad, gap_med, gap_mad, size_med, size_mad, n_excluded.
std::string metrics_csv_header();
std::string metrics_csv_row(ProblemClass problem, const std::string& model,
                            const std::string& direction, double lambda, double alpha,
                            const EstimationMetrics& metrics);

// Shortest round-trip rendering of a double; "nan" for NaN.
std::string format_number(double value);

}  // namespace objbound
