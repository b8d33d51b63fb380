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
#include <span>
#include <string>
#include <string_view>
#include <variant>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "objbound/cop.hpp"
#include "objbound/features.hpp"
#include "objbound/linear_model.hpp"
#include "objbound/loss.hpp"
#include "objbound/mlp.hpp"
#include "objbound/tree_ensemble.hpp"

namespace objbound {

enum class ModelKind { kLinear, kGradientBoosting, kNeuralNet };

std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view name);

struct EstimatorConfig {
  ModelKind model = ModelKind::kGradientBoosting;
  LossSpec loss;
  double lambda = 0.0;
  Direction direction = Direction::kOverestimate;
  std::uint64_t seed = 0;
  GtbParams gtb;
  MlpParams mlp;

  // lambda in [0, 1); overestimators need alpha <= 0 and underestimators
  // alpha >= 0. Throws ValidationError.
  void validate() const;

  friend bool operator==(const EstimatorConfig&, const EstimatorConfig&) = default;
};

// Named model variants: "LR", "GTB_s", "GTB_a", "NN_s", "NN_a". The
// asymmetric variants use alpha -1 (GTB) and -0.8 (NN) for the overestimator
// and the mirrored sign for the underestimator. lambda defaults to the
// variant's selected label shift (NN_a 0.1, GTB_a 0.3, LR 0.5, NN_s 0.5,
// GTB_s 0.4).
EstimatorConfig preset(std::string_view variant, Direction direction,
                       std::uint64_t seed = 0);
double default_lambda(std::string_view variant);
bool is_known_variant(std::string_view variant);

// Label for one solved instance: the optimum scaled into [0, 1] by the
// original domain, then label-shifted toward `direction`.
double training_label(const Instance& instance, double lambda, Direction direction);

struct TrainingSet {
  Eigen::MatrixXd features;  // one row per example
  Eigen::VectorXd labels;    // scaled, shifted
};

using ModelParameters = std::variant<LinearModel, TreeEnsemble, Mlp>;

class TrainedEstimator {
 public:
  TrainedEstimator(EstimatorConfig config, FeatureSchema schema, ModelParameters parameters);

  const EstimatorConfig& config() const { return config_; }
  const FeatureSchema& schema() const { return schema_; }
  const ModelParameters& parameters() const { return parameters_; }

  // Model output before clipping. Throws SchemaError when `features` was
  // produced under another schema.
  double predict_raw(const FeatureVector& features) const;
  // predict_raw clipped into [0, 1].
  double predict(const FeatureVector& features) const;

 private:
  EstimatorConfig config_;
  FeatureSchema schema_;
  ModelParameters parameters_;
  std::uint64_t schema_id_;
};

// Deterministic given config.seed. Throws TrainingError on an empty set and
// ValidationError on non-finite labels or an invalid config. The loss is
// ignored by linear regression.
TrainedEstimator train(const EstimatorConfig& config, const FeatureSchema& schema,
                       const TrainingSet& data);

// Turns scaled lower/upper predictions (before clipping) into an integer
// estimate inside the instance's domain: the lower bound floors, the upper
// bound ceils, and a crossed pair reverts the limiting side to the original
// bound (lb for minimization, ub for maximization).
BoundaryEstimate bounds_from_predictions(double raw_lower, double raw_upper,
                                         const Instance& instance);

// Throws ValidationError if the models' directions are wrong or their
// schemas differ, SchemaError if the instance does not fit the schema.
BoundaryEstimate estimate_bounds(const TrainedEstimator& lower,
                                 const TrainedEstimator& upper, const Instance& instance);
BoundaryEstimate estimate_bounds(const TrainedEstimator& lower,
                                 const TrainedEstimator& upper, const Instance& instance,
                                 const NamedFeatures& raw);

inline constexpr int kModelFormatVersion = 1;

nlohmann::json config_to_json(const EstimatorConfig& config);
EstimatorConfig config_from_json(const nlohmann::json& doc);
nlohmann::json model_to_json(const TrainedEstimator& model);
// Throws VersionError for unknown format versions and ParseError otherwise.
TrainedEstimator model_from_json(const nlohmann::json& doc);

void save_model(const TrainedEstimator& model, const std::filesystem::path& path);
TrainedEstimator load_model(const std::filesystem::path& path);

}  // namespace objbound
