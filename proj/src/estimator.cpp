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

#include "objbound/estimator.hpp"

#include <algorithm>
#include <cmath>

#include "objbound/error.hpp"
#include "objbound/io.hpp"

namespace objbound {

using nlohmann::json;

LossSpec LossSpec::shifted(double alpha) {
  LossSpec spec{alpha == 0.0 ? LossKind::kSquared : LossKind::kShiftedSquared, alpha};
  spec.validate();
  return spec;
}

void LossSpec::validate() const {
  if (!(alpha >= -1.0 && alpha <= 1.0)) {
    throw ValidationError("loss alpha must lie in [-1, 1]");
  }
  if (kind == LossKind::kSquared && alpha != 0.0) {
    throw ValidationError("squared loss carries no alpha");
  }
}

std::string_view to_string(LossKind kind) {
  return kind == LossKind::kSquared ? "squared" : "shifted_squared";
}

LossKind parse_loss_kind(std::string_view name) {
  if (name == "squared") return LossKind::kSquared;
  if (name == "shifted_squared") return LossKind::kShiftedSquared;
  throw ValidationError("unknown loss kind '" + std::string(name) + "'");
}

std::string_view to_string(Direction direction) {
  return direction == Direction::kOverestimate ? "overestimate" : "underestimate";
}

Direction parse_direction(std::string_view name) {
  if (name == "overestimate") return Direction::kOverestimate;
  if (name == "underestimate") return Direction::kUnderestimate;
  throw ValidationError("unknown direction '" + std::string(name) + "'");
}

Scaler::Scaler(std::int64_t lb, std::int64_t ub) : lb_(lb), ub_(ub) {
  if (lb > ub) throw ValidationError("scaler domain is empty");
}

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::kLinear:
      return "LR";
    case ModelKind::kGradientBoosting:
      return "GTB";
    case ModelKind::kNeuralNet:
      return "NN";
  }
  return "?";
}

ModelKind parse_model_kind(std::string_view name) {
  if (name == "LR") return ModelKind::kLinear;
  if (name == "GTB") return ModelKind::kGradientBoosting;
  if (name == "NN") return ModelKind::kNeuralNet;
  throw ValidationError("unknown model kind '" + std::string(name) + "'");
}

void EstimatorConfig::validate() const {
  if (!(lambda >= 0.0 && lambda < 1.0)) {
    throw ValidationError("label shift lambda must lie in [0, 1)");
  }
  loss.validate();
  if (direction == Direction::kOverestimate && loss.alpha > 0.0) {
    throw ValidationError("an overestimator needs alpha <= 0");
  }
  if (direction == Direction::kUnderestimate && loss.alpha < 0.0) {
    throw ValidationError("an underestimator needs alpha >= 0");
  }
  if (gtb.n_trees < 0 || gtb.max_depth < 0 || !(gtb.learning_rate > 0.0) ||
      gtb.l2_regularization < 0.0 || !(gtb.hessian_floor > 0.0)) {
    throw ValidationError("invalid boosting hyperparameters");
  }
  if (mlp.epochs < 0 || mlp.batch_size < 1 || !(mlp.learning_rate > 0.0) ||
      std::any_of(mlp.hidden.begin(), mlp.hidden.end(), [](int h) { return h < 1; })) {
    throw ValidationError("invalid network hyperparameters");
  }
}

bool is_known_variant(std::string_view variant) {
  return variant == "LR" || variant == "GTB_s" || variant == "GTB_a" ||
         variant == "NN_s" || variant == "NN_a";
}

double default_lambda(std::string_view variant) {
  if (variant == "NN_a") return 0.1;
  if (variant == "GTB_a") return 0.3;
  if (variant == "LR") return 0.5;
  if (variant == "NN_s") return 0.5;
  if (variant == "GTB_s") return 0.4;
  throw ValidationError("unknown model variant '" + std::string(variant) + "'");
}

EstimatorConfig preset(std::string_view variant, Direction direction, std::uint64_t seed) {
  EstimatorConfig config;
  config.lambda = default_lambda(variant);
  config.direction = direction;
  config.seed = seed;
  const double sign = direction == Direction::kOverestimate ? -1.0 : 1.0;
  if (variant == "LR") {
    config.model = ModelKind::kLinear;
  } else if (variant.starts_with("GTB")) {
    config.model = ModelKind::kGradientBoosting;
    if (variant == "GTB_a") config.loss = LossSpec::shifted(sign * 1.0);
  } else {
    config.model = ModelKind::kNeuralNet;
    if (variant == "NN_a") config.loss = LossSpec::shifted(sign * 0.8);
  }
  return config;
}

double training_label(const Instance& instance, double lambda, Direction direction) {
  if (!instance.known_optimum) {
    throw ValidationError("instance '" + instance.id + "' has no known optimum");
  }
  const Scaler scaler(instance.objective_lb, instance.objective_ub);
  return label_shift(scaler.scale(static_cast<double>(*instance.known_optimum)), lambda,
                     direction);
}

namespace {

Eigen::Index parameter_inputs(const ModelParameters& parameters) {
  return std::visit(
      [](const auto& p) -> Eigen::Index {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, LinearModel>) {
          return p.weights.size();
        } else if constexpr (std::is_same_v<T, Mlp>) {
          return p.input_mean.size();
        } else {
          return -1;
        }
      },
      parameters);
}

int max_tree_feature(const TreeEnsemble& ensemble) {
  int top = -1;
  for (const auto& tree : ensemble.trees) {
    for (const auto& node : tree.nodes) top = std::max(top, node.feature);
  }
  return top;
}

ModelKind kind_of(const ModelParameters& parameters) {
  switch (parameters.index()) {
    case 0:
      return ModelKind::kLinear;
    case 1:
      return ModelKind::kGradientBoosting;
    default:
      return ModelKind::kNeuralNet;
  }
}

}  // namespace

TrainedEstimator::TrainedEstimator(EstimatorConfig config, FeatureSchema schema,
                                   ModelParameters parameters)
    : config_(std::move(config)),
      schema_(std::move(schema)),
      parameters_(std::move(parameters)),
      schema_id_(schema_.id()) {
  config_.validate();
  if (kind_of(parameters_) != config_.model) {
    throw ValidationError("parameters do not match the configured model kind");
  }
  const Eigen::Index inputs = parameter_inputs(parameters_);
  if (inputs >= 0 && inputs != schema_.kept_count()) {
    throw ValidationError("model input width does not match the schema");
  }
  if (const auto* ensemble = std::get_if<TreeEnsemble>(&parameters_)) {
    if (max_tree_feature(*ensemble) >= schema_.kept_count()) {
      throw ValidationError("tree split on a feature outside the schema");
    }
  }
}

double TrainedEstimator::predict_raw(const FeatureVector& features) const {
  if (features.schema_id != schema_id_ || features.values.size() != schema_.kept_count()) {
    throw SchemaError("feature vector does not match the estimator schema");
  }
  return std::visit([&](const auto& p) { return static_cast<double>(p.predict(features.values)); },
                    parameters_);
}

double TrainedEstimator::predict(const FeatureVector& features) const {
  const double raw = predict_raw(features);
  if (std::isnan(raw)) return config_.direction == Direction::kOverestimate ? 1.0 : 0.0;
  return std::clamp(raw, 0.0, 1.0);
}

TrainedEstimator train(const EstimatorConfig& config, const FeatureSchema& schema,
                       const TrainingSet& data) {
  config.validate();
  if (data.features.rows() == 0) throw TrainingError("empty training set");
  if (data.features.rows() != data.labels.size()) {
    throw TrainingError("feature and label counts differ");
  }
  if (data.features.cols() != schema.kept_count()) {
    throw SchemaError("training features do not match the schema width");
  }
  if (!data.labels.allFinite()) throw ValidationError("non-finite training label");
  if (!data.features.allFinite()) throw ValidationError("non-finite training feature");

  switch (config.model) {
    case ModelKind::kLinear:
      return {config, schema, fit_linear(data.features, data.labels)};
    case ModelKind::kGradientBoosting:
      return {config, schema,
              fit_tree_ensemble(data.features, data.labels, config.loss, config.gtb)};
    case ModelKind::kNeuralNet:
      return {config, schema,
              fit_mlp(data.features, data.labels, config.loss, config.mlp, config.seed)};
  }
  throw TrainingError("unknown model kind");
}

namespace {

// Undo representation error of the unscaling (0.6 * 100 is not exactly 60)
// before rounding outward.
double snap_to_integer(double value) {
  const double nearest = std::round(value);
  return std::abs(value - nearest) <= 1e-9 * std::max(1.0, std::abs(value)) ? nearest : value;
}

}  // namespace

BoundaryEstimate bounds_from_predictions(double raw_lower, double raw_upper,
                                         const Instance& instance) {
  const auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  BoundaryEstimate est;
  est.clamped_lb = !in_unit(raw_lower);
  est.clamped_ub = !in_unit(raw_upper);
  const double lower = std::isnan(raw_lower) ? 0.0 : std::clamp(raw_lower, 0.0, 1.0);
  const double upper = std::isnan(raw_upper) ? 1.0 : std::clamp(raw_upper, 0.0, 1.0);

  const Scaler scaler(instance.objective_lb, instance.objective_ub);
  est.est_lb = static_cast<std::int64_t>(std::floor(snap_to_integer(scaler.unscale(lower))));
  est.est_ub = static_cast<std::int64_t>(std::ceil(snap_to_integer(scaler.unscale(upper))));
  est.est_lb = std::clamp(est.est_lb, instance.objective_lb, instance.objective_ub);
  est.est_ub = std::clamp(est.est_ub, instance.objective_lb, instance.objective_ub);
  if (est.est_lb > est.est_ub) {
    est.crossed = true;
    if (instance.sense() == Sense::kMinimize) {
      est.est_lb = instance.objective_lb;
    } else {
      est.est_ub = instance.objective_ub;
    }
  }
  return est;
}

BoundaryEstimate estimate_bounds(const TrainedEstimator& lower, const TrainedEstimator& upper,
                                 const Instance& instance, const NamedFeatures& raw) {
  if (lower.config().direction != Direction::kUnderestimate ||
      upper.config().direction != Direction::kOverestimate) {
    throw ValidationError("lower model must underestimate and upper model overestimate");
  }
  if (!(lower.schema() == upper.schema())) {
    throw ValidationError("lower and upper models use different schemas");
  }
  const FeatureVector features = apply_schema(lower.schema(), raw);
  return bounds_from_predictions(lower.predict_raw(features), upper.predict_raw(features),
                                 instance);
}

BoundaryEstimate estimate_bounds(const TrainedEstimator& lower, const TrainedEstimator& upper,
                                 const Instance& instance) {
  return estimate_bounds(lower, upper, instance, extract_features(instance));
}

// ---------------------------------------------------------------------------
// Model files.

json config_to_json(const EstimatorConfig& config) {
  json hyper;
  switch (config.model) {
    case ModelKind::kLinear:
      hyper = json::object();
      break;
    case ModelKind::kGradientBoosting:
      hyper = {{"n_trees", config.gtb.n_trees},
               {"max_depth", config.gtb.max_depth},
               {"learning_rate", config.gtb.learning_rate},
               {"l2_regularization", config.gtb.l2_regularization},
               {"hessian_floor", config.gtb.hessian_floor}};
      break;
    case ModelKind::kNeuralNet:
      hyper = {{"hidden", config.mlp.hidden},
               {"learning_rate", config.mlp.learning_rate},
               {"epochs", config.mlp.epochs},
               {"batch_size", config.mlp.batch_size},
               {"optimizer", "adam"}};
      break;
  }
  return {{"model", std::string(to_string(config.model))},
          {"loss", {{"kind", std::string(to_string(config.loss.kind))},
                    {"alpha", config.loss.alpha}}},
          {"lambda", config.lambda},
          {"direction", std::string(to_string(config.direction))},
          {"seed", config.seed},
          {"hyperparameters", std::move(hyper)}};
}

EstimatorConfig config_from_json(const json& doc) {
  try {
    EstimatorConfig config;
    config.model = parse_model_kind(doc.at("model").get<std::string>());
    config.loss.kind = parse_loss_kind(doc.at("loss").at("kind").get<std::string>());
    config.loss.alpha = doc.at("loss").at("alpha").get<double>();
    config.lambda = doc.at("lambda").get<double>();
    config.direction = parse_direction(doc.at("direction").get<std::string>());
    config.seed = doc.at("seed").get<std::uint64_t>();
    const json& hyper = doc.at("hyperparameters");
    if (config.model == ModelKind::kGradientBoosting) {
      config.gtb.n_trees = hyper.at("n_trees").get<int>();
      config.gtb.max_depth = hyper.at("max_depth").get<int>();
      config.gtb.learning_rate = hyper.at("learning_rate").get<double>();
      config.gtb.l2_regularization = hyper.at("l2_regularization").get<double>();
      config.gtb.hessian_floor = hyper.at("hessian_floor").get<double>();
    } else if (config.model == ModelKind::kNeuralNet) {
      config.mlp.hidden = hyper.at("hidden").get<std::vector<int>>();
      config.mlp.learning_rate = hyper.at("learning_rate").get<double>();
      config.mlp.epochs = hyper.at("epochs").get<int>();
      config.mlp.batch_size = hyper.at("batch_size").get<int>();
    }
    config.validate();
    return config;
  } catch (const json::exception& e) {
    throw ParseError(e.what(), "/config");
  } catch (const ParseError&) {
    throw;
  } catch (const ValidationError& e) {
    throw ParseError(e.what(), "/config");
  }
}

json model_to_json(const TrainedEstimator& model) {
  json parameters = std::visit([](const auto& p) { return to_json(p); }, model.parameters());
  return {{"format_version", kModelFormatVersion},
          {"config", config_to_json(model.config())},
          {"schema", schema_to_json(model.schema())},
          {"parameters", std::move(parameters)}};
}

TrainedEstimator model_from_json(const json& doc) {
  if (!doc.is_object() || !doc.contains("format_version")) {
    throw ParseError("missing format_version", "/format_version");
  }
  if (!doc.at("format_version").is_number_integer() ||
      doc.at("format_version").get<int>() != kModelFormatVersion) {
    throw VersionError("unsupported model format version " + doc.at("format_version").dump(),
                       "/format_version");
  }
  if (!doc.contains("config") || !doc.contains("schema") || !doc.contains("parameters")) {
    throw ParseError("model file needs config, schema and parameters", "");
  }
  EstimatorConfig config = config_from_json(doc.at("config"));
  FeatureSchema schema = schema_from_json(doc.at("schema"), "/schema");
  try {
    const json& p = doc.at("parameters");
    ModelParameters parameters;
    switch (config.model) {
      case ModelKind::kLinear:
        parameters = linear_from_json(p);
        break;
      case ModelKind::kGradientBoosting:
        parameters = tree_ensemble_from_json(p);
        break;
      case ModelKind::kNeuralNet:
        parameters = mlp_from_json(p);
        break;
    }
    return {std::move(config), std::move(schema), std::move(parameters)};
  } catch (const json::exception& e) {
    throw ParseError(e.what(), "/parameters");
  } catch (const ParseError&) {
    throw;
  } catch (const ValidationError& e) {
    throw ParseError(e.what(), "/parameters");
  }
}

void save_model(const TrainedEstimator& model, const std::filesystem::path& path) {
  write_text_file(path, dump(model_to_json(model)));
}

TrainedEstimator load_model(const std::filesystem::path& path) {
  return model_from_json(read_json_file(path));
}

}  // namespace objbound
