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

#include "objbound/features.hpp"

#include <algorithm>
#include <set>

#include "objbound/error.hpp"

namespace objbound {

namespace {

class FeatureList {
 public:
  void add(std::string name, double value) {
    names_.push_back(std::move(name));
    values_.push_back(value);
  }

  void add_summary(const std::string& prefix, const StatSummary& summary) {
    const auto values = summary.values();
    for (std::size_t i = 0; i < values.size(); ++i) {
      add(prefix + "." + std::string(StatSummary::kNames[i]), values[i]);
    }
  }

  NamedFeatures finish() && {
    NamedFeatures out;
    out.names = std::move(names_);
    out.values = Eigen::Map<const Eigen::VectorXd>(
        values_.data(), static_cast<Eigen::Index>(values_.size()));
    return out;
  }

 private:
  std::vector<std::string> names_;
  std::vector<double> values_;
};

}  // namespace

NamedFeatures instance_features(const Instance& instance) {
  FeatureList list;
  for (const auto& [name, value] : instance.params) {
    if (const auto* scalar = std::get_if<std::int64_t>(&value)) {
      list.add(name, static_cast<double>(*scalar));
    } else if (const auto* values = std::get_if<IntList>(&value)) {
      list.add_summary(name, describe_collection(*values));
    } else {
      list.add_summary(name,
                       describe_collection(aggregate_nested(std::get<IntMatrix>(value))));
    }
  }
  return std::move(list).finish();
}

namespace {

void collect_vars(const LinearConstraint& c, std::set<int>& vars) {
  for (const auto& t : c.terms) vars.insert(t.var);
}

}  // namespace

NamedFeatures model_features(const FlatModel& model) {
  const auto n_vars = static_cast<double>(model.variables.size());
  const auto n_cons = static_cast<double>(model.constraints.size());

  double n_linear = 0;
  double n_disjunctions = 0;
  double total_arity = 0;
  for (const auto& c : model.constraints) {
    std::set<int> vars;
    if (const auto* lin = std::get_if<LinearConstraint>(&c)) {
      ++n_linear;
      collect_vars(*lin, vars);
    } else {
      ++n_disjunctions;
      const auto& d = std::get<Disjunction>(c);
      collect_vars(d.left, vars);
      collect_vars(d.right, vars);
    }
    total_arity += static_cast<double>(vars.size());
  }

  double sum_sizes = 0;
  double max_size = 0;
  for (const auto& v : model.variables) {
    const auto size = static_cast<double>(v.ub - v.lb + 1);
    sum_sizes += size;
    max_size = std::max(max_size, size);
  }
  const auto& objective = model.objective();

  FeatureList list;
  list.add("model.n_variables", n_vars);
  list.add("model.n_constraints", n_cons);
  list.add("model.n_linear", n_linear);
  list.add("model.n_disjunctions", n_disjunctions);
  list.add("model.sum_domain_sizes", sum_sizes);
  list.add("model.mean_domain_size", n_vars > 0 ? sum_sizes / n_vars : 0.0);
  list.add("model.max_domain_size", max_size);
  list.add("model.objective_domain_width",
           static_cast<double>(objective.ub - objective.lb));
  list.add("model.constraints_per_variable", n_vars > 0 ? n_cons / n_vars : 0.0);
  list.add("model.mean_constraint_arity", n_cons > 0 ? total_arity / n_cons : 0.0);
  return std::move(list).finish();
}

NamedFeatures extract_features(const Instance& instance) {
  NamedFeatures head = instance_features(instance);
  NamedFeatures tail = model_features(compile(instance));
  NamedFeatures out;
  out.names = std::move(head.names);
  out.names.insert(out.names.end(), tail.names.begin(), tail.names.end());
  out.values.resize(head.values.size() + tail.values.size());
  out.values << head.values, tail.values;
  return out;
}

Eigen::Index FeatureSchema::kept_count() const {
  return static_cast<Eigen::Index>(std::count(keep_mask.begin(), keep_mask.end(), true));
}

std::vector<std::string> FeatureSchema::kept_names() const {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < feature_names.size(); ++i) {
    if (keep_mask[i]) names.push_back(feature_names[i]);
  }
  return names;
}

std::uint64_t FeatureSchema::id() const {
  // FNV-1a over a canonical rendering.
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  const auto mix = [&hash](std::string_view bytes) {
    for (const unsigned char c : bytes) {
      hash ^= c;
      hash *= 0x100000001b3ULL;
    }
  };
  for (std::size_t i = 0; i < feature_names.size(); ++i) {
    mix(feature_names[i]);
    mix(keep_mask[i] ? "\x01" : "\x02");
  }
  mix(nlohmann::json(variance_threshold).dump());
  return hash;
}

FeatureSchema fit_schema(std::span<const NamedFeatures> training,
                         double variance_threshold) {
  if (training.size() < 2) {
    throw SchemaError("schema fitting needs at least two feature vectors");
  }
  const auto& names = training.front().names;
  for (const auto& raw : training) {
    if (raw.names != names) throw SchemaError("feature name lists differ");
  }

  FeatureSchema schema;
  schema.feature_names = names;
  schema.variance_threshold = variance_threshold;
  schema.keep_mask.resize(names.size());
  Eigen::VectorXd column(static_cast<Eigen::Index>(training.size()));
  for (std::size_t f = 0; f < names.size(); ++f) {
    for (std::size_t r = 0; r < training.size(); ++r) {
      column(static_cast<Eigen::Index>(r)) =
          training[r].values(static_cast<Eigen::Index>(f));
    }
    schema.keep_mask[f] = population_variance(column) > variance_threshold;
  }
  if (schema.kept_count() == 0) {
    throw SchemaError("every feature fell below the variance threshold");
  }
  return schema;
}

FeatureVector apply_schema(const FeatureSchema& schema, const NamedFeatures& raw) {
  if (raw.names != schema.feature_names) {
    throw SchemaError("feature names do not match the schema");
  }
  FeatureVector out;
  out.schema_id = schema.id();
  out.values.resize(schema.kept_count());
  Eigen::Index k = 0;
  for (std::size_t i = 0; i < schema.feature_names.size(); ++i) {
    if (schema.keep_mask[i]) out.values(k++) = raw.values(static_cast<Eigen::Index>(i));
  }
  return out;
}

Eigen::MatrixXd feature_matrix(const FeatureSchema& schema,
                               std::span<const NamedFeatures> raw) {
  Eigen::MatrixXd matrix(static_cast<Eigen::Index>(raw.size()), schema.kept_count());
  for (std::size_t r = 0; r < raw.size(); ++r) {
    matrix.row(static_cast<Eigen::Index>(r)) = apply_schema(schema, raw[r]).values.transpose();
  }
  return matrix;
}

nlohmann::json schema_to_json(const FeatureSchema& schema) {
  nlohmann::json doc;
  doc["feature_names"] = schema.feature_names;
  doc["keep_mask"] = schema.keep_mask;
  doc["variance_threshold"] = schema.variance_threshold;
  doc["variance"] = "population";
  doc["quantiles"] = "linear";
  return doc;
}

FeatureSchema schema_from_json(const nlohmann::json& doc, const std::string& pointer) {
  try {
    FeatureSchema schema;
    schema.feature_names = doc.at("feature_names").get<std::vector<std::string>>();
    schema.keep_mask = doc.at("keep_mask").get<std::vector<bool>>();
    schema.variance_threshold = doc.at("variance_threshold").get<double>();
    if (schema.keep_mask.size() != schema.feature_names.size() ||
        schema.kept_count() == 0) {
      throw ParseError("keep_mask does not fit feature_names", pointer + "/keep_mask");
    }
    return schema;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(e.what(), pointer);
  }
}

}  // namespace objbound
