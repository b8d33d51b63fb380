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
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "objbound/cop.hpp"
#include "objbound/stats.hpp"

namespace objbound {

// Sums of every leaf below each top-level element, so arbitrarily nested
// collections flatten to one value per outer element.
namespace detail {
template <typename T>
std::int64_t nested_total(const T& value) {
  if constexpr (std::is_arithmetic_v<T>) {
    return static_cast<std::int64_t>(value);
  } else {
    std::int64_t total = 0;
    for (const auto& inner : value) total += nested_total(inner);
    return total;
  }
}
}  // namespace detail

template <typename Inner>
IntList aggregate_nested(const std::vector<Inner>& values) {
  IntList sums;
  sums.reserve(values.size());
  for (const auto& inner : values) sums.push_back(detail::nested_total(inner));
  return sums;
}

// Feature values before low-variance filtering, addressed by dot-path names
// such as "weights.skew" or "model.n_variables".
struct NamedFeatures {
  std::vector<std::string> names;
  Eigen::VectorXd values;
};

// Scalars contribute one feature, collections their nine statistics.
NamedFeatures instance_features(const Instance& instance);
// The ten constraint-system features, prefixed "model.".
NamedFeatures model_features(const FlatModel& model);
// instance_features followed by model_features of compile(instance).
NamedFeatures extract_features(const Instance& instance);

inline constexpr double kDefaultVarianceThreshold = 1e-8;

struct FeatureSchema {
  std::vector<std::string> feature_names;
  std::vector<bool> keep_mask;
  double variance_threshold = kDefaultVarianceThreshold;

  Eigen::Index kept_count() const;
  std::vector<std::string> kept_names() const;
  // Content hash of names, mask and threshold.
  std::uint64_t id() const;

  friend bool operator==(const FeatureSchema&, const FeatureSchema&) = default;
};

struct FeatureVector {
  Eigen::VectorXd values;
  std::uint64_t schema_id = 0;
};

// Keeps feature i iff its population variance over `training` exceeds the
// threshold. Throws SchemaError on fewer than two vectors, mismatched name
// lists, or when nothing survives.
FeatureSchema fit_schema(std::span<const NamedFeatures> training,
                         double variance_threshold = kDefaultVarianceThreshold);
FeatureVector apply_schema(const FeatureSchema& schema, const NamedFeatures& raw);

// Rows are apply_schema(schema, raw[i]).values.
Eigen::MatrixXd feature_matrix(const FeatureSchema& schema,
                               std::span<const NamedFeatures> raw);

nlohmann::json schema_to_json(const FeatureSchema& schema);
FeatureSchema schema_from_json(const nlohmann::json& doc, const std::string& pointer);

}  // namespace objbound
