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

#include <Eigen/Core>
#include <nlohmann/json.hpp>

namespace objbound {

// Affine least-squares regressor, weights expressed on the raw features.
struct LinearModel {
  Eigen::VectorXd weights;
  double intercept = 0.0;

  double predict(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    return weights.dot(x) + intercept;
  }
};

// Minimum-norm least squares on standardized columns (constant columns get
// weight 0), mapped back to raw-feature weights.
LinearModel fit_linear(const Eigen::MatrixXd& features, const Eigen::VectorXd& labels);

nlohmann::json to_json(const LinearModel& model);
LinearModel linear_from_json(const nlohmann::json& doc);

}  // namespace objbound
