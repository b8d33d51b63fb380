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

#include "objbound/linear_model.hpp"

#include <Eigen/QR>

namespace objbound {

LinearModel fit_linear(const Eigen::MatrixXd& features, const Eigen::VectorXd& labels) {
  const Eigen::Index n = features.rows();
  const Eigen::Index d = features.cols();
  const Eigen::RowVectorXd mean = features.colwise().mean();
  Eigen::RowVectorXd scale =
      ((features.rowwise() - mean).array().square().colwise().mean()).sqrt();
  for (Eigen::Index j = 0; j < d; ++j) {
    if (!(scale(j) > 0.0)) scale(j) = 1.0;
  }

  Eigen::MatrixXd design(n, d + 1);
  design.leftCols(d) = (features.rowwise() - mean).array().rowwise() / scale.array();
  design.col(d).setOnes();
  const Eigen::VectorXd solution = design.completeOrthogonalDecomposition().solve(labels);

  LinearModel model;
  model.weights = solution.head(d).array() / scale.transpose().array();
  model.intercept = solution(d) - mean.dot(model.weights);
  return model;
}

nlohmann::json to_json(const LinearModel& model) {
  return {{"weights", std::vector<double>(model.weights.data(),
                                          model.weights.data() + model.weights.size())},
          {"intercept", model.intercept}};
}

LinearModel linear_from_json(const nlohmann::json& doc) {
  const auto weights = doc.at("weights").get<std::vector<double>>();
  LinearModel model;
  model.weights = Eigen::Map<const Eigen::VectorXd>(
      weights.data(), static_cast<Eigen::Index>(weights.size()));
  model.intercept = doc.at("intercept").get<double>();
  return model;
}

}  // namespace objbound
