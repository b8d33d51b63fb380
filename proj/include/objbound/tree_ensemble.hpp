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

#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "objbound/loss.hpp"

namespace objbound {

struct GtbParams {
  int n_trees = 100;
  int max_depth = 3;
  double learning_rate = 0.1;
  double l2_regularization = 1.0;
  // Keeps Newton steps defined where the loss is flat (alpha = -1 or 1).
  double hessian_floor = 1e-6;

  friend bool operator==(const GtbParams&, const GtbParams&) = default;
};

// Internal nodes send x[feature] < threshold to `left`. Leaves have
// feature == -1 and carry the (unshrunk) Newton weight in `value`.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;

  bool is_leaf() const { return feature < 0; }
};

struct RegressionTree {
  std::vector<TreeNode> nodes;

  double predict(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    int at = 0;
    while (!nodes[at].is_leaf()) {
      const auto& node = nodes[at];
      at = x(node.feature) < node.threshold ? node.left : node.right;
    }
    return nodes[at].value;
  }
};

// prediction = base_score + learning_rate * sum of tree outputs.
struct TreeEnsemble {
  double base_score = 0.0;
  double learning_rate = 0.1;
  std::vector<RegressionTree> trees;

  double predict(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    double sum = 0.0;
    for (const auto& tree : trees) sum += tree.predict(x);
    return base_score + learning_rate * sum;
  }
};

// Second-order boosting from loss_gradient/loss_hessian with exact greedy
// splits. base_score is the label mean.
TreeEnsemble fit_tree_ensemble(const Eigen::MatrixXd& features,
                               const Eigen::VectorXd& labels, const LossSpec& loss,
                               const GtbParams& params);

nlohmann::json to_json(const TreeEnsemble& ensemble);
TreeEnsemble tree_ensemble_from_json(const nlohmann::json& doc);

}  // namespace objbound
