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

#include "objbound/tree_ensemble.hpp"

#include <algorithm>
#include <numeric>

#include "objbound/error.hpp"

namespace objbound {

namespace {

constexpr double kMinGain = 1e-12;

class TreeBuilder {
 public:
  TreeBuilder(const Eigen::MatrixXd& features, const Eigen::VectorXd& gradients,
              const Eigen::VectorXd& hessians, const GtbParams& params)
      : x_(features), g_(gradients), h_(hessians), params_(params) {}

  RegressionTree build() {
    std::vector<Eigen::Index> all(static_cast<std::size_t>(x_.rows()));
    std::iota(all.begin(), all.end(), Eigen::Index{0});
    grow(all, 0);
    return std::move(tree_);
  }

 private:
  double leaf_weight(double g, double h) const {
    return -g / (h + params_.l2_regularization);
  }
  double score(double g, double h) const {
    return g * g / (h + params_.l2_regularization);
  }

  int grow(std::vector<Eigen::Index>& samples, int depth) {
    double g_total = 0.0;
    double h_total = 0.0;
    for (const auto i : samples) {
      g_total += g_(i);
      h_total += h_(i);
    }
    const int at = static_cast<int>(tree_.nodes.size());
    tree_.nodes.push_back({});
    tree_.nodes[at].value = leaf_weight(g_total, h_total);
    if (depth >= params_.max_depth || samples.size() < 2) return at;

    const double parent = score(g_total, h_total);
    double best_gain = kMinGain;
    int best_feature = -1;
    double best_threshold = 0.0;
    std::vector<Eigen::Index> sorted = samples;
    for (Eigen::Index f = 0; f < x_.cols(); ++f) {
      std::stable_sort(sorted.begin(), sorted.end(), [&](Eigen::Index a, Eigen::Index b) {
        return x_(a, f) < x_(b, f);
      });
      double g_left = 0.0;
      double h_left = 0.0;
      for (std::size_t k = 0; k + 1 < sorted.size(); ++k) {
        g_left += g_(sorted[k]);
        h_left += h_(sorted[k]);
        const double here = x_(sorted[k], f);
        const double next = x_(sorted[k + 1], f);
        if (!(here < next)) continue;
        const double gain = score(g_left, h_left) +
                            score(g_total - g_left, h_total - h_left) - parent;
        if (gain > best_gain) {
          best_gain = gain;
          best_feature = static_cast<int>(f);
          double mid = here + (next - here) / 2.0;
          if (!(mid > here)) mid = next;
          best_threshold = mid;
        }
      }
    }
    if (best_feature < 0) return at;

    std::vector<Eigen::Index> left;
    std::vector<Eigen::Index> right;
    for (const auto i : samples) {
      (x_(i, best_feature) < best_threshold ? left : right).push_back(i);
    }
    tree_.nodes[at].feature = best_feature;
    tree_.nodes[at].threshold = best_threshold;
    tree_.nodes[at].value = 0.0;
    const int l = grow(left, depth + 1);
    const int r = grow(right, depth + 1);
    tree_.nodes[at].left = l;
    tree_.nodes[at].right = r;
    return at;
  }

  const Eigen::MatrixXd& x_;
  const Eigen::VectorXd& g_;
  const Eigen::VectorXd& h_;
  const GtbParams& params_;
  RegressionTree tree_;
};

}  // namespace

TreeEnsemble fit_tree_ensemble(const Eigen::MatrixXd& features,
                               const Eigen::VectorXd& labels, const LossSpec& loss,
                               const GtbParams& params) {
  if (features.rows() == 0 || features.rows() != labels.size()) {
    throw TrainingError("tree ensemble needs a non-empty, consistent dataset");
  }
  TreeEnsemble ensemble;
  ensemble.base_score = labels.mean();
  ensemble.learning_rate = params.learning_rate;

  const Eigen::Index n = labels.size();
  Eigen::VectorXd prediction = Eigen::VectorXd::Constant(n, ensemble.base_score);
  Eigen::VectorXd g(n);
  Eigen::VectorXd h(n);
  for (int t = 0; t < params.n_trees; ++t) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double r = prediction(i) - labels(i);
      g(i) = loss_gradient(r, loss);
      h(i) = std::max(loss_hessian(r, loss), params.hessian_floor);
    }
    RegressionTree tree = TreeBuilder(features, g, h, params).build();
    for (Eigen::Index i = 0; i < n; ++i) {
      prediction(i) += params.learning_rate * tree.predict(features.row(i).transpose());
    }
    ensemble.trees.push_back(std::move(tree));
  }
  return ensemble;
}

nlohmann::json to_json(const TreeEnsemble& ensemble) {
  nlohmann::json trees = nlohmann::json::array();
  for (const auto& tree : ensemble.trees) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& node : tree.nodes) {
      if (node.is_leaf()) {
        nodes.push_back({{"leaf", node.value}});
      } else {
        nodes.push_back({{"feature", node.feature},
                         {"threshold", node.threshold},
                         {"left", node.left},
                         {"right", node.right}});
      }
    }
    trees.push_back({{"nodes", std::move(nodes)}});
  }
  return {{"base_score", ensemble.base_score},
          {"learning_rate", ensemble.learning_rate},
          {"trees", std::move(trees)}};
}

TreeEnsemble tree_ensemble_from_json(const nlohmann::json& doc) {
  TreeEnsemble ensemble;
  ensemble.base_score = doc.at("base_score").get<double>();
  ensemble.learning_rate = doc.at("learning_rate").get<double>();
  for (const auto& tree_doc : doc.at("trees")) {
    RegressionTree tree;
    const auto& nodes = tree_doc.at("nodes");
    const auto count = static_cast<int>(nodes.size());
    for (int at = 0; at < count; ++at) {
      const auto& node_doc = nodes[static_cast<std::size_t>(at)];
      TreeNode node;
      if (node_doc.contains("leaf")) {
        node.value = node_doc.at("leaf").get<double>();
      } else {
        node.feature = node_doc.at("feature").get<int>();
        node.threshold = node_doc.at("threshold").get<double>();
        node.left = node_doc.at("left").get<int>();
        node.right = node_doc.at("right").get<int>();
        // Children always follow their parent, which rules out cycles.
        if (node.feature < 0 || node.left <= at || node.right <= at ||
            node.left >= count || node.right >= count) {
          throw ParseError("malformed tree node", "/parameters/trees");
        }
      }
      tree.nodes.push_back(node);
    }
    if (tree.nodes.empty()) throw ParseError("empty tree", "/parameters/trees");
    ensemble.trees.push_back(std::move(tree));
  }
  return ensemble;
}

}  // namespace objbound
