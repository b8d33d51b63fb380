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

#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "objbound/loss.hpp"

namespace objbound {

struct MlpParams {
  std::vector<int> hidden = {64, 64, 64, 64, 64};
  double learning_rate = 1e-3;
  int epochs = 200;
  int batch_size = 32;

  friend bool operator==(const MlpParams&, const MlpParams&) = default;
};

template <typename Scalar>
struct DenseLayer {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Matrix weights;  // outputs x inputs
  Vector bias;
};

// Feed-forward regressor: standardized inputs, ReLU hidden layers and a
// single sigmoid output in [0, 1]. Examples are columns throughout.
template <typename Scalar>
struct BasicMlp {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

  Vector input_mean;
  Vector input_scale;
  std::vector<DenseLayer<Scalar>> layers;

  template <typename NewScalar>
  BasicMlp<NewScalar> cast() const {
    BasicMlp<NewScalar> out;
    out.input_mean = input_mean.template cast<NewScalar>();
    out.input_scale = input_scale.template cast<NewScalar>();
    for (const auto& layer : layers) {
      out.layers.push_back({layer.weights.template cast<NewScalar>(),
                            layer.bias.template cast<NewScalar>()});
    }
    return out;
  }

  Matrix standardize(const Matrix& inputs) const {
    return (inputs.colwise() - input_mean).array().colwise() / input_scale.array();
  }

  // Pre-activations of every layer for a batch of raw inputs.
  std::vector<Matrix> forward(const Matrix& inputs) const {
    std::vector<Matrix> z;
    z.reserve(layers.size());
    Matrix a = standardize(inputs);
    for (std::size_t l = 0; l < layers.size(); ++l) {
      z.push_back((layers[l].weights * a).colwise() + layers[l].bias);
      if (l + 1 < layers.size()) a = z.back().cwiseMax(Scalar(0));
    }
    return z;
  }

  RowVector predict_batch(const Matrix& inputs) const {
    const auto z = forward(inputs);
    return z.back().row(0).unaryExpr([](Scalar v) { return sigmoid(v); });
  }

  Scalar predict(const Vector& input) const { return predict_batch(input)(0); }

  static Scalar sigmoid(Scalar v) {
    using std::exp;
    return v >= Scalar(0) ? Scalar(1) / (Scalar(1) + exp(-v))
                          : exp(v) / (Scalar(1) + exp(v));
  }
};

using Mlp = BasicMlp<double>;

template <typename Scalar>
struct MlpGradient {
  Scalar loss = 0;
  std::vector<DenseLayer<Scalar>> layers;
};

// Mean batch loss of loss_value(prediction - target) and its gradient with
// respect to every weight and bias.
template <typename Scalar>
MlpGradient<Scalar> mlp_loss_gradient(
    const BasicMlp<Scalar>& net,
    const typename BasicMlp<Scalar>::Matrix& inputs,
    const typename BasicMlp<Scalar>::RowVector& targets, const LossSpec& loss) {
  using Matrix = typename BasicMlp<Scalar>::Matrix;
  const auto batch = static_cast<Scalar>(inputs.cols());
  const auto z = net.forward(inputs);

  MlpGradient<Scalar> out;
  out.layers.resize(net.layers.size());

  Matrix delta(1, inputs.cols());
  for (Eigen::Index i = 0; i < inputs.cols(); ++i) {
    const Scalar p = BasicMlp<Scalar>::sigmoid(z.back()(0, i));
    const Scalar r = p - targets(i);
    out.loss += loss_value(r, loss) / batch;
    delta(0, i) = loss_gradient(r, loss) / batch * p * (Scalar(1) - p);
  }

  const Matrix standardized = net.standardize(inputs);
  for (std::size_t l = net.layers.size(); l-- > 0;) {
    const Matrix activation = l == 0 ? standardized : Matrix(z[l - 1].cwiseMax(Scalar(0)));
    out.layers[l].weights = delta * activation.transpose();
    out.layers[l].bias = delta.rowwise().sum();
    if (l > 0) {
      const Matrix upstream = net.layers[l].weights.transpose() * delta;
      delta = upstream.array() * (z[l - 1].array() > Scalar(0)).template cast<Scalar>();
    }
  }
  return out;
}

// Glorot-uniform weights, zero biases, identity standardization.
Mlp init_mlp(Eigen::Index inputs, const MlpParams& params, std::uint64_t seed);

// Mini-batch Adam on the mean loss; batches reshuffled every epoch.
Mlp fit_mlp(const Eigen::MatrixXd& features, const Eigen::VectorXd& labels,
            const LossSpec& loss, const MlpParams& params, std::uint64_t seed);

nlohmann::json to_json(const Mlp& net);
Mlp mlp_from_json(const nlohmann::json& doc);

}  // namespace objbound
