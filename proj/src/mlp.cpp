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

#include "objbound/mlp.hpp"

#include <numeric>

#include "objbound/error.hpp"
#include "objbound/random.hpp"

namespace objbound {

namespace {

constexpr double kBeta1 = 0.9;
constexpr double kBeta2 = 0.999;
constexpr double kAdamEpsilon = 1e-7;

template <typename Scalar>
struct AdamState {
  typename BasicMlp<Scalar>::Matrix m_w, v_w;
  typename BasicMlp<Scalar>::Vector m_b, v_b;
};

}  // namespace

Mlp init_mlp(Eigen::Index inputs, const MlpParams& params, std::uint64_t seed) {
  Rng rng(derive_seed(seed, 0x4d4c50));
  Mlp net;
  net.input_mean = Eigen::VectorXd::Zero(inputs);
  net.input_scale = Eigen::VectorXd::Ones(inputs);
  std::vector<Eigen::Index> widths{inputs};
  for (const int h : params.hidden) widths.push_back(h);
  widths.push_back(1);
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    const Eigen::Index fan_in = widths[l];
    const Eigen::Index fan_out = widths[l + 1];
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    DenseLayer<double> layer;
    layer.weights.resize(fan_out, fan_in);
    for (Eigen::Index c = 0; c < fan_in; ++c) {
      for (Eigen::Index r = 0; r < fan_out; ++r) {
        layer.weights(r, c) = uniform_real(rng, -limit, limit);
      }
    }
    layer.bias = Eigen::VectorXd::Zero(fan_out);
    net.layers.push_back(std::move(layer));
  }
  return net;
}

Mlp fit_mlp(const Eigen::MatrixXd& features, const Eigen::VectorXd& labels,
            const LossSpec& loss, const MlpParams& params, std::uint64_t seed) {
  const Eigen::Index n = features.rows();
  if (n == 0 || n != labels.size()) {
    throw TrainingError("network needs a non-empty, consistent dataset");
  }
  if (params.batch_size < 1 || params.epochs < 0) {
    throw TrainingError("invalid network batch size or epoch count");
  }
  Mlp net = init_mlp(features.cols(), params, seed);
  net.input_mean = features.colwise().mean().transpose();
  net.input_scale =
      ((features.rowwise() - net.input_mean.transpose()).array().square().colwise().mean())
          .sqrt()
          .transpose();
  for (auto& s : net.input_scale) {
    if (!(s > 0.0)) s = 1.0;
  }

  using Scalar = double;
  using Matrix = BasicMlp<Scalar>::Matrix;
  using Vector = BasicMlp<Scalar>::Vector;
  BasicMlp<Scalar> work = net.cast<Scalar>();
  std::vector<AdamState<Scalar>> state;
  for (const auto& layer : work.layers) {
    const auto rows = layer.weights.rows();
    const auto cols = layer.weights.cols();
    state.push_back({Matrix::Zero(rows, cols), Matrix::Zero(rows, cols),
                     Vector::Zero(rows), Vector::Zero(rows)});
  }

  const Matrix inputs = features.transpose().cast<Scalar>();
  const auto targets = labels.cast<Scalar>();
  Rng rng(derive_seed(seed, 0x42415443));
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  const auto batch_size = static_cast<Eigen::Index>(params.batch_size);

  Matrix batch_inputs;
  BasicMlp<Scalar>::RowVector batch_targets;
  long step = 0;
  for (int epoch = 0; epoch < params.epochs; ++epoch) {
    shuffle(std::span<Eigen::Index>(order), rng);
    for (Eigen::Index start = 0; start < n; start += batch_size) {
      const Eigen::Index count = std::min(batch_size, n - start);
      batch_inputs.resize(inputs.rows(), count);
      batch_targets.resize(count);
      for (Eigen::Index k = 0; k < count; ++k) {
        const auto i = order[static_cast<std::size_t>(start + k)];
        batch_inputs.col(k) = inputs.col(i);
        batch_targets(k) = targets(i);
      }
      const auto grad = mlp_loss_gradient(work, batch_inputs, batch_targets, loss);

      ++step;
      const double correction1 = 1.0 - std::pow(kBeta1, static_cast<double>(step));
      const double correction2 = 1.0 - std::pow(kBeta2, static_cast<double>(step));
      const auto rate =
          static_cast<Scalar>(params.learning_rate * std::sqrt(correction2) / correction1);
      constexpr auto b1 = static_cast<Scalar>(kBeta1);
      constexpr auto b2 = static_cast<Scalar>(kBeta2);
      constexpr auto eps = static_cast<Scalar>(kAdamEpsilon);
      for (std::size_t l = 0; l < work.layers.size(); ++l) {
        auto& s = state[l];
        const auto& gw = grad.layers[l].weights;
        const auto& gb = grad.layers[l].bias;
        s.m_w = b1 * s.m_w + (1 - b1) * gw;
        s.v_w = b2 * s.v_w + (1 - b2) * gw.cwiseAbs2();
        s.m_b = b1 * s.m_b + (1 - b1) * gb;
        s.v_b = b2 * s.v_b + (1 - b2) * gb.cwiseAbs2();
        work.layers[l].weights.array() -= rate * s.m_w.array() / (s.v_w.array().sqrt() + eps);
        work.layers[l].bias.array() -= rate * s.m_b.array() / (s.v_b.array().sqrt() + eps);
      }
    }
  }
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    net.layers[l].weights = work.layers[l].weights.cast<double>();
    net.layers[l].bias = work.layers[l].bias.cast<double>();
  }
  return net;
}

namespace {

std::vector<double> flatten(const Eigen::MatrixXd& m) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) out.push_back(m(r, c));
  }
  return out;
}

Eigen::VectorXd vector_from(const nlohmann::json& doc) {
  const auto values = doc.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(values.data(),
                                           static_cast<Eigen::Index>(values.size()));
}

}  // namespace

nlohmann::json to_json(const Mlp& net) {
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& layer : net.layers) {
    layers.push_back({{"rows", layer.weights.rows()},
                      {"cols", layer.weights.cols()},
                      {"weights", flatten(layer.weights)},
                      {"bias", flatten(layer.bias)}});
  }
  return {{"input_mean", flatten(net.input_mean)},
          {"input_scale", flatten(net.input_scale)},
          {"activation", "relu"},
          {"output", "sigmoid"},
          {"layers", std::move(layers)}};
}

Mlp mlp_from_json(const nlohmann::json& doc) {
  Mlp net;
  net.input_mean = vector_from(doc.at("input_mean"));
  net.input_scale = vector_from(doc.at("input_scale"));
  Eigen::Index width = net.input_mean.size();
  if (net.input_scale.size() != width) {
    throw ParseError("input scale size mismatch", "/parameters/input_scale");
  }
  for (const auto& layer_doc : doc.at("layers")) {
    const auto rows = layer_doc.at("rows").get<Eigen::Index>();
    const auto cols = layer_doc.at("cols").get<Eigen::Index>();
    const auto weights = layer_doc.at("weights").get<std::vector<double>>();
    DenseLayer<double> layer;
    layer.bias = vector_from(layer_doc.at("bias"));
    if (cols != width || rows < 1 || static_cast<Eigen::Index>(weights.size()) != rows * cols ||
        layer.bias.size() != rows) {
      throw ParseError("layer shape mismatch", "/parameters/layers");
    }
    layer.weights = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                                   Eigen::RowMajor>>(weights.data(), rows, cols);
    net.layers.push_back(std::move(layer));
    width = rows;
  }
  if (net.layers.empty() || width != 1) {
    throw ParseError("network must end in a single output", "/parameters/layers");
  }
  return net;
}

}  // namespace objbound
