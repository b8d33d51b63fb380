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

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace objbound {

// The nine descriptive measures of a value collection. Population moments,
// quartiles by linear interpolation between closest ranks, Fisher skewness
// and excess kurtosis. Degenerate inputs (empty, fewer than three values, or
// zero spread) report 0 for the undefined moments.
struct StatSummary {
  double count = 0;
  double min = 0;
  double max = 0;
  double std = 0;
  double iqr = 0;
  double mean = 0;
  double median = 0;
  double skew = 0;
  double kurtosis = 0;

  static constexpr std::array<std::string_view, 9> kNames = {
      "count", "min", "max", "std", "iqr", "mean", "median", "skew", "kurtosis"};

  std::array<double, 9> values() const {
    return {count, min, max, std, iqr, mean, median, skew, kurtosis};
  }

  friend bool operator==(const StatSummary&, const StatSummary&) = default;
};

// Quantile of sorted data, position p * (n - 1) interpolated linearly.
template <typename Derived>
double interpolated_quantile(const Eigen::DenseBase<Derived>& sorted, double p) {
  const auto n = sorted.size();
  if (n == 0) return 0.0;
  const double position = p * static_cast<double>(n - 1);
  const auto below = static_cast<Eigen::Index>(std::floor(position));
  const auto above = std::min<Eigen::Index>(below + 1, n - 1);
  const double fraction = position - static_cast<double>(below);
  return sorted(below) + fraction * (sorted(above) - sorted(below));
}

template <typename Scalar>
StatSummary describe_collection(std::span<const Scalar> input) {
  StatSummary s;
  if (input.empty()) return s;

  const auto n = static_cast<Eigen::Index>(input.size());
  Eigen::ArrayXd x(n);
  for (Eigen::Index i = 0; i < n; ++i) x(i) = static_cast<double>(input[i]);
  std::sort(x.data(), x.data() + n);

  s.count = static_cast<double>(n);
  s.min = x(0);
  s.max = x(n - 1);
  s.mean = x.mean();
  s.median = interpolated_quantile(x, 0.5);
  s.iqr = interpolated_quantile(x, 0.75) - interpolated_quantile(x, 0.25);

  const Eigen::ArrayXd centered = x - s.mean;
  const double m2 = centered.square().mean();
  s.std = std::sqrt(m2);
  if (n >= 3 && s.std > 0.0) {
    s.skew = centered.cube().mean() / std::pow(m2, 1.5);
    s.kurtosis = centered.square().square().mean() / (m2 * m2) - 3.0;
  }
  // Rounding can push the mean a hair outside [min, max] on constant data.
  s.mean = std::clamp(s.mean, s.min, s.max);
  return s;
}

template <typename Scalar>
StatSummary describe_collection(const std::vector<Scalar>& input) {
  return describe_collection(std::span<const Scalar>(input));
}

// Population variance.
template <typename Derived>
double population_variance(const Eigen::DenseBase<Derived>& values) {
  if (values.size() == 0) return 0.0;
  const double mean = values.derived().mean();
  return (values.derived().array() - mean).square().mean();
}

}  // namespace objbound
