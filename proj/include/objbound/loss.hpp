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
#include <string_view>

namespace objbound {

enum class LossKind { kSquared, kShiftedSquared };

// Shifted squared error L(r) = r^2 (sgn(r) + alpha)^2 with r = prediction -
// target. alpha < 0 penalizes under-prediction more, alpha > 0 penalizes
// over-prediction more. alpha == 0 is plain squared error, so the factory
// canonicalizes it to kSquared.
struct LossSpec {
  LossKind kind = LossKind::kSquared;
  double alpha = 0.0;

  static LossSpec squared() { return {}; }
  static LossSpec shifted(double alpha);

  // Throws ValidationError unless alpha lies in [-1, 1] and kSquared carries
  // alpha == 0.
  void validate() const;

  friend bool operator==(const LossSpec&, const LossSpec&) = default;
};

std::string_view to_string(LossKind kind);
LossKind parse_loss_kind(std::string_view name);

template <typename Scalar>
constexpr Scalar signum(Scalar r) {
  return static_cast<Scalar>((Scalar(0) < r) - (r < Scalar(0)));
}

template <typename Scalar>
Scalar loss_value(Scalar r, const LossSpec& spec) {
  const Scalar w = signum(r) + static_cast<Scalar>(spec.alpha);
  return r * r * w * w;
}

// d/d(prediction) of loss_value.
template <typename Scalar>
Scalar loss_gradient(Scalar r, const LossSpec& spec) {
  const Scalar w = signum(r) + static_cast<Scalar>(spec.alpha);
  return Scalar(2) * r * w * w;
}

// The one-sided curvatures differ at the kink r = 0; with sgn(0) = 0 the
// value there is defined as 0, like the loss and the gradient.
template <typename Scalar>
Scalar loss_hessian(Scalar r, const LossSpec& spec) {
  if (r == Scalar(0)) return Scalar(0);
  const Scalar w = signum(r) + static_cast<Scalar>(spec.alpha);
  return Scalar(2) * w * w;
}

enum class Direction { kUnderestimate, kOverestimate };

std::string_view to_string(Direction direction);
Direction parse_direction(std::string_view name);

// Moves a scaled label toward the domain boundary on the safe side:
// overestimation y + lambda (1 - y), underestimation y - lambda y.
template <typename Scalar>
Scalar label_shift(Scalar y, Scalar lambda, Direction direction) {
  return direction == Direction::kOverestimate ? y + lambda * (Scalar(1) - y)
                                               : y - lambda * y;
}

// Maps the original objective domain lb..ub onto [0, 1].
class Scaler {
 public:
  Scaler(std::int64_t lb, std::int64_t ub);

  std::int64_t lb() const { return lb_; }
  std::int64_t ub() const { return ub_; }

  // A point domain scales everything to 0 and unscales to lb.
  double scale(double value) const {
    return ub_ == lb_ ? 0.0 : (value - static_cast<double>(lb_)) / width();
  }
  double unscale(double scaled) const {
    return static_cast<double>(lb_) + scaled * width();
  }

 private:
  double width() const { return static_cast<double>(ub_ - lb_); }

  std::int64_t lb_;
  std::int64_t ub_;
};

}  // namespace objbound
