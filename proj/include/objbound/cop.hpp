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
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace objbound {

enum class Sense { kMinimize, kMaximize };

enum class ProblemClass { kBinPacking, kJobshop, kKnapsack };

// bin-packing and jobshop minimize, knapsack maximizes.
Sense sense_of(ProblemClass problem);
std::string_view to_string(ProblemClass problem);
std::string_view to_string(Sense sense);
ProblemClass parse_problem_class(std::string_view name);
Sense parse_sense(std::string_view name);

using IntList = std::vector<std::int64_t>;
using IntMatrix = std::vector<IntList>;
using ParamValue = std::variant<std::int64_t, IntList, IntMatrix>;
using ParamMap = std::map<std::string, ParamValue>;

struct Instance {
  std::string id;
  ProblemClass problem = ProblemClass::kBinPacking;
  ParamMap params;
  std::int64_t objective_lb = 0;
  std::int64_t objective_ub = 0;
  std::optional<std::int64_t> known_optimum;

  Sense sense() const { return sense_of(problem); }

  friend bool operator==(const Instance&, const Instance&) = default;
};

// Checks the domain invariants and the class-specific parameter set.
// Throws ValidationError naming the offending parameter.
void validate(const Instance& instance);

// Fixture builders; the objective domain gets the class's trivial bounds.
Instance make_bin_packing(std::string id, IntList weights,
                          std::int64_t capacity);
Instance make_knapsack(std::string id, IntList values, IntList weights,
                       std::int64_t capacity);
// durations[j][k] and machines[j][k] describe the k-th operation of job j.
Instance make_jobshop(std::string id, IntMatrix durations, IntMatrix machines);

struct SizeRange {
  int min;
  int max;
};

// Accepted `size` values of generate_instance. For jobshop the size is both
// the job and the machine count.
SizeRange size_limits(ProblemClass problem);

// Deterministic in (problem, size, seed). Throws RangeError when `size` is
// outside size_limits(problem).
Instance generate_instance(ProblemClass problem, int size, std::uint64_t seed);
Instance generate_jobshop(int jobs, int machines, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Flat constraint systems.

enum class Relation { kLessEqual, kEqual, kGreaterEqual };

struct Term {
  std::int64_t coeff;
  int var;

  friend bool operator==(const Term&, const Term&) = default;
};

struct LinearConstraint {
  std::vector<Term> terms;
  Relation op = Relation::kLessEqual;
  std::int64_t rhs = 0;

  friend bool operator==(const LinearConstraint&,
                         const LinearConstraint&) = default;
};

// At least one side holds.
struct Disjunction {
  LinearConstraint left;
  LinearConstraint right;

  friend bool operator==(const Disjunction&, const Disjunction&) = default;
};

using Constraint = std::variant<LinearConstraint, Disjunction>;

struct Variable {
  std::string name;
  std::int64_t lb;
  std::int64_t ub;

  friend bool operator==(const Variable&, const Variable&) = default;
};

struct FlatModel {
  std::vector<Variable> variables;
  std::vector<Constraint> constraints;
  int objective_var = -1;
  Sense sense = Sense::kMinimize;

  const Variable& objective() const { return variables.at(objective_var); }

  // Throws ValidationError if a domain is empty, the objective is undeclared,
  // a constraint references an unknown variable, or a linear constraint is
  // empty or carries a zero coefficient.
  void validate() const;

  friend bool operator==(const FlatModel&, const FlatModel&) = default;
};

// Encodes an instance as a flat model whose objective variable spans
// objective_lb..objective_ub. Throws ValidationError on malformed params.
FlatModel compile(const Instance& instance);

// ---------------------------------------------------------------------------

// Estimated objective domain est_lb..est_ub.
struct BoundaryEstimate {
  std::int64_t est_lb = 0;
  std::int64_t est_ub = 0;
  bool clamped_lb = false;
  bool clamped_ub = false;
  bool crossed = false;

  friend bool operator==(const BoundaryEstimate&,
                         const BoundaryEstimate&) = default;
};

inline BoundaryEstimate original_domain(const Instance& instance) {
  return {instance.objective_lb, instance.objective_ub, false, false, false};
}

}  // namespace objbound
