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

#include "objbound/cop.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "objbound/error.hpp"
#include "objbound/random.hpp"

namespace objbound {

Sense sense_of(ProblemClass problem) {
  return problem == ProblemClass::kKnapsack ? Sense::kMaximize
                                            : Sense::kMinimize;
}

std::string_view to_string(ProblemClass problem) {
  switch (problem) {
    case ProblemClass::kBinPacking:
      return "bin-packing";
    case ProblemClass::kJobshop:
      return "jobshop";
    case ProblemClass::kKnapsack:
      return "knapsack";
  }
  return "?";
}

std::string_view to_string(Sense sense) {
  return sense == Sense::kMinimize ? "min" : "max";
}

ProblemClass parse_problem_class(std::string_view name) {
  if (name == "bin-packing") return ProblemClass::kBinPacking;
  if (name == "jobshop") return ProblemClass::kJobshop;
  if (name == "knapsack") return ProblemClass::kKnapsack;
  throw ValidationError("unknown problem class '" + std::string(name) + "'");
}

Sense parse_sense(std::string_view name) {
  if (name == "min") return Sense::kMinimize;
  if (name == "max") return Sense::kMaximize;
  throw ValidationError("unknown sense '" + std::string(name) + "'");
}

namespace {

const ParamValue& require_param(const Instance& instance,
                                const std::string& name) {
  const auto it = instance.params.find(name);
  if (it == instance.params.end()) {
    throw ValidationError("missing parameter '" + name + "' for class " +
                          std::string(to_string(instance.problem)));
  }
  return it->second;
}

template <typename T>
const T& param_as(const Instance& instance, const std::string& name) {
  const ParamValue& value = require_param(instance, name);
  if (!std::holds_alternative<T>(value)) {
    throw ValidationError("parameter '" + name + "' has the wrong shape");
  }
  return std::get<T>(value);
}

void check(bool condition, const std::string& param, const char* what) {
  if (!condition) {
    throw ValidationError("parameter '" + param + "': " + what);
  }
}

void expect_only(const Instance& instance,
                 std::initializer_list<std::string_view> names) {
  for (const auto& [name, value] : instance.params) {
    if (std::find(names.begin(), names.end(), name) == names.end()) {
      throw ValidationError("unexpected parameter '" + name + "' for class " +
                            std::string(to_string(instance.problem)));
    }
  }
}

void validate_bin_packing(const Instance& instance) {
  expect_only(instance, {"capacity", "weights"});
  const auto capacity = param_as<std::int64_t>(instance, "capacity");
  const auto& weights = param_as<IntList>(instance, "weights");
  check(capacity >= 1, "capacity", "must be positive");
  check(!weights.empty(), "weights", "must not be empty");
  for (const auto w : weights) {
    check(w >= 1 && w <= capacity, "weights", "every weight must lie in 1..capacity");
  }
}

void validate_knapsack(const Instance& instance) {
  expect_only(instance, {"capacity", "values", "weights"});
  const auto capacity = param_as<std::int64_t>(instance, "capacity");
  const auto& values = param_as<IntList>(instance, "values");
  const auto& weights = param_as<IntList>(instance, "weights");
  check(capacity >= 0, "capacity", "must be non-negative");
  check(!values.empty(), "values", "must not be empty");
  check(values.size() == weights.size(), "weights",
        "must have the same length as values");
  for (const auto v : values) check(v >= 1, "values", "must be positive");
  for (const auto w : weights) check(w >= 1, "weights", "must be positive");
}

void validate_jobshop(const Instance& instance) {
  expect_only(instance, {"durations", "machines"});
  const auto& durations = param_as<IntMatrix>(instance, "durations");
  const auto& machines = param_as<IntMatrix>(instance, "machines");
  check(!durations.empty(), "durations", "must contain at least one job");
  check(durations.size() == machines.size(), "machines",
        "must have one row per job");
  for (std::size_t j = 0; j < durations.size(); ++j) {
    check(!durations[j].empty(), "durations", "every job needs an operation");
    check(durations[j].size() == machines[j].size(), "machines",
          "row shape must match durations");
    for (const auto d : durations[j]) {
      check(d >= 1, "durations", "must be positive");
    }
    for (const auto m : machines[j]) {
      check(m >= 0, "machines", "machine indices must be non-negative");
    }
  }
}

std::int64_t sum(const IntList& values) {
  return std::accumulate(values.begin(), values.end(), std::int64_t{0});
}

}  // namespace

void validate(const Instance& instance) {
  switch (instance.problem) {
    case ProblemClass::kBinPacking:
      validate_bin_packing(instance);
      break;
    case ProblemClass::kJobshop:
      validate_jobshop(instance);
      break;
    case ProblemClass::kKnapsack:
      validate_knapsack(instance);
      break;
  }
  if (instance.objective_lb > instance.objective_ub) {
    throw ValidationError("objective_lb exceeds objective_ub");
  }
  if (instance.known_optimum &&
      (*instance.known_optimum < instance.objective_lb ||
       *instance.known_optimum > instance.objective_ub)) {
    throw ValidationError("known_optimum outside the objective domain");
  }
}

Instance make_bin_packing(std::string id, IntList weights,
                          std::int64_t capacity) {
  Instance instance;
  instance.id = std::move(id);
  instance.problem = ProblemClass::kBinPacking;
  instance.objective_lb = 1;
  instance.objective_ub = static_cast<std::int64_t>(weights.size());
  instance.params["capacity"] = capacity;
  instance.params["weights"] = std::move(weights);
  validate(instance);
  return instance;
}

Instance make_knapsack(std::string id, IntList values, IntList weights,
                       std::int64_t capacity) {
  Instance instance;
  instance.id = std::move(id);
  instance.problem = ProblemClass::kKnapsack;
  instance.objective_lb = 0;
  instance.objective_ub = sum(values);
  instance.params["capacity"] = capacity;
  instance.params["values"] = std::move(values);
  instance.params["weights"] = std::move(weights);
  validate(instance);
  return instance;
}

Instance make_jobshop(std::string id, IntMatrix durations, IntMatrix machines) {
  Instance instance;
  instance.id = std::move(id);
  instance.problem = ProblemClass::kJobshop;
  std::int64_t longest_job = 0;
  std::int64_t total = 0;
  for (const auto& job : durations) {
    longest_job = std::max(longest_job, sum(job));
    total += sum(job);
  }
  instance.objective_lb = longest_job;
  instance.objective_ub = total;
  instance.params["durations"] = std::move(durations);
  instance.params["machines"] = std::move(machines);
  validate(instance);
  return instance;
}

SizeRange size_limits(ProblemClass problem) {
  switch (problem) {
    case ProblemClass::kBinPacking:
      return {4, 60};
    case ProblemClass::kJobshop:
      return {2, 6};
    case ProblemClass::kKnapsack:
      return {4, 40};
  }
  return {0, -1};
}

namespace {

void check_size(ProblemClass problem, int size, const char* what) {
  const auto limits = size_limits(problem);
  if (size < limits.min || size > limits.max) {
    throw RangeError(std::string(to_string(problem)) + " " + what + " " +
                     std::to_string(size) + " outside " +
                     std::to_string(limits.min) + ".." +
                     std::to_string(limits.max));
  }
}

Instance generate_bin_packing(int size, std::uint64_t seed) {
  Rng rng(derive_seed(seed, 1));
  const std::int64_t capacity = 100;
  const auto heaviest = std::max<std::int64_t>(
      2, std::llround(static_cast<double>(capacity) * uniform_real(rng, 0.25, 0.75)));
  const std::int64_t lightest = std::max<std::int64_t>(1, capacity / 20);
  IntList weights(static_cast<std::size_t>(size));
  for (auto& w : weights) w = uniform_int(rng, lightest, heaviest);
  return make_bin_packing("bin-packing-n" + std::to_string(size) + "-s" +
                              std::to_string(seed),
                          std::move(weights), capacity);
}

Instance generate_knapsack(int size, std::uint64_t seed) {
  Rng rng(derive_seed(seed, 2));
  IntList values(static_cast<std::size_t>(size));
  IntList weights(static_cast<std::size_t>(size));
  for (std::size_t i = 0; i < weights.size(); ++i) {
    weights[i] = uniform_int(rng, 5, 40);
    values[i] = std::max<std::int64_t>(1, weights[i] + uniform_int(rng, -4, 15));
  }
  const auto capacity = std::llround(static_cast<double>(sum(weights)) *
                                     uniform_real(rng, 0.25, 0.6));
  return make_knapsack("knapsack-n" + std::to_string(size) + "-s" +
                           std::to_string(seed),
                       std::move(values), std::move(weights), capacity);
}

}  // namespace

Instance generate_jobshop(int jobs, int machines, std::uint64_t seed) {
  check_size(ProblemClass::kJobshop, jobs, "job count");
  check_size(ProblemClass::kJobshop, machines, "machine count");
  Rng rng(derive_seed(seed, 3));
  IntMatrix durations(static_cast<std::size_t>(jobs));
  IntMatrix routing(static_cast<std::size_t>(jobs));
  for (int j = 0; j < jobs; ++j) {
    IntList order(static_cast<std::size_t>(machines));
    std::iota(order.begin(), order.end(), 0);
    shuffle(std::span<std::int64_t>(order), rng);
    routing[j] = std::move(order);
    durations[j].resize(static_cast<std::size_t>(machines));
    for (auto& d : durations[j]) d = uniform_int(rng, 1, 10);
  }
  return make_jobshop("jobshop-" + std::to_string(jobs) + "x" +
                          std::to_string(machines) + "-s" +
                          std::to_string(seed),
                      std::move(durations), std::move(routing));
}

Instance generate_instance(ProblemClass problem, int size, std::uint64_t seed) {
  check_size(problem, size, "size");
  switch (problem) {
    case ProblemClass::kBinPacking:
      return generate_bin_packing(size, seed);
    case ProblemClass::kJobshop:
      return generate_jobshop(size, size, seed);
    case ProblemClass::kKnapsack:
      return generate_knapsack(size, seed);
  }
  throw RangeError("unknown problem class");
}

// ---------------------------------------------------------------------------

void FlatModel::validate() const {
  const auto n = static_cast<int>(variables.size());
  for (const auto& v : variables) {
    if (v.lb > v.ub) {
      throw ValidationError("variable '" + v.name + "' has an empty domain");
    }
  }
  if (objective_var < 0 || objective_var >= n) {
    throw ValidationError("objective variable is not declared");
  }
  const auto check_linear = [n](const LinearConstraint& c) {
    if (c.terms.empty()) throw ValidationError("linear constraint without terms");
    for (const auto& t : c.terms) {
      if (t.coeff == 0) throw ValidationError("zero coefficient in constraint");
      if (t.var < 0 || t.var >= n) {
        throw ValidationError("constraint references an undeclared variable");
      }
    }
  };
  for (const auto& c : constraints) {
    if (const auto* lin = std::get_if<LinearConstraint>(&c)) {
      check_linear(*lin);
    } else {
      const auto& d = std::get<Disjunction>(c);
      check_linear(d.left);
      check_linear(d.right);
    }
  }
}

namespace {

class ModelBuilder {
 public:
  explicit ModelBuilder(Sense sense) { model_.sense = sense; }

  int add_variable(std::string name, std::int64_t lb, std::int64_t ub) {
    model_.variables.push_back({std::move(name), lb, ub});
    return static_cast<int>(model_.variables.size()) - 1;
  }

  void add(LinearConstraint c) { model_.constraints.emplace_back(std::move(c)); }
  void add(Disjunction d) { model_.constraints.emplace_back(std::move(d)); }

  FlatModel finish(int objective) && {
    model_.objective_var = objective;
    model_.validate();
    return std::move(model_);
  }

 private:
  FlatModel model_;
};

// Indices of `keys` ordered by a strict weak ordering, ties by position.
template <typename Less>
std::vector<std::size_t> stable_order(std::size_t n, Less less) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), less);
  return order;
}

FlatModel compile_knapsack(const Instance& instance) {
  const auto capacity = param_as<std::int64_t>(instance, "capacity");
  const auto& values = param_as<IntList>(instance, "values");
  const auto& weights = param_as<IntList>(instance, "weights");

  // Best value density first: with the maximize value ordering this makes
  // the first dive a greedy fill.
  const auto order = stable_order(values.size(), [&](std::size_t a, std::size_t b) {
    return values[a] * weights[b] > values[b] * weights[a];
  });

  ModelBuilder builder(Sense::kMaximize);
  LinearConstraint load{{}, Relation::kLessEqual, capacity};
  LinearConstraint link{{}, Relation::kEqual, 0};
  for (const auto i : order) {
    const int x = builder.add_variable("take[" + std::to_string(i) + "]", 0, 1);
    load.terms.push_back({weights[i], x});
    link.terms.push_back({values[i], x});
  }
  const int z = builder.add_variable("objective", instance.objective_lb,
                                     instance.objective_ub);
  link.terms.push_back({-1, z});
  builder.add(std::move(load));
  builder.add(std::move(link));
  return std::move(builder).finish(z);
}

// Item i (in decreasing weight order) may only use bins 0..i and used bins
// form a prefix. Every packing can be relabelled into that form, so the
// optimum is preserved while bin-permutation symmetry disappears.
FlatModel compile_bin_packing(const Instance& instance) {
  const auto capacity = param_as<std::int64_t>(instance, "capacity");
  const auto& weights = param_as<IntList>(instance, "weights");
  const std::size_t n = weights.size();
  const auto bins = static_cast<std::size_t>(
      std::clamp<std::int64_t>(instance.objective_ub, 1, static_cast<std::int64_t>(n)));

  const auto order = stable_order(
      n, [&](std::size_t a, std::size_t b) { return weights[a] > weights[b]; });

  // Bin flags come first: with ties broken by declaration order the search
  // settles how many bins are open (from the fewest up) before packing.
  ModelBuilder builder(Sense::kMinimize);
  std::vector<int> used(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    used[b] = builder.add_variable("used[" + std::to_string(b) + "]", 0, 1);
  }
  std::vector<std::vector<int>> assign(n);
  for (std::size_t r = 0; r < n; ++r) {
    const auto item = order[r];
    for (std::size_t b = 0; b <= r && b < bins; ++b) {
      assign[r].push_back(builder.add_variable(
          "assign[" + std::to_string(item) + "][" + std::to_string(b) + "]", 0, 1));
    }
  }
  const int z = builder.add_variable("objective", instance.objective_lb,
                                     instance.objective_ub);

  for (std::size_t r = 0; r < n; ++r) {
    LinearConstraint once{{}, Relation::kEqual, 1};
    for (const int x : assign[r]) once.terms.push_back({1, x});
    builder.add(std::move(once));
  }
  for (std::size_t b = 0; b < bins; ++b) {
    LinearConstraint load{{}, Relation::kLessEqual, 0};
    for (std::size_t r = b; r < n; ++r) {
      load.terms.push_back({weights[order[r]], assign[r][b]});
    }
    load.terms.push_back({-capacity, used[b]});
    builder.add(std::move(load));
  }
  for (std::size_t b = 0; b + 1 < bins; ++b) {
    builder.add(LinearConstraint{{{1, used[b]}, {-1, used[b + 1]}},
                                 Relation::kGreaterEqual, 0});
  }
  // Implied: the opened capacity covers the total weight.
  LinearConstraint cover{{}, Relation::kGreaterEqual, sum(weights)};
  LinearConstraint link{{}, Relation::kEqual, 0};
  for (const int y : used) {
    cover.terms.push_back({capacity, y});
    link.terms.push_back({1, y});
  }
  link.terms.push_back({-1, z});
  builder.add(std::move(cover));
  builder.add(std::move(link));
  return std::move(builder).finish(z);
}

FlatModel compile_jobshop(const Instance& instance) {
  const auto& durations = param_as<IntMatrix>(instance, "durations");
  const auto& machines = param_as<IntMatrix>(instance, "machines");
  const std::int64_t horizon = instance.objective_ub;

  ModelBuilder builder(Sense::kMinimize);
  struct Operation {
    int start;
    std::int64_t duration;
    std::int64_t machine;
    std::size_t job;
  };
  std::vector<Operation> ops;
  std::vector<std::vector<int>> starts(durations.size());
  for (std::size_t j = 0; j < durations.size(); ++j) {
    for (std::size_t k = 0; k < durations[j].size(); ++k) {
      const auto d = durations[j][k];
      const int s = builder.add_variable(
          "start[" + std::to_string(j) + "][" + std::to_string(k) + "]", 0,
          std::max<std::int64_t>(0, horizon - d));
      starts[j].push_back(s);
      ops.push_back({s, d, machines[j][k], j});
    }
  }
  const int z = builder.add_variable("makespan", instance.objective_lb,
                                     instance.objective_ub);

  for (std::size_t j = 0; j < durations.size(); ++j) {
    const auto& job = durations[j];
    for (std::size_t k = 0; k + 1 < job.size(); ++k) {
      builder.add(LinearConstraint{{{1, starts[j][k]}, {-1, starts[j][k + 1]}},
                                   Relation::kLessEqual, -job[k]});
    }
    builder.add(LinearConstraint{{{1, starts[j].back()}, {-1, z}},
                                 Relation::kLessEqual, -job.back()});
  }
  for (std::size_t a = 0; a < ops.size(); ++a) {
    for (std::size_t b = a + 1; b < ops.size(); ++b) {
      if (ops[a].machine != ops[b].machine || ops[a].job == ops[b].job) continue;
      builder.add(Disjunction{
          {{{1, ops[a].start}, {-1, ops[b].start}}, Relation::kLessEqual, -ops[a].duration},
          {{{1, ops[b].start}, {-1, ops[a].start}}, Relation::kLessEqual, -ops[b].duration}});
    }
  }
  return std::move(builder).finish(z);
}

}  // namespace

FlatModel compile(const Instance& instance) {
  validate(instance);
  switch (instance.problem) {
    case ProblemClass::kBinPacking:
      return compile_bin_packing(instance);
    case ProblemClass::kJobshop:
      return compile_jobshop(instance);
    case ProblemClass::kKnapsack:
      return compile_knapsack(instance);
  }
  throw ValidationError("unknown problem class");
}

}  // namespace objbound
