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
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "objbound/cop.hpp"

namespace objbound {

struct Interval {
  std::int64_t lb;
  std::int64_t ub;

  bool empty() const { return lb > ub; }
  bool fixed() const { return lb == ub; }
  std::int64_t size() const { return ub - lb + 1; }

  friend bool operator==(const Interval&, const Interval&) = default;
};

using Domains = std::vector<Interval>;

Domains initial_domains(const FlatModel& model);

// Bounds consistency over a flat model. Linear constraints are kept as
// `sum <= rhs` rows; a disjunction enforces one side once the other is
// infeasible under the current bounds.
class Propagator {
 public:
  explicit Propagator(const FlatModel& model);

  // Narrows `domains` to the fixpoint. `changed` lists the variables whose
  // bounds moved since the last fixpoint; empty means "everything". Returns
  // false iff some domain empties.
  bool run(Domains& domains, std::span<const int> changed = {}) const;

 private:
  struct Row {
    std::vector<Term> terms;
    std::int64_t rhs;
  };
  struct Entry {
    std::vector<Row> rows;
    std::vector<Row> alternative;  // non-empty for disjunctions
  };

  const std::vector<Row>& rows_of(std::size_t entry, bool alternative) const;

  std::vector<Entry> entries_;
  std::vector<std::vector<std::size_t>> watchers_;
};

// Returns the fixpoint, or nullopt on failure.
std::optional<Domains> propagate(const FlatModel& model, Domains domains);

struct SolveConfig {
  std::int64_t node_budget = 10'000'000;
  std::int64_t time_budget_ms = 60'000;
  bool record_timeline = true;

  // Throws ValidationError unless both budgets are positive.
  void validate() const;
};

enum class SolveStatus { kOptimal, kSatisfiable, kUnsatisfiable, kBudgetExhausted };

std::string_view to_string(SolveStatus status);
SolveStatus parse_solve_status(std::string_view name);

struct Incumbent {
  std::int64_t objective;
  double elapsed_ms;
  std::int64_t nodes;

  friend bool operator==(const Incumbent&, const Incumbent&) = default;
};

struct SolveResult {
  SolveStatus status = SolveStatus::kBudgetExhausted;
  std::optional<std::int64_t> best_objective;
  std::vector<std::int64_t> best_solution;
  std::optional<Incumbent> first_solution;
  std::vector<Incumbent> timeline;
  std::int64_t nodes_explored = 0;
  double elapsed_ms = 0.0;
  bool fallback_used = false;

  bool completed() const {
    return status == SolveStatus::kOptimal || status == SolveStatus::kUnsatisfiable;
  }
};

// Depth-first branch and bound. Branches on the unfixed variable with the
// smallest domain (ties by declaration order), bisecting its domain and
// visiting the lower half first when minimizing, the upper half when
// maximizing. Each incumbent z* posts objective < z* (resp. > z*).
SolveResult solve(const FlatModel& model, const SolveConfig& config);

// Which objective bounds inject_bounds tightens: both, or only the cutting
// side (ub when minimizing, lb when maximizing).
enum class InjectMode { kBoth, kUpperOnly };

std::string_view to_string(InjectMode mode);
InjectMode parse_inject_mode(std::string_view name);

FlatModel inject_bounds(FlatModel model, const BoundaryEstimate& estimate, InjectMode mode);

// Solves the bounded model and, if that proves unsatisfiable, the original
// one. The reported effort and timeline cover both runs.
SolveResult solve_with_fallback(const FlatModel& model, const BoundaryEstimate& estimate,
                                InjectMode mode, const SolveConfig& config);

nlohmann::json solve_result_to_json(const SolveResult& result);
SolveResult solve_result_from_json(const nlohmann::json& doc);

}  // namespace objbound
