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

#include "objbound/solver.hpp"

#include <algorithm>
#include <chrono>
#include <deque>

#include "objbound/error.hpp"

namespace objbound {

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if (a % b != 0 && ((a < 0) != (b < 0))) --q;
  return q;
}

std::int64_t ceil_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if (a % b != 0 && ((a < 0) == (b < 0))) ++q;
  return q;
}

std::int64_t min_term(const Term& t, const Domains& d) {
  const auto& x = d[static_cast<std::size_t>(t.var)];
  return t.coeff > 0 ? t.coeff * x.lb : t.coeff * x.ub;
}

}  // namespace

Domains initial_domains(const FlatModel& model) {
  Domains domains;
  domains.reserve(model.variables.size());
  for (const auto& v : model.variables) domains.push_back({v.lb, v.ub});
  return domains;
}

Propagator::Propagator(const FlatModel& model) : watchers_(model.variables.size()) {
  const auto to_rows = [](const LinearConstraint& c) {
    std::vector<Row> rows;
    std::vector<Term> negated;
    for (const auto& t : c.terms) negated.push_back({-t.coeff, t.var});
    if (c.op != Relation::kGreaterEqual) rows.push_back({c.terms, c.rhs});
    if (c.op != Relation::kLessEqual) rows.push_back({negated, -c.rhs});
    return rows;
  };
  for (const auto& c : model.constraints) {
    Entry entry;
    if (const auto* lin = std::get_if<LinearConstraint>(&c)) {
      entry.rows = to_rows(*lin);
    } else {
      const auto& d = std::get<Disjunction>(c);
      entry.rows = to_rows(d.left);
      entry.alternative = to_rows(d.right);
    }
    const std::size_t index = entries_.size();
    std::vector<int> vars;
    for (const auto* side : {&entry.rows, &entry.alternative}) {
      for (const auto& row : *side) {
        for (const auto& t : row.terms) vars.push_back(t.var);
      }
    }
    std::sort(vars.begin(), vars.end());
    vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
    for (const int v : vars) watchers_[static_cast<std::size_t>(v)].push_back(index);
    entries_.push_back(std::move(entry));
  }
}

bool Propagator::run(Domains& domains, std::span<const int> changed) const {
  for (const auto& d : domains) {
    if (d.empty()) return false;
  }
  std::vector<char> queued(entries_.size(), 0);
  std::deque<std::size_t> queue;
  const auto enqueue = [&](std::size_t e) {
    if (!queued[e]) {
      queued[e] = 1;
      queue.push_back(e);
    }
  };
  if (changed.empty()) {
    for (std::size_t e = 0; e < entries_.size(); ++e) enqueue(e);
  } else {
    for (const int v : changed) {
      for (const auto e : watchers_[static_cast<std::size_t>(v)]) enqueue(e);
    }
  }

  const auto infeasible = [&](const std::vector<Row>& rows) {
    for (const auto& row : rows) {
      std::int64_t activity = 0;
      for (const auto& t : row.terms) activity += min_term(t, domains);
      if (activity > row.rhs) return true;
    }
    return false;
  };

  // One pass over a row is already idempotent: shrinking x's ub (a > 0) or
  // lb (a < 0) leaves its minimum contribution unchanged.
  const auto narrow = [&](const Row& row) {
    std::int64_t activity = 0;
    for (const auto& t : row.terms) activity += min_term(t, domains);
    if (activity > row.rhs) return false;
    for (const auto& t : row.terms) {
      auto& x = domains[static_cast<std::size_t>(t.var)];
      const std::int64_t slack = row.rhs - (activity - min_term(t, domains));
      bool moved = false;
      if (t.coeff > 0) {
        const std::int64_t ub = floor_div(slack, t.coeff);
        if (ub < x.ub) {
          x.ub = ub;
          moved = true;
        }
      } else {
        const std::int64_t lb = ceil_div(slack, t.coeff);
        if (lb > x.lb) {
          x.lb = lb;
          moved = true;
        }
      }
      if (moved) {
        if (x.empty()) return false;
        for (const auto e : watchers_[static_cast<std::size_t>(t.var)]) enqueue(e);
      }
    }
    return true;
  };

  while (!queue.empty()) {
    const std::size_t e = queue.front();
    queue.pop_front();
    queued[e] = 0;
    const Entry& entry = entries_[e];
    const std::vector<Row>* enforced = &entry.rows;
    if (!entry.alternative.empty()) {
      const bool left_dead = infeasible(entry.rows);
      const bool right_dead = infeasible(entry.alternative);
      if (left_dead && right_dead) return false;
      if (!left_dead && !right_dead) continue;
      enforced = left_dead ? &entry.alternative : &entry.rows;
    }
    for (const auto& row : *enforced) {
      if (!narrow(row)) return false;
    }
  }
  return true;
}

std::optional<Domains> propagate(const FlatModel& model, Domains domains) {
  if (!Propagator(model).run(domains)) return std::nullopt;
  return domains;
}

void SolveConfig::validate() const {
  if (node_budget <= 0 || time_budget_ms <= 0) {
    throw ValidationError("solver budgets must be positive");
  }
}

std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal:
      return "optimal";
    case SolveStatus::kSatisfiable:
      return "satisfiable";
    case SolveStatus::kUnsatisfiable:
      return "unsatisfiable";
    case SolveStatus::kBudgetExhausted:
      return "budget_exhausted";
  }
  return "?";
}

SolveStatus parse_solve_status(std::string_view name) {
  for (const auto s : {SolveStatus::kOptimal, SolveStatus::kSatisfiable,
                       SolveStatus::kUnsatisfiable, SolveStatus::kBudgetExhausted}) {
    if (to_string(s) == name) return s;
  }
  throw ValidationError("unknown solve status '" + std::string(name) + "'");
}

namespace {

using Clock = std::chrono::steady_clock;

class BranchAndBound {
 public:
  BranchAndBound(const FlatModel& model, const SolveConfig& config)
      : model_(model),
        propagator_(model),
        config_(config),
        objective_(static_cast<std::size_t>(model.objective_var)),
        start_(Clock::now()) {}

  SolveResult run() {
    Domains root = initial_domains(model_);
    explore(std::move(root), -1);
    result_.elapsed_ms = elapsed_ms();
    if (stopped_) {
      result_.status = result_.best_objective ? SolveStatus::kSatisfiable
                                              : SolveStatus::kBudgetExhausted;
    } else {
      result_.status = result_.best_objective ? SolveStatus::kOptimal
                                              : SolveStatus::kUnsatisfiable;
    }
    return std::move(result_);
  }

 private:
  double elapsed_ms() const {
    return std::chrono::duration<double, std::milli>(Clock::now() - start_).count();
  }

  bool out_of_budget() {
    if (result_.nodes_explored >= config_.node_budget) return true;
    if (result_.nodes_explored % 256 == 0 &&
        elapsed_ms() >= static_cast<double>(config_.time_budget_ms)) {
      return true;
    }
    return false;
  }

  void explore(Domains domains, int branched) {
    if (stopped_) return;
    if (out_of_budget()) {
      stopped_ = true;
      return;
    }
    ++result_.nodes_explored;

    auto& z = domains[objective_];
    if (result_.best_objective) {
      if (model_.sense == Sense::kMinimize) {
        z.ub = std::min(z.ub, *result_.best_objective - 1);
      } else {
        z.lb = std::max(z.lb, *result_.best_objective + 1);
      }
    }
    const int changed[] = {branched, model_.objective_var};
    const std::span<const int> dirty =
        branched < 0 ? std::span<const int>{} : std::span<const int>(changed);
    if (!propagator_.run(domains, dirty)) return;

    int pick = -1;
    std::int64_t smallest = 0;
    for (std::size_t v = 0; v < domains.size(); ++v) {
      const std::int64_t size = domains[v].size();
      if (size > 1 && (pick < 0 || size < smallest)) {
        pick = static_cast<int>(v);
        smallest = size;
      }
    }
    if (pick < 0) {
      record(domains);
      return;
    }

    const Interval d = domains[static_cast<std::size_t>(pick)];
    const std::int64_t mid = d.lb + (d.ub - d.lb) / 2;
    Interval first{d.lb, mid};
    Interval second{mid + 1, d.ub};
    if (model_.sense == Sense::kMaximize) std::swap(first, second);

    Domains child = domains;
    child[static_cast<std::size_t>(pick)] = first;
    explore(std::move(child), pick);
    domains[static_cast<std::size_t>(pick)] = second;
    explore(std::move(domains), pick);
  }

  void record(const Domains& domains) {
    const std::int64_t value = domains[objective_].lb;
    result_.best_objective = value;
    result_.best_solution.clear();
    for (const auto& d : domains) result_.best_solution.push_back(d.lb);
    const Incumbent incumbent{value, elapsed_ms(), result_.nodes_explored};
    if (!result_.first_solution) result_.first_solution = incumbent;
    if (config_.record_timeline) result_.timeline.push_back(incumbent);
  }

  const FlatModel& model_;
  Propagator propagator_;
  const SolveConfig& config_;
  std::size_t objective_;
  Clock::time_point start_;
  bool stopped_ = false;
  SolveResult result_;
};

}  // namespace

SolveResult solve(const FlatModel& model, const SolveConfig& config) {
  config.validate();
  return BranchAndBound(model, config).run();
}

std::string_view to_string(InjectMode mode) {
  return mode == InjectMode::kBoth ? "both" : "upper";
}

InjectMode parse_inject_mode(std::string_view name) {
  if (name == "both") return InjectMode::kBoth;
  if (name == "upper") return InjectMode::kUpperOnly;
  throw ValidationError("unknown bound mode '" + std::string(name) + "'");
}

FlatModel inject_bounds(FlatModel model, const BoundaryEstimate& estimate, InjectMode mode) {
  auto& z = model.variables.at(static_cast<std::size_t>(model.objective_var));
  const bool minimize = model.sense == Sense::kMinimize;
  if (mode == InjectMode::kBoth || minimize) z.ub = std::min(z.ub, estimate.est_ub);
  if (mode == InjectMode::kBoth || !minimize) z.lb = std::max(z.lb, estimate.est_lb);
  return model;
}

SolveResult solve_with_fallback(const FlatModel& model, const BoundaryEstimate& estimate,
                                InjectMode mode, const SolveConfig& config) {
  SolveResult bounded = solve(inject_bounds(model, estimate, mode), config);
  if (bounded.status != SolveStatus::kUnsatisfiable) return bounded;

  SolveResult result = solve(model, config);
  const auto shift = [&](Incumbent entry) {
    entry.elapsed_ms += bounded.elapsed_ms;
    entry.nodes += bounded.nodes_explored;
    return entry;
  };
  if (result.first_solution) result.first_solution = shift(*result.first_solution);
  for (auto& entry : result.timeline) entry = shift(entry);
  result.nodes_explored += bounded.nodes_explored;
  result.elapsed_ms += bounded.elapsed_ms;
  result.fallback_used = true;
  return result;
}

nlohmann::json solve_result_to_json(const SolveResult& result) {
  using nlohmann::json;
  const auto entry = [](const Incumbent& i) { return json::array({i.objective, i.elapsed_ms, i.nodes}); };
  json timeline = json::array();
  for (const auto& i : result.timeline) timeline.push_back(entry(i));
  return {{"status", std::string(to_string(result.status))},
          {"best_objective", result.best_objective ? json(*result.best_objective) : json(nullptr)},
          {"first_solution", result.first_solution ? entry(*result.first_solution) : json(nullptr)},
          {"timeline", std::move(timeline)},
          {"nodes_explored", result.nodes_explored},
          {"elapsed_ms", result.elapsed_ms},
          {"fallback_used", result.fallback_used}};
}

SolveResult solve_result_from_json(const nlohmann::json& doc) {
  const auto entry = [](const nlohmann::json& a) {
    return Incumbent{a.at(0).get<std::int64_t>(), a.at(1).get<double>(),
                     a.at(2).get<std::int64_t>()};
  };
  try {
    SolveResult result;
    result.status = parse_solve_status(doc.at("status").get<std::string>());
    if (!doc.at("best_objective").is_null()) {
      result.best_objective = doc.at("best_objective").get<std::int64_t>();
    }
    if (!doc.at("first_solution").is_null()) result.first_solution = entry(doc.at("first_solution"));
    for (const auto& a : doc.at("timeline")) result.timeline.push_back(entry(a));
    result.nodes_explored = doc.at("nodes_explored").get<std::int64_t>();
    result.elapsed_ms = doc.at("elapsed_ms").get<double>();
    result.fallback_used = doc.at("fallback_used").get<bool>();
    return result;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(e.what(), "");
  }
}

}  // namespace objbound
