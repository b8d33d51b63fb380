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

#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "objbound/cop.hpp"
#include "objbound/error.hpp"
#include "objbound/io.hpp"
#include "objbound/solver.hpp"
#include "oracles.hpp"

using namespace objbound;

namespace {

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "objbound_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

const LinearConstraint& linear(const Constraint& c) { return std::get<LinearConstraint>(c); }

}  // namespace

TEST_CASE("problem classes carry their optimization sense") {
  CHECK(sense_of(ProblemClass::kBinPacking) == Sense::kMinimize);
  CHECK(sense_of(ProblemClass::kJobshop) == Sense::kMinimize);
  CHECK(sense_of(ProblemClass::kKnapsack) == Sense::kMaximize);
  for (const auto p : {ProblemClass::kBinPacking, ProblemClass::kJobshop, ProblemClass::kKnapsack}) {
    CHECK(parse_problem_class(to_string(p)) == p);
  }
  CHECK_THROWS_AS(parse_problem_class("tsp"), ValidationError);
}

TEST_CASE("generator is a pure function of class, size and seed") {
  const auto a = dump(instance_to_json(generate_instance(ProblemClass::kKnapsack, 4, 7)));
  const auto b = dump(instance_to_json(generate_instance(ProblemClass::kKnapsack, 4, 7)));
  CHECK(a == b);
  const auto c = dump(instance_to_json(generate_instance(ProblemClass::kKnapsack, 4, 8)));
  CHECK(a != c);
  for (const auto p : {ProblemClass::kBinPacking, ProblemClass::kJobshop, ProblemClass::kKnapsack}) {
    const Instance x = generate_instance(p, 4, 99);
    CHECK(x == generate_instance(p, 4, 99));
    CHECK_FALSE(x.known_optimum.has_value());
  }
}

TEST_CASE("generator rejects sizes outside the class limits") {
  CHECK_THROWS_AS(generate_instance(ProblemClass::kBinPacking, 3, 1), RangeError);
  CHECK_THROWS_AS(generate_instance(ProblemClass::kBinPacking, 61, 1), RangeError);
  CHECK_THROWS_AS(generate_instance(ProblemClass::kJobshop, 1, 1), RangeError);
  CHECK_THROWS_AS(generate_instance(ProblemClass::kJobshop, 7, 1), RangeError);
  CHECK_THROWS_AS(generate_jobshop(2, 7, 1), RangeError);
  CHECK_THROWS_AS(generate_instance(ProblemClass::kKnapsack, 41, 1), RangeError);
  CHECK_NOTHROW(generate_instance(ProblemClass::kBinPacking, 60, 1));
  CHECK_NOTHROW(generate_jobshop(2, 6, 1));
}

TEST_CASE("trivial objective domains") {
  const Instance bp = make_bin_packing("bp", {5, 5, 5, 5}, 10);
  CHECK(bp.objective_lb == 1);
  CHECK(bp.objective_ub == 4);
  const Instance ks = make_knapsack("ks", {6, 10, 12}, {1, 2, 3}, 5);
  CHECK(ks.objective_lb == 0);
  CHECK(ks.objective_ub == 28);
  const Instance js = make_jobshop("js", {{3, 2}, {4, 1}}, {{0, 1}, {1, 0}});
  CHECK(js.objective_lb == 5);
  CHECK(js.objective_ub == 10);
}

TEST_CASE("validation names the offending parameter") {
  Instance bad = make_knapsack("ks", {6, 10}, {1, 2}, 5);
  bad.params.erase("values");
  try {
    validate(bad);
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("values") != std::string::npos);
  }
  CHECK_THROWS_AS(make_bin_packing("bp", {5, 11}, 10), ValidationError);
  CHECK_THROWS_AS(make_knapsack("ks", {1, 2}, {1}, 5), ValidationError);
  CHECK_THROWS_AS(make_jobshop("js", {{1, 0}}, {{0, 1}}), ValidationError);
  Instance extra = make_bin_packing("bp", {1}, 1);
  extra.params["colour"] = std::int64_t{3};
  CHECK_THROWS_AS(validate(extra), ValidationError);
  Instance outside = make_bin_packing("bp", {1, 1}, 1);
  outside.known_optimum = 3;
  CHECK_THROWS_AS(validate(outside), ValidationError);
}

TEST_CASE("knapsack compiles to binaries, one capacity row and an objective link") {
  const FlatModel m = compile(make_knapsack("ks", {6, 10, 12}, {1, 2, 3}, 5));
  REQUIRE(m.variables.size() == 4);
  CHECK(m.sense == Sense::kMaximize);
  CHECK(m.objective().lb == 0);
  CHECK(m.objective().ub == 28);
  for (int v = 0; v < 4; ++v) {
    if (v == m.objective_var) continue;
    CHECK(m.variables[static_cast<std::size_t>(v)].lb == 0);
    CHECK(m.variables[static_cast<std::size_t>(v)].ub == 1);
  }
  REQUIRE(m.constraints.size() == 2);
  const auto& capacity = linear(m.constraints[0]);
  CHECK(capacity.op == Relation::kLessEqual);
  CHECK(capacity.rhs == 5);
  const auto& link = linear(m.constraints[1]);
  CHECK(link.op == Relation::kEqual);
  // 6x + 10y + 12z - obj = 0, in some item order.
  std::vector<std::int64_t> coeffs;
  for (const auto& t : link.terms) {
    if (t.var == m.objective_var) {
      CHECK(t.coeff == -1);
    } else {
      coeffs.push_back(t.coeff);
    }
  }
  std::sort(coeffs.begin(), coeffs.end());
  CHECK(coeffs == std::vector<std::int64_t>{6, 10, 12});
}

TEST_CASE("single-operation jobshop pins the makespan") {
  const FlatModel m = compile(make_jobshop("js", {{4}}, {{0}}));
  CHECK(m.objective().lb == 4);
  CHECK(m.objective().ub == 4);
}

TEST_CASE("compiled models preserve the instance optimum") {
  SUBCASE("bin packing [5,5,5,5] cap 10") {
    const Instance bp = make_bin_packing("bp", {5, 5, 5, 5}, 10);
    CHECK(oracle::bin_packing_optimum(bp) == 2);
    CHECK(oracle::model_optimum(compile(bp)) == 2);
  }
  SUBCASE("small random instances of every class") {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
      const Instance bp = generate_instance(ProblemClass::kBinPacking, 4, seed);
      CHECK(oracle::model_optimum(compile(bp)) == oracle::optimum(bp));
      const Instance ks = generate_instance(ProblemClass::kKnapsack, 4, seed);
      CHECK(oracle::model_optimum(compile(ks)) == oracle::optimum(ks));
    }
  }
}

TEST_CASE("every generated instance compiles and survives root propagation") {
  for (const auto p : {ProblemClass::kBinPacking, ProblemClass::kJobshop, ProblemClass::kKnapsack}) {
    const auto limits = size_limits(p);
    for (int size = limits.min; size <= limits.max; size += 3) {
      const Instance instance = generate_instance(p, size, static_cast<std::uint64_t>(size));
      const FlatModel model = compile(instance);
      CHECK_NOTHROW(model.validate());
      CHECK(model.objective().lb == instance.objective_lb);
      CHECK(model.objective().ub == instance.objective_ub);
      CHECK(propagate(model, initial_domains(model)).has_value());
    }
  }
}

TEST_CASE("jobshop models carry one disjunction per same-machine pair") {
  const FlatModel m = compile(make_jobshop("js", {{1, 2}, {3, 4}}, {{0, 1}, {1, 0}}));
  const auto disjunctions = std::count_if(m.constraints.begin(), m.constraints.end(),
                                          [](const Constraint& c) {
                                            return std::holds_alternative<Disjunction>(c);
                                          });
  CHECK(disjunctions == 2);
}

TEST_CASE("instance files round-trip") {
  for (const auto p : {ProblemClass::kBinPacking, ProblemClass::kJobshop, ProblemClass::kKnapsack}) {
    Instance instance = generate_instance(p, 5, 3);
    instance.known_optimum = instance.objective_lb;
    const auto path = scratch("roundtrip.json");
    write_instance(instance, path);
    CHECK(read_instance(path) == instance);
  }
}

TEST_CASE("malformed instance documents") {
  nlohmann::json doc = instance_to_json(make_knapsack("ks", {6, 10, 12}, {1, 2, 3}, 5));

  SUBCASE("lb above ub") {
    doc["objective_lb"] = 40;
    try {
      instance_from_json(doc);
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.pointer() == "/objective_lb");
    }
  }
  SUBCASE("missing class parameter") {
    doc["params"].erase("weights");
    CHECK_THROWS_AS(instance_from_json(doc), ValidationError);
  }
  SUBCASE("future format version") {
    doc["format_version"] = kInstanceFormatVersion + 1;
    CHECK_THROWS_AS(instance_from_json(doc), VersionError);
  }
  SUBCASE("sense contradicting the class") {
    doc["sense"] = "min";
    CHECK_THROWS_AS(instance_from_json(doc), ParseError);
  }
  SUBCASE("wrong parameter shape") {
    doc["params"]["capacity"] = nlohmann::json::array({1, 2});
    CHECK_THROWS_AS(instance_from_json(doc), ValidationError);
  }
}

TEST_CASE("file errors are I/O errors, broken text is a parse error") {
  CHECK_THROWS_AS(read_instance(scratch("does-not-exist.json")), IoError);
  const auto path = scratch("truncated.json");
  std::ofstream(path) << "{\"format_version\": 1, \"id\": ";
  CHECK_THROWS_AS(read_instance(path), ParseError);
}
