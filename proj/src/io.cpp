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

#include "objbound/io.hpp"

#include <fstream>
#include <sstream>

#include "objbound/error.hpp"

namespace objbound {

using nlohmann::json;

namespace {

json param_to_json(const ParamValue& value) {
  return std::visit([](const auto& v) { return json(v); }, value);
}

std::int64_t parse_int(const json& node, const std::string& pointer) {
  if (!node.is_number_integer()) throw ParseError("expected an integer", pointer);
  return node.get<std::int64_t>();
}

ParamValue parse_param(const json& node, const std::string& pointer) {
  if (node.is_number_integer()) return node.get<std::int64_t>();
  if (!node.is_array()) {
    throw ParseError("expected an integer or a (nested) integer list", pointer);
  }
  if (node.empty() || !node.front().is_array()) {
    IntList list;
    for (std::size_t i = 0; i < node.size(); ++i) {
      list.push_back(parse_int(node[i], pointer + "/" + std::to_string(i)));
    }
    return list;
  }
  IntMatrix matrix;
  for (std::size_t i = 0; i < node.size(); ++i) {
    const auto row_pointer = pointer + "/" + std::to_string(i);
    if (!node[i].is_array()) throw ParseError("expected an integer list", row_pointer);
    IntList row;
    for (std::size_t k = 0; k < node[i].size(); ++k) {
      row.push_back(parse_int(node[i][k], row_pointer + "/" + std::to_string(k)));
    }
    matrix.push_back(std::move(row));
  }
  return matrix;
}

const json& field(const json& doc, const char* name) {
  const auto it = doc.find(name);
  if (it == doc.end()) {
    throw ParseError("missing required field", std::string("/") + name);
  }
  return *it;
}

std::string parse_string(const json& node, const std::string& pointer) {
  if (!node.is_string()) throw ParseError("expected a string", pointer);
  return node.get<std::string>();
}

}  // namespace

json instance_to_json(const Instance& instance) {
  json params = json::object();
  for (const auto& [name, value] : instance.params) {
    params[name] = param_to_json(value);
  }
  json doc;
  doc["format_version"] = kInstanceFormatVersion;
  doc["id"] = instance.id;
  doc["class"] = std::string(to_string(instance.problem));
  doc["sense"] = std::string(to_string(instance.sense()));
  doc["params"] = std::move(params);
  doc["objective_lb"] = instance.objective_lb;
  doc["objective_ub"] = instance.objective_ub;
  doc["known_optimum"] =
      instance.known_optimum ? json(*instance.known_optimum) : json(nullptr);
  return doc;
}

Instance instance_from_json(const json& doc) {
  if (!doc.is_object()) throw ParseError("expected an object", "");
  const auto version = parse_int(field(doc, "format_version"), "/format_version");
  if (version != kInstanceFormatVersion) {
    throw VersionError("unsupported instance format version " +
                           std::to_string(version),
                       "/format_version");
  }

  Instance instance;
  instance.id = parse_string(field(doc, "id"), "/id");
  try {
    instance.problem = parse_problem_class(parse_string(field(doc, "class"), "/class"));
    if (parse_sense(parse_string(field(doc, "sense"), "/sense")) != instance.sense()) {
      throw ParseError("sense does not match the problem class", "/sense");
    }
  } catch (const ParseError&) {
    throw;
  } catch (const ValidationError& e) {
    throw ParseError(e.what(), "/class");
  }

  const json& params = field(doc, "params");
  if (!params.is_object()) throw ParseError("expected an object", "/params");
  for (const auto& [name, value] : params.items()) {
    instance.params[name] = parse_param(value, "/params/" + name);
  }

  instance.objective_lb = parse_int(field(doc, "objective_lb"), "/objective_lb");
  instance.objective_ub = parse_int(field(doc, "objective_ub"), "/objective_ub");
  if (instance.objective_lb > instance.objective_ub) {
    throw ParseError("objective_lb exceeds objective_ub", "/objective_lb");
  }
  if (const auto it = doc.find("known_optimum"); it != doc.end() && !it->is_null()) {
    instance.known_optimum = parse_int(*it, "/known_optimum");
    if (*instance.known_optimum < instance.objective_lb ||
        *instance.known_optimum > instance.objective_ub) {
      throw ParseError("known_optimum outside the objective domain", "/known_optimum");
    }
  }
  validate(instance);
  return instance;
}

Instance read_instance(const std::filesystem::path& path) {
  return instance_from_json(read_json_file(path));
}

void write_instance(const Instance& instance, const std::filesystem::path& path) {
  write_text_file(path, dump(instance_to_json(instance)));
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

json read_json_file(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what(), "");
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

std::string dump(const json& doc) { return doc.dump(2) + "\n"; }

}  // namespace objbound
