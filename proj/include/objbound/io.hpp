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

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "objbound/cop.hpp"

namespace objbound {

inline constexpr int kInstanceFormatVersion = 1;

nlohmann::json instance_to_json(const Instance& instance);
// Throws ParseError (with a JSON pointer) on schema violations and
// ValidationError when the parameters do not fit the class.
Instance instance_from_json(const nlohmann::json& doc);

Instance read_instance(const std::filesystem::path& path);
void write_instance(const Instance& instance, const std::filesystem::path& path);

// File helpers shared by every on-disk format. Both throw IoError when the
// file cannot be opened; read_json_file throws ParseError on malformed text.
std::string read_text_file(const std::filesystem::path& path);
nlohmann::json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

// Stable two-space indented rendering with a trailing newline.
std::string dump(const nlohmann::json& doc);

}  // namespace objbound
