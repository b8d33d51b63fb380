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

#include <stdexcept>
#include <string>
#include <utility>

namespace objbound {

// Root of the library's exception hierarchy. The CLI maps IoError to exit
// code 2 and everything else to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class RangeError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Malformed document. `pointer` is a JSON pointer to the offending field
// (empty when the document is not parseable at all).
class ParseError : public ValidationError {
 public:
  ParseError(const std::string& message, std::string pointer)
      : ValidationError(pointer.empty() ? message : pointer + ": " + message),
        pointer_(std::move(pointer)) {}

  const std::string& pointer() const noexcept { return pointer_; }

 private:
  std::string pointer_;
};

class VersionError : public ParseError {
 public:
  using ParseError::ParseError;
};

class SchemaError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class TrainingError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class DatasetError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace objbound
