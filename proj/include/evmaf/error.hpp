// Copyright 2026 The evmaf Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace evmaf {

// Every failure surfaced by the library derives from Error so that callers
// (the CLI in particular) can map the kind onto an exit status.
enum class ErrorKind {
  kMalformedInput,
  kConfiguration,
  kDimension,
  kOutOfRange,
  kInput,
  kTraining,
  kComputation,
  kVersion,
  kIo,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

class MalformedInputError : public Error {
 public:
  explicit MalformedInputError(const std::string& what)
      : Error(ErrorKind::kMalformedInput, what) {}
};

class ConfigurationError : public Error {
 public:
  explicit ConfigurationError(const std::string& what)
      : Error(ErrorKind::kConfiguration, what) {}
};

class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& what)
      : Error(ErrorKind::kDimension, what) {}
};

class OutOfRangeError : public Error {
 public:
  explicit OutOfRangeError(const std::string& what)
      : Error(ErrorKind::kOutOfRange, what) {}
};

class InputError : public Error {
 public:
  explicit InputError(const std::string& what)
      : Error(ErrorKind::kInput, what) {}
};

class TrainingError : public Error {
 public:
  explicit TrainingError(const std::string& what)
      : Error(ErrorKind::kTraining, what) {}
};

class ComputationError : public Error {
 public:
  explicit ComputationError(const std::string& what)
      : Error(ErrorKind::kComputation, what) {}
};

class VersionError : public Error {
 public:
  explicit VersionError(const std::string& what)
      : Error(ErrorKind::kVersion, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::kIo, what) {}
};

}  // namespace evmaf
