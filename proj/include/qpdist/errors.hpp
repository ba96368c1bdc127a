// Copyright 2026 The qpdist developers
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

namespace qpdist {

/// Base class for every error thrown by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NonHermitianInput : Error {
  explicit NonHermitianInput(const std::string& what = "NonHermitianInput")
      : Error(what) {}
};

struct IndefiniteInput : Error {
  explicit IndefiniteInput(const std::string& what = "IndefiniteInput")
      : Error(what) {}
};

struct NonSquareInput : Error {
  explicit NonSquareInput(const std::string& what = "NonSquareInput")
      : Error(what) {}
};

struct DimensionMismatch : Error {
  explicit DimensionMismatch(const std::string& what = "DimensionMismatch")
      : Error(what) {}
};

struct AncillaTooSmall : Error {
  explicit AncillaTooSmall(const std::string& what = "AncillaTooSmall")
      : Error(what) {}
};

struct InvalidChoi : Error {
  explicit InvalidChoi(const std::string& what = "InvalidChoi") : Error(what) {}
};

struct BadBasis : Error {
  explicit BadBasis(const std::string& what = "BadBasis") : Error(what) {}
};

struct NonUnitaryTarget : Error {
  explicit NonUnitaryTarget(const std::string& what = "NonUnitaryTarget")
      : Error(what) {}
};

struct DegenerateSpanningSet : Error {
  explicit DegenerateSpanningSet(
      const std::string& what = "DegenerateSpanningSet")
      : Error(what) {}
};

struct NoUnitaryBasis : Error {
  explicit NoUnitaryBasis(const std::string& what = "NoUnitaryBasis")
      : Error(what) {}
};

/// Raised by the JSON channel parsers; the message names the offending
/// field or the violated invariant.
struct ParseError : Error {
  explicit ParseError(const std::string& what) : Error(what) {}
};

}  // namespace qpdist
