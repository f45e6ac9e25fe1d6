// Copyright 2026 The TLNS Authors
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

#ifndef TLNS_ERRORS_H_
#define TLNS_ERRORS_H_

#include <stdexcept>
#include <string>

namespace tlns {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller broke a documented precondition (dimension mismatch, bad range).
class ContractError : public Error {
 public:
  using Error::Error;
};

// Malformed input file. The message carries the field and, when known, the
// line or record index.
class ParseError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

// The model uses a feature the solver does not handle (general integers).
class UnsupportedModelError : public Error {
 public:
  using Error::Error;
};

// A supposedly feasible reference point was proven infeasible.
class InfeasibleInputError : public Error {
 public:
  using Error::Error;
};

// External solver executable missing or failed.
class AdapterError : public Error {
 public:
  using Error::Error;
};

class AdapterUnavailableError : public AdapterError {
 public:
  using AdapterError::AdapterError;
};

}  // namespace tlns

#endif  // TLNS_ERRORS_H_
