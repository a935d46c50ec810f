// Copyright 2026 The semirng Authors.
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

#ifndef SEMIRNG_ERRORS_H_
#define SEMIRNG_ERRORS_H_

#include <stdexcept>
#include <string>

namespace semirng {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller passed mismatched or malformed arguments (wrong semiring, shapes).
class UsageError : public Error {
 public:
  using Error::Error;
};

// An input lies outside the mathematical domain, e.g. a log-probability > 0.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Lattice is cyclic, mis-indexed or otherwise malformed.
class StructuralError : public Error {
 public:
  using Error::Error;
};

// Requested operation is not available for this semiring or input.
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

// A quantity that divides by P(y|x) was requested while P(y|x) = 0.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

// Integer path count exceeded 2^63 - 1.
class OverflowError : public Error {
 public:
  using Error::Error;
};

// File or schema problems while reading external inputs.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace semirng

#endif  // SEMIRNG_ERRORS_H_
