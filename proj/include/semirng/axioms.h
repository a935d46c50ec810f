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

// Randomized check of the semiring laws.
//
// Values are lifted from log-probabilities drawn uniformly from [-30, 0]
// (with occasional exact 0 and -inf), and half the time combined with a
// second lifted value by (+) so components are not tied to one input.
// Counting values are integers below 2^20. Results are compared in the
// probability domain with relative tolerance kAxiomTolerance.

#ifndef SEMIRNG_AXIOMS_H_
#define SEMIRNG_AXIOMS_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <random>
#include <string>

#include "semirng/semiring.h"

namespace semirng {

inline constexpr double kAxiomTolerance = 1e-9;

struct AxiomReport {
  SemiringId semiring = SemiringId::kLog;
  std::size_t trials = 0;
  // law name -> failing trials; every law has an entry.
  std::map<std::string, std::size_t> failures;
  std::string first_failure;

  std::size_t total_failures() const;
  bool ok() const { return total_failures() == 0; }
};

SemiringValue random_value(SemiringId s, std::mt19937_64& rng);

// Equal in the probability domain within `rel_tol`; exact for counting.
bool approx_equal(const SemiringValue& a, const SemiringValue& b,
                  double rel_tol = kAxiomTolerance);

AxiomReport check_axioms(SemiringId s, std::size_t trials, std::uint64_t seed);

}  // namespace semirng

#endif  // SEMIRNG_AXIOMS_H_
