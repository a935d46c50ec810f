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

// Runtime view of the seven semirings. The hot loops in the engine use the
// compile-time policies in semiring_kernels.h; this header is the boundary
// type used by callers, tests and the CLI.

#ifndef SEMIRNG_SEMIRING_H_
#define SEMIRNG_SEMIRING_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace semirng {

enum class SemiringId : std::uint8_t {
  kProbability,
  kLog,
  kTropical,
  kCounting,
  kEntropy,
  kLogEntropy,
  kLogReverseKl,
};

inline constexpr std::array<SemiringId, 7> kAllSemirings = {
    SemiringId::kProbability, SemiringId::kLog,        SemiringId::kTropical,
    SemiringId::kCounting,    SemiringId::kEntropy,    SemiringId::kLogEntropy,
    SemiringId::kLogReverseKl,
};

// Number of components carried by a value of `s`: 1, 2 or 4.
constexpr std::size_t arity(SemiringId s) {
  switch (s) {
    case SemiringId::kEntropy:
    case SemiringId::kLogEntropy:
      return 2;
    case SemiringId::kLogReverseKl:
      return 4;
    default:
      return 1;
  }
}

// True for the semirings whose components are stored as logarithms.
constexpr bool is_log_space(SemiringId s) {
  return s == SemiringId::kLog || s == SemiringId::kLogEntropy ||
         s == SemiringId::kLogReverseKl;
}

std::string_view name(SemiringId s);

// Accepts the names printed by name(); throws UsageError otherwise.
SemiringId parse_semiring(std::string_view text);

// A value of one semiring. Only the first arity(semiring) entries of
// `c` are meaningful; the counting semiring stores its value in `count`.
struct SemiringValue {
  SemiringId semiring = SemiringId::kLog;
  std::array<double, 4> c{};
  std::uint64_t count = 0;

  static SemiringValue make(SemiringId s, std::initializer_list<double> comps);
  static SemiringValue counting(std::uint64_t n);

  double operator[](std::size_t i) const { return c[i]; }
  std::span<const double> components() const {
    return {c.data(), arity(semiring)};
  }

  friend bool operator==(const SemiringValue&, const SemiringValue&) = default;
};

SemiringValue plus(SemiringId s, const SemiringValue& a,
                   const SemiringValue& b);
SemiringValue times(SemiringId s, const SemiringValue& a,
                    const SemiringValue& b);
SemiringValue zero(SemiringId s);
SemiringValue one(SemiringId s);

// Edge weight of `s` for a student log-probability and, for the
// log-reverse-KL semiring only, a teacher log-probability.
SemiringValue lift(SemiringId s, double student_logp,
                   std::optional<double> teacher_logq = std::nullopt);

// Lifts a whole table. `teacher_logq` must be empty unless s is
// log-reverse-KL, in which case it must match `student_logp` in size.
std::vector<SemiringValue> lift_table(SemiringId s,
                                      std::span<const double> student_logp,
                                      std::span<const double> teacher_logq = {});

// log(-p log p) computed from log p without forming p.
double xlogx_log(double logp);

// Maps a value to the linear-domain semiring it is isomorphic to:
// log -> probability, log-entropy -> entropy <p, p log p>, log-reverse-KL ->
// <p, q, q log q, q log p>. Tropical values are exponentiated, counting
// values converted to double; linear semirings pass through.
std::vector<double> to_probability_domain(const SemiringValue& v);

std::string to_string(const SemiringValue& v);

}  // namespace semirng

#endif  // SEMIRNG_SEMIRING_H_
