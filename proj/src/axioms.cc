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

#include "semirng/axioms.h"

#include <cmath>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

namespace semirng {

namespace {

double random_logp(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> special(0, 39);
  const int k = special(rng);
  if (k == 0) return 0.0;
  if (k == 1) return -std::numeric_limits<double>::infinity();
  return std::uniform_real_distribution<double>(-30.0, 0.0)(rng);
}

}  // namespace

std::size_t AxiomReport::total_failures() const {
  std::size_t n = 0;
  for (const auto& [law, count] : failures) n += count;
  return n;
}

SemiringValue random_value(SemiringId s, std::mt19937_64& rng) {
  if (s == SemiringId::kCounting) {
    return SemiringValue::counting(
        std::uniform_int_distribution<std::uint64_t>(0, (1u << 20) - 1)(rng));
  }
  auto one_lift = [&] {
    const double p = random_logp(rng);
    if (s == SemiringId::kLogReverseKl) return lift(s, p, random_logp(rng));
    return lift(s, p);
  };
  SemiringValue v = one_lift();
  if (std::bernoulli_distribution(0.5)(rng)) v = plus(s, v, one_lift());
  return v;
}

bool approx_equal(const SemiringValue& a, const SemiringValue& b, double rel_tol) {
  if (a.semiring != b.semiring) return false;
  if (a.semiring == SemiringId::kCounting) return a.count == b.count;
  const std::vector<double> x = to_probability_domain(a);
  const std::vector<double> y = to_probability_domain(b);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == y[i]) continue;
    if (!(std::abs(x[i] - y[i]) <= rel_tol * std::max(std::abs(x[i]), std::abs(y[i])))) {
      return false;
    }
  }
  return true;
}

AxiomReport check_axioms(SemiringId s, std::size_t trials, std::uint64_t seed) {
  using Law = std::function<std::pair<SemiringValue, SemiringValue>(
      const SemiringValue&, const SemiringValue&, const SemiringValue&)>;
  const SemiringValue z = zero(s), o = one(s);
  auto P = [s](const SemiringValue& x, const SemiringValue& y) { return plus(s, x, y); };
  auto M = [s](const SemiringValue& x, const SemiringValue& y) { return times(s, x, y); };
  const std::vector<std::pair<std::string, Law>> laws = {
      {"plus_commutativity", [&](auto& a, auto& b, auto&) { return std::pair(P(a, b), P(b, a)); }},
      {"times_commutativity", [&](auto& a, auto& b, auto&) { return std::pair(M(a, b), M(b, a)); }},
      {"plus_associativity",
       [&](auto& a, auto& b, auto& c) { return std::pair(P(P(a, b), c), P(a, P(b, c))); }},
      {"times_associativity",
       [&](auto& a, auto& b, auto& c) { return std::pair(M(M(a, b), c), M(a, M(b, c))); }},
      {"left_distributivity",
       [&](auto& a, auto& b, auto& c) { return std::pair(M(a, P(b, c)), P(M(a, b), M(a, c))); }},
      {"right_distributivity",
       [&](auto& a, auto& b, auto& c) { return std::pair(M(P(a, b), c), P(M(a, c), M(b, c))); }},
      {"plus_identity", [&](auto& a, auto&, auto&) { return std::pair(P(z, a), a); }},
      {"plus_identity_right", [&](auto& a, auto&, auto&) { return std::pair(P(a, z), a); }},
      {"times_identity_left", [&](auto& a, auto&, auto&) { return std::pair(M(o, a), a); }},
      {"times_identity_right", [&](auto& a, auto&, auto&) { return std::pair(M(a, o), a); }},
      {"annihilation_left", [&](auto& a, auto&, auto&) { return std::pair(M(z, a), z); }},
      {"annihilation_right", [&](auto& a, auto&, auto&) { return std::pair(M(a, z), z); }},
  };

  AxiomReport report;
  report.semiring = s;
  report.trials = trials;
  for (const auto& [law, fn] : laws) report.failures[law] = 0;
  std::mt19937_64 rng(seed);
  for (std::size_t t = 0; t < trials; ++t) {
    const SemiringValue a = random_value(s, rng);
    const SemiringValue b = random_value(s, rng);
    const SemiringValue c = random_value(s, rng);
    for (const auto& [law, fn] : laws) {
      const auto [lhs, rhs] = fn(a, b, c);
      if (approx_equal(lhs, rhs)) continue;
      if (report.failures[law]++ == 0 && report.first_failure.empty()) {
        report.first_failure = law + ": a=" + to_string(a) + " b=" + to_string(b) +
                               " c=" + to_string(c) + " lhs=" + to_string(lhs) +
                               " rhs=" + to_string(rhs);
      }
    }
  }
  return report;
}

}  // namespace semirng
