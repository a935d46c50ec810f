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

// Brute-force reference implementations. Every maximal path is listed
// explicitly and quantities are summed in the probability domain. This is
// exact at small scale and underflows at large scale, on purpose.

#ifndef SEMIRNG_ORACLE_H_
#define SEMIRNG_ORACLE_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "semirng/lattice.h"
#include "semirng/matrix.h"
#include "semirng/semiring.h"

namespace semirng {

inline constexpr std::size_t kMaxOraclePaths = 1'000'000;

struct AlignmentPath {
  // Weight refs in walk order; a root's entry weight, if any, comes first.
  std::vector<std::size_t> refs;
  std::vector<VertexId> vertices;
  double logp = 0.0;
  std::optional<double> logq;
};

// All maximal paths, depth first: roots ascending, then outgoing edges in
// ascending destination order. `logq` may be empty. Throws UnsupportedError
// when more than kMaxOraclePaths paths exist.
std::vector<AlignmentPath> enumerate_paths(const Lattice& lattice,
                                           std::span<const double> logp,
                                           std::span<const double> logq = {});

// (+) over paths of the (x)-product of weights along each path.
SemiringValue path_sum(const std::vector<AlignmentPath>& paths,
                       std::span<const SemiringValue> weights, SemiringId s);

template <class Real>
struct OracleQuantities {
  Real likelihood = 0;          // sum p
  Real teacher_likelihood = 0;  // sum q
  Real entropy = 0;             // -sum p log p
  Real kl = 0;                  // sum q log(q / p)
  Real cross = 0;               // -sum q log p
  Real teacher_entropy = 0;     // -sum q log q
  std::size_t paths = 0;
};

// Sums over `paths`, re-reading the log-probabilities of each path's refs
// from the given tables. Instantiated for double and __float128.
template <class Real>
OracleQuantities<Real> oracle_quantities(const std::vector<AlignmentPath>& paths,
                                         std::span<const Real> logp,
                                         std::span<const Real> logq = {});

// Uses the logp / logq stored on each path.
OracleQuantities<double> oracle_quantities(const std::vector<AlignmentPath>& paths);

// sum q (log q - log p) evaluated as q * log(q / p) with q, p exponentiated.
template <class Real>
Real oracle_kl_state(std::span<const Real> teacher, std::span<const Real> student);

// posterior(v) = (sum of p over paths through v) / (sum of p).
std::vector<double> oracle_vertex_posteriors(const std::vector<AlignmentPath>& paths,
                                             std::size_t vertex_count);

// Central difference (f(+h) - f(-h)) / 2h, with f evaluated in quad
// precision so the quotient keeps ~17 significant digits at h = 1e-6.
double central_difference(const std::function<__float128(__float128)>& f,
                          double h = 1e-6);

enum class OracleQuantity { kLogLikelihood, kEntropy, kKl, kCross };

// Finite-difference derivative of one quantity with respect to student
// log-probability `ref`, re-enumerating the paths for both evaluations.
double oracle_gradient(const Lattice& lattice, std::span<const double> logp,
                       std::span<const double> logq, OracleQuantity quantity,
                       std::size_t ref, double h = 1e-6);

struct NaiveOpCount {
  std::uint64_t multiplications = 0;
  std::uint64_t additions = 0;
};

// Entropy by explicit enumeration on a T x U RNN-T grid: each of the
// C(T + U, U) paths costs T + U + 1 multiplications and the paths are
// joined by C(T + U, U) - 1 additions.
NaiveOpCount naive_op_count(std::size_t frames, std::size_t label_count);

// C(n, k); throws OverflowError beyond 2^63 - 1.
std::uint64_t binomial(std::uint64_t n, std::uint64_t k);

}  // namespace semirng

#endif  // SEMIRNG_ORACLE_H_
