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

// Semiring dynamic programming over a Lattice.
//
// forward[v] = 1 for roots (or w(entry) when the root has an entry weight),
// otherwise the left fold over incoming edges, ascending by source, of
// forward[src] (x) w(e). The total is the left fold of forward[leaf] over
// leaves in ascending index. Lattices with no root-to-leaf path produce 0.
//
// All routines are pure functions of their arguments.

#ifndef SEMIRNG_ENGINE_H_
#define SEMIRNG_ENGINE_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "semirng/lattice.h"
#include "semirng/semiring.h"

namespace semirng {

// Scalar floating operations performed inside (+) and (x). See
// kernels::OpCost for the accounting convention. `traversals` counts full
// DP sweeps over the lattice.
struct OpCount {
  std::int64_t real_multiplications = 0;
  std::int64_t real_additions = 0;
  std::int64_t traversals = 0;

  OpCount& operator+=(const OpCount& o) {
    real_multiplications += o.real_multiplications;
    real_additions += o.real_additions;
    traversals += o.traversals;
    return *this;
  }
  friend bool operator==(const OpCount&, const OpCount&) = default;
};

// Groups of vertices processed one after another; vertices within a group
// have no edges between them and may be evaluated concurrently.
using Schedule = std::vector<std::vector<VertexId>>;

struct ComputeOptions {
  bool want_tables = false;
  bool want_ops = false;
  // Worker threads for wavefront evaluation. 0 or 1 runs sequentially.
  int threads = 0;
  // Wavefront groups; depth_levels(lattice) is used when empty.
  const Schedule* schedule = nullptr;
};

struct ComputeResult {
  SemiringValue total;
  std::optional<std::vector<SemiringValue>> forward;
  std::optional<std::vector<SemiringValue>> backward;
  std::optional<OpCount> ops;
};

// Throws StructuralError (before any arithmetic) for malformed lattices and
// UsageError if a weight belongs to a different semiring than `s`.
ComputeResult compute(const Lattice& lattice,
                      std::span<const SemiringValue> weights, SemiringId s,
                      const ComputeOptions& options = {});

// backward[v] = 1 for leaves, otherwise the left fold over outgoing edges,
// ascending by destination, of w(e) (x) backward[dst]. Entry weights are
// not included: forward[v] (x) backward[v] is the mass through v.
std::vector<SemiringValue> backward(const Lattice& lattice,
                                    std::span<const SemiringValue> weights,
                                    SemiringId s);

// Which function of a total component to differentiate.
enum class GradientScale {
  kLog,     // d total[k] / d logp      (the component as stored)
  kLinear,  // d exp(total[k]) / d logp (e.g. the entropy H itself)
};

// Reverse-mode derivative of one component of the total with respect to
// every entry of `student_logp`, through the lift. Dense: index i holds the
// derivative with respect to student_logp[i]; unreferenced entries are 0.
// `teacher_logq` is required for log-reverse-KL and is treated as constant.
// Throws UnsupportedError for semirings that are not log-space.
std::vector<double> gradient_dense(const Lattice& lattice,
                                   std::span<const double> student_logp,
                                   std::span<const double> teacher_logq,
                                   SemiringId s, std::size_t component,
                                   GradientScale scale = GradientScale::kLog);

// weight_ref -> derivative, with an entry for every weight_ref used by an
// edge on some root-to-leaf path.
using GradientTable = std::map<std::size_t, double>;

GradientTable gradient(const Lattice& lattice,
                       std::span<const double> student_logp,
                       std::span<const double> teacher_logq, SemiringId s,
                       std::size_t component);

}  // namespace semirng

#endif  // SEMIRNG_ENGINE_H_
