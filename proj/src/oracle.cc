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

#include "semirng/oracle.h"

#include <quadmath.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "semirng/errors.h"

namespace semirng {

namespace {

double rexp(double x) { return std::exp(x); }
double rlog(double x) { return std::log(x); }
__float128 rexp(__float128 x) { return ::expq(x); }
__float128 rlog(__float128 x) { return ::logq(x); }

class PathWalker {
 public:
  PathWalker(const Lattice& lattice, std::span<const double> logp,
             std::span<const double> logq, std::vector<AlignmentPath>& out)
      : lattice_(lattice), adj_(build_adjacency(lattice)), logp_(logp),
        logq_(logq), out_(out), is_leaf_(lattice.vertex_count, false) {
    for (VertexId l : lattice.leaves) is_leaf_[l] = true;
  }

  void run() {
    std::vector<VertexId> roots = lattice_.roots;
    std::sort(roots.begin(), roots.end());
    for (VertexId r : roots) {
      const std::int64_t entry = adj_.entry_of[r];
      if (entry >= 0) refs_.push_back(lattice_.entries[entry].weight_ref);
      visit(r);
      if (entry >= 0) refs_.pop_back();
    }
  }

 private:
  void visit(VertexId v) {
    vertices_.push_back(v);
    if (is_leaf_[v]) {
      emit();
    } else {
      for (std::size_t k = adj_.out_offsets[v]; k < adj_.out_offsets[v + 1]; ++k) {
        const Edge& e = lattice_.edges[adj_.outgoing[k]];
        refs_.push_back(e.weight_ref);
        visit(e.dst);
        refs_.pop_back();
      }
    }
    vertices_.pop_back();
  }

  void emit() {
    if (out_.size() >= kMaxOraclePaths) {
      throw UnsupportedError("lattice has more than " +
                             std::to_string(kMaxOraclePaths) +
                             " paths; too many to enumerate");
    }
    AlignmentPath path;
    path.refs = refs_;
    path.vertices = vertices_;
    for (std::size_t r : refs_) path.logp += logp_[r];
    if (!logq_.empty()) {
      double q = 0.0;
      for (std::size_t r : refs_) q += logq_[r];
      path.logq = q;
    }
    out_.push_back(std::move(path));
  }

  const Lattice& lattice_;
  Adjacency adj_;
  std::span<const double> logp_;
  std::span<const double> logq_;
  std::vector<AlignmentPath>& out_;
  std::vector<bool> is_leaf_;
  std::vector<std::size_t> refs_;
  std::vector<VertexId> vertices_;
};

template <class Real>
void accumulate(OracleQuantities<Real>& acc, Real lp, const Real* lq) {
  const Real p = rexp(lp);
  acc.likelihood += p;
  if (p > 0) acc.entropy -= p * rlog(p);
  if (lq == nullptr) return;
  const Real q = rexp(*lq);
  acc.teacher_likelihood += q;
  if (q > 0) {
    acc.kl += q * rlog(q / p);
    acc.cross -= q * rlog(p);
    acc.teacher_entropy -= q * rlog(q);
  }
}

}  // namespace

std::vector<AlignmentPath> enumerate_paths(const Lattice& lattice,
                                           std::span<const double> logp,
                                           std::span<const double> logq) {
  validate(lattice, logp.size());
  if (!logq.empty() && logq.size() != logp.size()) {
    throw UsageError("teacher table differs in size from the student table");
  }
  std::vector<AlignmentPath> out;
  PathWalker(lattice, logp, logq, out).run();
  return out;
}

SemiringValue path_sum(const std::vector<AlignmentPath>& paths,
                       std::span<const SemiringValue> weights, SemiringId s) {
  SemiringValue acc = zero(s);
  for (const AlignmentPath& path : paths) {
    SemiringValue prod = one(s);
    for (std::size_t r : path.refs) prod = times(s, prod, weights[r]);
    acc = plus(s, acc, prod);
  }
  return acc;
}

template <class Real>
OracleQuantities<Real> oracle_quantities(const std::vector<AlignmentPath>& paths,
                                         std::span<const Real> logp,
                                         std::span<const Real> logq) {
  OracleQuantities<Real> acc;
  acc.paths = paths.size();
  for (const AlignmentPath& path : paths) {
    Real lp = 0, lq = 0;
    for (std::size_t r : path.refs) lp += logp[r];
    if (!logq.empty()) {
      for (std::size_t r : path.refs) lq += logq[r];
    }
    accumulate<Real>(acc, lp, logq.empty() ? nullptr : &lq);
  }
  return acc;
}

template OracleQuantities<double> oracle_quantities<double>(
    const std::vector<AlignmentPath>&, std::span<const double>,
    std::span<const double>);
template OracleQuantities<__float128> oracle_quantities<__float128>(
    const std::vector<AlignmentPath>&, std::span<const __float128>,
    std::span<const __float128>);

OracleQuantities<double> oracle_quantities(const std::vector<AlignmentPath>& paths) {
  OracleQuantities<double> acc;
  acc.paths = paths.size();
  for (const AlignmentPath& path : paths) {
    accumulate<double>(acc, path.logp, path.logq ? &*path.logq : nullptr);
  }
  return acc;
}

template <class Real>
Real oracle_kl_state(std::span<const Real> teacher, std::span<const Real> student) {
  if (teacher.size() != student.size()) {
    throw UsageError("kl_state tensors differ in shape");
  }
  Real sum = 0;
  for (std::size_t i = 0; i < teacher.size(); ++i) {
    const Real q = rexp(teacher[i]);
    if (q > 0) sum += q * rlog(q / rexp(student[i]));
  }
  return sum;
}

template double oracle_kl_state<double>(std::span<const double>,
                                        std::span<const double>);
template __float128 oracle_kl_state<__float128>(std::span<const __float128>,
                                                std::span<const __float128>);

std::vector<double> oracle_vertex_posteriors(const std::vector<AlignmentPath>& paths,
                                             std::size_t vertex_count) {
  std::vector<double> mass(vertex_count, 0.0);
  double total = 0.0;
  for (const AlignmentPath& path : paths) {
    const double p = std::exp(path.logp);
    total += p;
    for (VertexId v : path.vertices) mass[v] += p;
  }
  if (total == 0.0) throw InfeasibleError("infeasible alignment: P(y|x) = 0");
  for (double& m : mass) m /= total;
  return mass;
}

double central_difference(const std::function<__float128(__float128)>& f,
                          double h) {
  const __float128 hq = h;
  return static_cast<double>((f(hq) - f(-hq)) / (2 * hq));
}

double oracle_gradient(const Lattice& lattice, std::span<const double> logp,
                       std::span<const double> logq, OracleQuantity quantity,
                       std::size_t ref, double h) {
  if (ref >= logp.size()) throw UsageError("weight ref out of range");
  const std::vector<__float128> q(logq.begin(), logq.end());
  return central_difference(
      [&](__float128 delta) {
        std::vector<__float128> p(logp.begin(), logp.end());
        p[ref] += delta;
        const auto paths = enumerate_paths(lattice, logp, {});
        const auto acc = oracle_quantities<__float128>(paths, p, q);
        switch (quantity) {
          case OracleQuantity::kLogLikelihood:
            return rlog(acc.likelihood);
          case OracleQuantity::kEntropy:
            return acc.entropy;
          case OracleQuantity::kKl:
            return acc.kl;
          case OracleQuantity::kCross:
            return acc.cross;
        }
        return __float128(0);
      },
      h);
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  constexpr auto kMax =
      static_cast<unsigned __int128>(std::numeric_limits<std::int64_t>::max());
  unsigned __int128 r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    // r * (n - k + i) / i stays integral at every step.
    r = r * (n - k + i) / i;
    if (r > kMax) throw OverflowError("binomial coefficient exceeds 2^63-1");
  }
  return static_cast<std::uint64_t>(r);
}

NaiveOpCount naive_op_count(std::size_t frames, std::size_t label_count) {
  const std::uint64_t paths = binomial(frames + label_count, label_count);
  NaiveOpCount out;
  const unsigned __int128 mul =
      static_cast<unsigned __int128>(paths) * (frames + label_count + 1);
  if (mul > static_cast<unsigned __int128>(std::numeric_limits<std::int64_t>::max())) {
    throw OverflowError("naive operation count exceeds 2^63-1");
  }
  out.multiplications = static_cast<std::uint64_t>(mul);
  out.additions = paths - 1;
  return out;
}

}  // namespace semirng
