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

#include "semirng/engine.h"

#include <algorithm>
#include <barrier>
#include <cmath>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <type_traits>

#include "semirng/errors.h"
#include "semirng/semiring_kernels.h"

namespace semirng {

namespace {

using kernels::kNegInf;
using kernels::OpCost;

void charge(OpCount& ops, const OpCost& cost) {
  ops.real_multiplications += cost.mul;
  ops.real_additions += cost.add;
}

template <class K>
std::vector<typename K::Value> to_values(std::span<const SemiringValue> weights,
                                         SemiringId s) {
  std::vector<typename K::Value> out;
  out.reserve(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i].semiring != s) {
      throw UsageError("weight " + std::to_string(i) + " belongs to semiring " +
                       std::string(name(weights[i].semiring)) + ", expected " +
                       std::string(name(s)));
    }
    out.push_back(K::from_runtime(weights[i]));
  }
  return out;
}

template <class K>
std::vector<SemiringValue> to_runtime(const std::vector<typename K::Value>& v) {
  std::vector<SemiringValue> out;
  out.reserve(v.size());
  for (const auto& x : v) out.push_back(K::to_runtime(x));
  return out;
}

// Evaluates forward[v] from already-final predecessors.
template <class K>
void eval_vertex(VertexId v, const Lattice& lattice, const Adjacency& adj,
                 const std::vector<typename K::Value>& w,
                 std::vector<typename K::Value>& forward, OpCount& ops) {
  using Value = typename K::Value;
  if (adj.is_root[v]) {
    const std::int64_t entry = adj.entry_of[v];
    if (entry >= 0) {
      forward[v] = K::times(K::one(), w[lattice.entries[entry].weight_ref]);
      charge(ops, K::kTimesCost);
    } else {
      forward[v] = K::one();
    }
    return;
  }
  const std::size_t begin = adj.in_offsets[v];
  const std::size_t end = adj.in_offsets[v + 1];
  if (begin == end) {
    forward[v] = K::zero();
    return;
  }
  const Edge& first = lattice.edges[adj.incoming[begin]];
  Value acc = K::times(forward[first.src], w[first.weight_ref]);
  charge(ops, K::kTimesCost);
  for (std::size_t k = begin + 1; k < end; ++k) {
    const Edge& e = lattice.edges[adj.incoming[k]];
    acc = K::plus(acc, K::times(forward[e.src], w[e.weight_ref]));
    charge(ops, K::kTimesCost);
    charge(ops, K::kPlusCost);
  }
  forward[v] = acc;
}

template <class K>
typename K::Value leaf_sum(const Lattice& lattice,
                           const std::vector<typename K::Value>& forward,
                           OpCount& ops) {
  std::vector<VertexId> leaves = lattice.leaves;
  std::sort(leaves.begin(), leaves.end());
  if (leaves.empty()) return K::zero();
  typename K::Value total = forward[leaves.front()];
  for (std::size_t i = 1; i < leaves.size(); ++i) {
    total = K::plus(total, forward[leaves[i]]);
    charge(ops, K::kPlusCost);
  }
  return total;
}

void check_schedule(const Lattice& lattice, const Adjacency& adj,
                    const Schedule& schedule) {
  const auto n = static_cast<std::size_t>(lattice.vertex_count);
  std::vector<std::int64_t> group_of(n, -1);
  for (std::size_t g = 0; g < schedule.size(); ++g) {
    for (VertexId v : schedule[g]) {
      if (v < 0 || static_cast<std::size_t>(v) >= n) {
        throw StructuralError("schedule names a missing vertex");
      }
      if (group_of[v] >= 0) {
        throw StructuralError("schedule lists vertex " + std::to_string(v) +
                              " twice");
      }
      group_of[v] = static_cast<std::int64_t>(g);
    }
  }
  for (std::size_t v = 0; v < n; ++v) {
    if (group_of[v] < 0) {
      throw StructuralError("schedule omits vertex " + std::to_string(v));
    }
    for (std::size_t k = adj.in_offsets[v]; k < adj.in_offsets[v + 1]; ++k) {
      const VertexId src = lattice.edges[adj.incoming[k]].src;
      if (group_of[src] >= group_of[v]) {
        throw StructuralError("schedule places vertex " + std::to_string(v) +
                              " no later than its predecessor " +
                              std::to_string(src));
      }
    }
  }
}

template <class K>
void forward_parallel(const Lattice& lattice, const Adjacency& adj,
                      const std::vector<typename K::Value>& w,
                      const Schedule& schedule, int threads,
                      std::vector<typename K::Value>& forward, OpCount& ops) {
  std::vector<OpCount> per_thread(threads);
  std::exception_ptr failure;
  std::mutex failure_mu;
  bool failed = false;
  std::barrier sync(threads);

  auto worker = [&](int id) {
    for (const auto& group : schedule) {
      if (!failed) {
        try {
          for (std::size_t i = id; i < group.size(); i += threads) {
            eval_vertex<K>(group[i], lattice, adj, w, forward, per_thread[id]);
          }
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mu);
          if (!failure) failure = std::current_exception();
        }
      }
      sync.arrive_and_wait();
      // Every worker observes the same value after the barrier.
      if (id == 0 && failure) failed = true;
      sync.arrive_and_wait();
    }
  };
  {
    std::vector<std::jthread> pool;
    pool.reserve(threads - 1);
    for (int id = 1; id < threads; ++id) pool.emplace_back(worker, id);
    worker(0);
  }
  if (failure) std::rethrow_exception(failure);
  for (const OpCount& c : per_thread) ops += c;
}

template <class K>
std::vector<typename K::Value> forward_values(
    const Lattice& lattice, const Adjacency& adj,
    const std::vector<typename K::Value>& w, OpCount& ops) {
  std::vector<typename K::Value> forward(lattice.vertex_count, K::zero());
  for (VertexId v = 0; v < lattice.vertex_count; ++v) {
    eval_vertex<K>(v, lattice, adj, w, forward, ops);
  }
  return forward;
}

template <class K>
std::vector<typename K::Value> backward_values(
    const Lattice& lattice, const Adjacency& adj,
    const std::vector<typename K::Value>& w) {
  using Value = typename K::Value;
  const auto n = static_cast<std::size_t>(lattice.vertex_count);
  std::vector<Value> beta(n, K::zero());
  std::vector<bool> is_leaf(n, false);
  for (VertexId l : lattice.leaves) is_leaf[l] = true;
  for (std::size_t v = n; v-- > 0;) {
    if (is_leaf[v]) {
      beta[v] = K::one();
      continue;
    }
    const std::size_t begin = adj.out_offsets[v];
    const std::size_t end = adj.out_offsets[v + 1];
    if (begin == end) continue;
    const Edge& first = lattice.edges[adj.outgoing[begin]];
    Value acc = K::times(w[first.weight_ref], beta[first.dst]);
    for (std::size_t k = begin + 1; k < end; ++k) {
      const Edge& e = lattice.edges[adj.outgoing[k]];
      acc = K::plus(acc, K::times(w[e.weight_ref], beta[e.dst]));
    }
    beta[v] = acc;
  }
  return beta;
}

template <class K>
ComputeResult compute_impl(const Lattice& lattice,
                           std::span<const SemiringValue> weights, SemiringId s,
                           const ComputeOptions& options) {
  const std::vector<typename K::Value> w = to_values<K>(weights, s);
  const Adjacency adj = build_adjacency(lattice);
  OpCount ops;
  std::vector<typename K::Value> forward;
  if (options.threads > 1) {
    Schedule levels;
    const Schedule* schedule = options.schedule;
    if (schedule == nullptr) {
      levels = depth_levels(lattice);
      schedule = &levels;
    }
    check_schedule(lattice, adj, *schedule);
    forward.assign(lattice.vertex_count, K::zero());
    forward_parallel<K>(lattice, adj, w, *schedule, options.threads, forward,
                        ops);
  } else {
    forward = forward_values<K>(lattice, adj, w, ops);
  }
  ComputeResult result;
  result.total = K::to_runtime(leaf_sum<K>(lattice, forward, ops));
  ops.traversals = 1;
  if (options.want_tables) {
    result.backward = to_runtime<K>(backward_values<K>(lattice, adj, w));
    result.forward = to_runtime<K>(forward);
  }
  if (options.want_ops) result.ops = ops;
  return result;
}

void check_logprobs(std::span<const double> table, const char* what) {
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (table[i] > 0.0) {
      throw DomainError(std::string(what) + " log-probability at index " +
                        std::to_string(i) + " is positive");
    }
  }
}

template <class K>
std::vector<double> gradient_impl(const Lattice& lattice,
                                  std::span<const double> logp,
                                  std::span<const double> logq,
                                  std::size_t component, GradientScale scale) {
  using Value = typename K::Value;
  const std::size_t m = logp.size();
  std::vector<Value> w(m);
  for (std::size_t i = 0; i < m; ++i) {
    w[i] = K::lift(logp[i], logq.empty() ? 0.0 : logq[i]);
  }
  const Adjacency adj = build_adjacency(lattice);
  OpCount unused;
  const std::vector<Value> forward = forward_values<K>(lattice, adj, w, unused);
  const Value total = leaf_sum<K>(lattice, forward, unused);

  // la[v][k]: log of d(linear output) / d(linear forward[v][k]).
  Value seed = K::zero();
  if constexpr (std::is_same_v<Value, double>) {
    seed = 0.0;
  } else {
    seed[component] = 0.0;
  }
  std::vector<Value> la(lattice.vertex_count, K::zero());
  for (VertexId l : lattice.leaves) la[l] = seed;

  std::vector<double> pos(m, kNegInf), neg(m, kNegInf);
  for (VertexId v = lattice.vertex_count; v-- > 0;) {
    const Value& la_v = la[v];
    if (adj.is_root[v]) {
      const std::int64_t entry = adj.entry_of[v];
      if (entry >= 0) {
        const std::size_t ref = lattice.entries[entry].weight_ref;
        Value la_one = K::zero(), la_w = K::zero();
        K::times_adjoint(la_v, K::one(), w[ref], la_one, la_w);
        K::lift_adjoint(logp[ref], logq.empty() ? 0.0 : logq[ref], la_w,
                        pos[ref], neg[ref]);
      }
      continue;
    }
    for (std::size_t k = adj.in_offsets[v]; k < adj.in_offsets[v + 1]; ++k) {
      const Edge& e = lattice.edges[adj.incoming[k]];
      Value la_w = K::zero();
      K::times_adjoint(la_v, forward[e.src], w[e.weight_ref], la[e.src], la_w);
      K::lift_adjoint(logp[e.weight_ref],
                      logq.empty() ? 0.0 : logq[e.weight_ref], la_w,
                      pos[e.weight_ref], neg[e.weight_ref]);
    }
  }

  const double shift =
      scale == GradientScale::kLog ? K::component(total, component) : 0.0;
  std::vector<double> grad(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    if (pos[i] == kNegInf && neg[i] == kNegInf) continue;
    const double p = pos[i] == kNegInf ? 0.0 : std::exp(pos[i] - shift);
    const double q = neg[i] == kNegInf ? 0.0 : std::exp(neg[i] - shift);
    grad[i] = p - q;
  }
  return grad;
}

}  // namespace

ComputeResult compute(const Lattice& lattice,
                      std::span<const SemiringValue> weights, SemiringId s,
                      const ComputeOptions& options) {
  validate(lattice, weights.size());
  return kernels::dispatch(s, [&]<class K>(K) {
    return compute_impl<K>(lattice, weights, s, options);
  });
}

std::vector<SemiringValue> backward(const Lattice& lattice,
                                    std::span<const SemiringValue> weights,
                                    SemiringId s) {
  validate(lattice, weights.size());
  return kernels::dispatch(s, [&]<class K>(K) {
    const auto w = to_values<K>(weights, s);
    return to_runtime<K>(backward_values<K>(lattice, build_adjacency(lattice), w));
  });
}

std::vector<double> gradient_dense(const Lattice& lattice,
                                   std::span<const double> student_logp,
                                   std::span<const double> teacher_logq,
                                   SemiringId s, std::size_t component,
                                   GradientScale scale) {
  if (!is_log_space(s)) {
    throw UnsupportedError("gradients require a log-space semiring, got " +
                           std::string(name(s)));
  }
  if (component >= arity(s)) {
    throw UsageError("component " + std::to_string(component) +
                     " out of range for semiring " + std::string(name(s)));
  }
  if (s == SemiringId::kLogReverseKl) {
    if (teacher_logq.size() != student_logp.size()) {
      throw UsageError("log-reverse-kl gradient needs a teacher table of the "
                       "student's size");
    }
  } else if (!teacher_logq.empty()) {
    throw UsageError("teacher table given to semiring " + std::string(name(s)));
  }
  validate(lattice, student_logp.size());
  check_logprobs(student_logp, "student");
  check_logprobs(teacher_logq, "teacher");
  return kernels::dispatch_log_space(s, [&]<class K>(K) {
    return gradient_impl<K>(lattice, student_logp, teacher_logq, component,
                            scale);
  });
}

GradientTable gradient(const Lattice& lattice,
                       std::span<const double> student_logp,
                       std::span<const double> teacher_logq, SemiringId s,
                       std::size_t component) {
  const std::vector<double> dense = gradient_dense(
      lattice, student_logp, teacher_logq, s, component, GradientScale::kLog);
  const std::vector<bool> useful = useful_vertices(lattice);
  GradientTable table;
  for (const Edge& e : lattice.edges) {
    if (useful[e.src] && useful[e.dst]) table[e.weight_ref] = dense[e.weight_ref];
  }
  for (const Entry& en : lattice.entries) {
    if (useful[en.vertex]) table[en.weight_ref] = dense[en.weight_ref];
  }
  return table;
}

}  // namespace semirng
