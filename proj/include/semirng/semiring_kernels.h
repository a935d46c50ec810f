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

// Compile-time semiring policies. Each policy provides
//
//   Value                      component storage
//   zero(), one()              identities
//   plus(a, b), times(a, b)    the semiring operations
//   lift(logp, logq)           edge weight from normalized log-probabilities
//   kTimesCost, kPlusCost      scalar op accounting (see OpCost)
//
// Log-space policies additionally provide the reverse-mode rules used by the
// gradient pass (times_adjoint / lift_adjoint). Adjoints there are carried as
// logarithms of the derivative of the *linear* output with respect to the
// *linear* component; every such derivative is nonnegative because the
// linear semirings involved are multilinear with nonnegative coefficients,
// so the only sign change happens in the lift itself.

#ifndef SEMIRNG_SEMIRING_KERNELS_H_
#define SEMIRNG_SEMIRING_KERNELS_H_

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>

#include "semirng/errors.h"
#include "semirng/semiring.h"

namespace semirng::kernels {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kPosInf = std::numeric_limits<double>::infinity();

// Scalar floating operations charged to one semiring operation. The
// convention counts the linear-domain work: a log-entropy times is
// <ac, ad + bc>, i.e. 3 multiplications and 1 addition, even though in log
// space those become additions inside log-sum-exp. Max-subtraction
// bookkeeping is not counted.
struct OpCost {
  std::int64_t mul = 0;
  std::int64_t add = 0;
};

// log(e^a + e^b) by max subtraction. -inf is the identity and is handled by
// branching so that (-inf) - (-inf) is never formed.
inline double log_add(double a, double b) {
  if (std::isnan(a) || std::isnan(b)) return std::numeric_limits<double>::quiet_NaN();
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  if (a == kPosInf || b == kPosInf) return kPosInf;
  if (a < b) std::swap(a, b);
  return a + std::log1p(std::exp(b - a));
}

// a + b in log space with -inf absorbing, including against +inf.
inline double log_mul(double a, double b) {
  if (std::isnan(a) || std::isnan(b)) return std::numeric_limits<double>::quiet_NaN();
  if (a == kNegInf || b == kNegInf) return kNegInf;
  return a + b;
}

// Log-sum-exp of a range, by a left fold of log_add.
template <class Range>
double log_sum_exp(const Range& xs) {
  double acc = kNegInf;
  for (double x : xs) acc = log_add(acc, x);
  return acc;
}

// log(-p log p) from log p. Caller guarantees logp <= 0 or NaN.
inline double xlogx_log_unchecked(double logp) {
  if (std::isnan(logp)) return logp;
  if (logp == 0.0 || logp == kNegInf) return kNegInf;
  return logp + std::log(-logp);
}

// log(-q log p) = log q + log(-log p).
inline double cross_log(double logp, double logq) {
  if (std::isnan(logp) || std::isnan(logq)) return std::numeric_limits<double>::quiet_NaN();
  if (logq == kNegInf || logp == 0.0) return kNegInf;
  if (logp == kNegInf) return kPosInf;
  return logq + std::log(-logp);
}

struct Probability {
  static constexpr SemiringId kId = SemiringId::kProbability;
  using Value = double;
  static constexpr OpCost kTimesCost{1, 0};
  static constexpr OpCost kPlusCost{0, 1};

  static Value zero() { return 0.0; }
  static Value one() { return 1.0; }
  static Value plus(Value a, Value b) { return a + b; }
  static Value times(Value a, Value b) { return a * b; }
  static Value lift(double logp, double) { return std::exp(logp); }
  static SemiringValue to_runtime(Value v) { return SemiringValue::make(kId, {v}); }
  static Value from_runtime(const SemiringValue& v) { return v.c[0]; }
};

struct Log {
  static constexpr SemiringId kId = SemiringId::kLog;
  using Value = double;
  static constexpr OpCost kTimesCost{0, 1};
  static constexpr OpCost kPlusCost{0, 1};

  static Value zero() { return kNegInf; }
  static Value one() { return 0.0; }
  static Value plus(Value a, Value b) { return log_add(a, b); }
  static Value times(Value a, Value b) { return log_mul(a, b); }
  static Value lift(double logp, double) { return logp; }
  static SemiringValue to_runtime(Value v) { return SemiringValue::make(kId, {v}); }
  static Value from_runtime(const SemiringValue& v) { return v.c[0]; }

  static double component(const Value& v, std::size_t) { return v; }

  // y = f * w.
  static void times_adjoint(const Value& la_y, const Value& f, const Value& w,
                            Value& la_f, Value& la_w) {
    la_f = log_add(la_f, log_mul(la_y, w));
    la_w = log_mul(la_y, f);
  }

  // d(exp w)/dlogp = p.
  static void lift_adjoint(double logp, double, const Value& la_w,
                           double& pos, double& neg) {
    (void)neg;
    pos = log_add(pos, log_mul(la_w, logp));
  }
};

// Viterbi: (max, +, -inf, 0). Equal arguments return either one.
struct Tropical {
  static constexpr SemiringId kId = SemiringId::kTropical;
  using Value = double;
  static constexpr OpCost kTimesCost{0, 1};
  static constexpr OpCost kPlusCost{0, 1};

  static Value zero() { return kNegInf; }
  static Value one() { return 0.0; }
  static Value plus(Value a, Value b) {
    if (std::isnan(a) || std::isnan(b)) return std::numeric_limits<double>::quiet_NaN();
    return a < b ? b : a;
  }
  static Value times(Value a, Value b) { return log_mul(a, b); }
  static Value lift(double logp, double) { return logp; }
  static SemiringValue to_runtime(Value v) { return SemiringValue::make(kId, {v}); }
  static Value from_runtime(const SemiringValue& v) { return v.c[0]; }
};

struct Counting {
  static constexpr SemiringId kId = SemiringId::kCounting;
  using Value = std::uint64_t;
  static constexpr OpCost kTimesCost{1, 0};
  static constexpr OpCost kPlusCost{0, 1};
  static constexpr Value kMax =
      static_cast<Value>(std::numeric_limits<std::int64_t>::max());

  static Value zero() { return 0; }
  static Value one() { return 1; }
  static Value plus(Value a, Value b) {
    Value r = 0;
    if (__builtin_add_overflow(a, b, &r) || r > kMax)
      throw OverflowError("path count exceeds 2^63-1");
    return r;
  }
  static Value times(Value a, Value b) {
    Value r = 0;
    if (__builtin_mul_overflow(a, b, &r) || r > kMax)
      throw OverflowError("path count exceeds 2^63-1");
    return r;
  }
  static Value lift(double, double) { return 1; }
  static SemiringValue to_runtime(Value v) { return SemiringValue::counting(v); }
  static Value from_runtime(const SemiringValue& v) { return v.count; }
};

// Dual numbers <p, p log p>. Teaching/oracle semiring: underflows on long
// lattices.
struct Entropy {
  static constexpr SemiringId kId = SemiringId::kEntropy;
  using Value = std::array<double, 2>;
  static constexpr OpCost kTimesCost{3, 1};
  static constexpr OpCost kPlusCost{0, 2};

  static Value zero() { return {0.0, 0.0}; }
  static Value one() { return {1.0, 0.0}; }
  static Value plus(const Value& a, const Value& b) {
    return {a[0] + b[0], a[1] + b[1]};
  }
  static Value times(const Value& a, const Value& b) {
    return {a[0] * b[0], a[0] * b[1] + a[1] * b[0]};
  }
  static Value lift(double logp, double) {
    const double p = std::exp(logp);
    if (p == 0.0) return {0.0, 0.0};
    return {p, p * logp};
  }
  static SemiringValue to_runtime(const Value& v) {
    return SemiringValue::make(kId, {v[0], v[1]});
  }
  static Value from_runtime(const SemiringValue& v) { return {v.c[0], v.c[1]}; }
};

// <log p, log(-p log p)>.
struct LogEntropy {
  static constexpr SemiringId kId = SemiringId::kLogEntropy;
  using Value = std::array<double, 2>;
  static constexpr OpCost kTimesCost{3, 1};
  static constexpr OpCost kPlusCost{0, 2};

  static Value zero() { return {kNegInf, kNegInf}; }
  static Value one() { return {0.0, kNegInf}; }
  static Value plus(const Value& a, const Value& b) {
    return {log_add(a[0], b[0]), log_add(a[1], b[1])};
  }
  static Value times(const Value& a, const Value& b) {
    return {log_mul(a[0], b[0]),
            log_add(log_mul(a[0], b[1]), log_mul(a[1], b[0]))};
  }
  static Value lift(double logp, double) {
    return {logp, xlogx_log_unchecked(logp)};
  }
  static SemiringValue to_runtime(const Value& v) {
    return SemiringValue::make(kId, {v[0], v[1]});
  }
  static Value from_runtime(const SemiringValue& v) { return {v.c[0], v.c[1]}; }

  static double component(const Value& v, std::size_t k) { return v[k]; }

  // Linear form: y0 = f0 w0, y1 = f0 w1 + f1 w0.
  static void times_adjoint(const Value& la_y, const Value& f, const Value& w,
                            Value& la_f, Value& la_w) {
    la_f[0] = log_add(la_f[0], log_add(log_mul(la_y[0], w[0]),
                                       log_mul(la_y[1], w[1])));
    la_f[1] = log_add(la_f[1], log_mul(la_y[1], w[0]));
    la_w[0] = log_add(log_mul(la_y[0], f[0]), log_mul(la_y[1], f[1]));
    la_w[1] = log_mul(la_y[1], f[0]);
  }

  // d p/dlogp = p; d(-p log p)/dlogp = -p (1 + log p).
  static void lift_adjoint(double logp, double, const Value& la_w,
                           double& pos, double& neg) {
    if (logp == kNegInf) return;
    pos = log_add(pos, log_mul(la_w[0], logp));
    const double slope = 1.0 + logp;
    if (slope > 0.0) {
      neg = log_add(neg, log_mul(la_w[1], logp + std::log(slope)));
    } else if (slope < 0.0) {
      pos = log_add(pos, log_mul(la_w[1], logp + std::log(-slope)));
    }
  }
};

// <log p, log q, log(-q log q), log(-q log p)>: student likelihood, teacher
// likelihood, teacher entropy and teacher-student cross entropy in one pass.
struct LogReverseKl {
  static constexpr SemiringId kId = SemiringId::kLogReverseKl;
  using Value = std::array<double, 4>;
  static constexpr OpCost kTimesCost{6, 2};
  static constexpr OpCost kPlusCost{0, 4};

  static Value zero() { return {kNegInf, kNegInf, kNegInf, kNegInf}; }
  static Value one() { return {0.0, 0.0, kNegInf, kNegInf}; }
  static Value plus(const Value& a, const Value& b) {
    return {log_add(a[0], b[0]), log_add(a[1], b[1]), log_add(a[2], b[2]),
            log_add(a[3], b[3])};
  }
  static Value times(const Value& a, const Value& b) {
    return {log_mul(a[0], b[0]), log_mul(a[1], b[1]),
            log_add(log_mul(a[1], b[2]), log_mul(a[2], b[1])),
            log_add(log_mul(a[1], b[3]), log_mul(a[3], b[1]))};
  }
  static Value lift(double logp, double logq) {
    return {logp, logq, xlogx_log_unchecked(logq), cross_log(logp, logq)};
  }
  static SemiringValue to_runtime(const Value& v) {
    return SemiringValue::make(kId, {v[0], v[1], v[2], v[3]});
  }
  static Value from_runtime(const SemiringValue& v) { return v.c; }

  static double component(const Value& v, std::size_t k) { return v[k]; }

  // Linear form: y0 = f0 w0, y1 = f1 w1, y2 = f1 w2 + f2 w1,
  // y3 = f1 w3 + f3 w1.
  static void times_adjoint(const Value& la_y, const Value& f, const Value& w,
                            Value& la_f, Value& la_w) {
    la_f[0] = log_add(la_f[0], log_mul(la_y[0], w[0]));
    la_f[1] = log_add(la_f[1],
                      log_add(log_mul(la_y[1], w[1]),
                              log_add(log_mul(la_y[2], w[2]),
                                      log_mul(la_y[3], w[3]))));
    la_f[2] = log_add(la_f[2], log_mul(la_y[2], w[1]));
    la_f[3] = log_add(la_f[3], log_mul(la_y[3], w[1]));
    la_w[0] = log_mul(la_y[0], f[0]);
    la_w[1] = log_add(log_mul(la_y[1], f[1]),
                      log_add(log_mul(la_y[2], f[2]), log_mul(la_y[3], f[3])));
    la_w[2] = log_mul(la_y[2], f[1]);
    la_w[3] = log_mul(la_y[3], f[1]);
  }

  // Student-only: d p/dlogp = p; d(-q log p)/dlogp = -q. The teacher slots
  // do not depend on the student.
  static void lift_adjoint(double logp, double logq, const Value& la_w,
                           double& pos, double& neg) {
    pos = log_add(pos, log_mul(la_w[0], logp));
    neg = log_add(neg, log_mul(la_w[3], logq));
  }
};

// Calls f(Policy{}) for the policy matching `s`.
template <class F>
decltype(auto) dispatch(SemiringId s, F&& f) {
  switch (s) {
    case SemiringId::kProbability:
      return f(Probability{});
    case SemiringId::kLog:
      return f(Log{});
    case SemiringId::kTropical:
      return f(Tropical{});
    case SemiringId::kCounting:
      return f(Counting{});
    case SemiringId::kEntropy:
      return f(Entropy{});
    case SemiringId::kLogEntropy:
      return f(LogEntropy{});
    case SemiringId::kLogReverseKl:
      return f(LogReverseKl{});
  }
  throw UsageError("unknown semiring");
}

template <class F>
decltype(auto) dispatch_log_space(SemiringId s, F&& f) {
  switch (s) {
    case SemiringId::kLog:
      return f(Log{});
    case SemiringId::kLogEntropy:
      return f(LogEntropy{});
    case SemiringId::kLogReverseKl:
      return f(LogReverseKl{});
    default:
      throw UnsupportedError("gradients require a log-space semiring, got " +
                             std::string(name(s)));
  }
}

}  // namespace semirng::kernels

#endif  // SEMIRNG_SEMIRING_KERNELS_H_
