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

#include "semirng/semiring.h"

#include <cmath>
#include <cstdio>
#include <string>

#include "semirng/errors.h"
#include "semirng/semiring_kernels.h"

namespace semirng {

namespace {

void check_operand(SemiringId s, const SemiringValue& v) {
  if (v.semiring != s) {
    throw UsageError("operand of semiring " + std::string(name(v.semiring)) +
                     " passed to " + std::string(name(s)));
  }
}

void check_logprob(double x, const char* what) {
  if (x > 0.0) {
    throw DomainError(std::string(what) + " log-probability " +
                      std::to_string(x) + " is positive");
  }
}

}  // namespace

std::string_view name(SemiringId s) {
  switch (s) {
    case SemiringId::kProbability:
      return "probability";
    case SemiringId::kLog:
      return "log";
    case SemiringId::kTropical:
      return "tropical";
    case SemiringId::kCounting:
      return "counting";
    case SemiringId::kEntropy:
      return "entropy";
    case SemiringId::kLogEntropy:
      return "log-entropy";
    case SemiringId::kLogReverseKl:
      return "log-reverse-kl";
  }
  return "?";
}

SemiringId parse_semiring(std::string_view text) {
  for (SemiringId s : kAllSemirings) {
    if (name(s) == text) return s;
  }
  throw UsageError("unknown semiring '" + std::string(text) + "'");
}

SemiringValue SemiringValue::make(SemiringId s,
                                  std::initializer_list<double> comps) {
  if (comps.size() != arity(s)) {
    throw UsageError("semiring " + std::string(name(s)) + " takes " +
                     std::to_string(arity(s)) + " components");
  }
  SemiringValue v;
  v.semiring = s;
  std::size_t i = 0;
  for (double x : comps) v.c[i++] = x;
  return v;
}

SemiringValue SemiringValue::counting(std::uint64_t n) {
  SemiringValue v;
  v.semiring = SemiringId::kCounting;
  v.count = n;
  return v;
}

SemiringValue plus(SemiringId s, const SemiringValue& a,
                   const SemiringValue& b) {
  check_operand(s, a);
  check_operand(s, b);
  return kernels::dispatch(s, [&]<class K>(K) {
    return K::to_runtime(K::plus(K::from_runtime(a), K::from_runtime(b)));
  });
}

SemiringValue times(SemiringId s, const SemiringValue& a,
                    const SemiringValue& b) {
  check_operand(s, a);
  check_operand(s, b);
  return kernels::dispatch(s, [&]<class K>(K) {
    return K::to_runtime(K::times(K::from_runtime(a), K::from_runtime(b)));
  });
}

SemiringValue zero(SemiringId s) {
  return kernels::dispatch(s, []<class K>(K) { return K::to_runtime(K::zero()); });
}

SemiringValue one(SemiringId s) {
  return kernels::dispatch(s, []<class K>(K) { return K::to_runtime(K::one()); });
}

SemiringValue lift(SemiringId s, double student_logp,
                   std::optional<double> teacher_logq) {
  if (s == SemiringId::kCounting) return SemiringValue::counting(1);
  check_logprob(student_logp, "student");
  double logq = 0.0;
  if (s == SemiringId::kLogReverseKl) {
    if (!teacher_logq) {
      throw UsageError("log-reverse-kl lift needs a teacher log-probability");
    }
    logq = *teacher_logq;
    check_logprob(logq, "teacher");
  } else if (teacher_logq) {
    throw UsageError("teacher log-probability given to semiring " +
                     std::string(name(s)));
  }
  return kernels::dispatch(s, [&]<class K>(K) {
    return K::to_runtime(K::lift(student_logp, logq));
  });
}

std::vector<SemiringValue> lift_table(SemiringId s,
                                      std::span<const double> student_logp,
                                      std::span<const double> teacher_logq) {
  const bool needs_teacher = s == SemiringId::kLogReverseKl;
  if (needs_teacher && teacher_logq.size() != student_logp.size()) {
    throw UsageError("teacher table size " +
                     std::to_string(teacher_logq.size()) +
                     " does not match student table size " +
                     std::to_string(student_logp.size()));
  }
  if (!needs_teacher && !teacher_logq.empty()) {
    throw UsageError("teacher table given to semiring " + std::string(name(s)));
  }
  std::vector<SemiringValue> out;
  out.reserve(student_logp.size());
  for (std::size_t i = 0; i < student_logp.size(); ++i) {
    out.push_back(needs_teacher ? lift(s, student_logp[i], teacher_logq[i])
                                : lift(s, student_logp[i]));
  }
  return out;
}

double xlogx_log(double logp) {
  check_logprob(logp, "input");
  return kernels::xlogx_log_unchecked(logp);
}

std::vector<double> to_probability_domain(const SemiringValue& v) {
  switch (v.semiring) {
    case SemiringId::kProbability:
      return {v.c[0]};
    case SemiringId::kLog:
    case SemiringId::kTropical:
      return {std::exp(v.c[0])};
    case SemiringId::kCounting:
      return {static_cast<double>(v.count)};
    case SemiringId::kEntropy:
      return {v.c[0], v.c[1]};
    case SemiringId::kLogEntropy:
      return {std::exp(v.c[0]), -std::exp(v.c[1])};
    case SemiringId::kLogReverseKl:
      return {std::exp(v.c[0]), std::exp(v.c[1]), -std::exp(v.c[2]),
              -std::exp(v.c[3])};
  }
  return {};
}

std::string to_string(const SemiringValue& v) {
  std::string out(name(v.semiring));
  out += "<";
  if (v.semiring == SemiringId::kCounting) {
    out += std::to_string(v.count);
  } else {
    char buf[32];
    for (std::size_t i = 0; i < arity(v.semiring); ++i) {
      if (i) out += ", ";
      std::snprintf(buf, sizeof(buf), "%.17g", v.c[i]);
      out += buf;
    }
  }
  out += ">";
  return out;
}

}  // namespace semirng
