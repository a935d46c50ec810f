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

// Training objectives built from lattice computations.
//
//   entropy regularized:  nll - alpha_ent * H
//   soft distillation:    nll + alpha_state * kl_state
//   semiring distillation nll + alpha_state * kl_state + alpha_seq * kl_seq
//
// A term whose weight is exactly zero is dropped rather than multiplied, so
// a zero weight never turns an infinite part into NaN and the total stays
// bitwise equal to the remaining sum.

#ifndef SEMIRNG_LOSSES_H_
#define SEMIRNG_LOSSES_H_

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "semirng/ctc.h"
#include "semirng/engine.h"
#include "semirng/lattice.h"
#include "semirng/rnnt.h"

namespace semirng {

enum class ModelKind { kCtc, kRnnt };

struct LossConfig {
  double alpha_ent = 0.0;
  double alpha_state = 0.0;
  double alpha_seq = 0.0;
  double alpha_distill = 0.0;
  ModelKind model_kind = ModelKind::kCtc;
};

// Throws UsageError unless every weight is finite and nonnegative.
void validate(const LossConfig& cfg);

struct LossReport {
  double nll = 0.0;
  std::optional<double> entropy;
  std::optional<double> kl_state;
  std::optional<double> kl_seq;
  std::optional<double> teacher_entropy_term;  // sum_pi q log q
  std::optional<double> cross_term;            // -sum_pi q log p
  double total = 0.0;
  OpCount ops;
};

// alpha * x, or exactly 0 when alpha is 0.
inline double weighted_term(double alpha, double x) {
  return alpha == 0.0 ? 0.0 : alpha * x;
}

// One utterance: the lattice, its student (and optional teacher) weight
// tables, and the full-vocabulary joint tensors they were sliced from.
// For CTC the joint is the T x V frame matrix and the weight table itself.
// For RNN-T the joint is (T + 1) x (U + 1) x V; it is empty when the grid
// was supplied pre-sliced, which leaves kl_state unavailable.
struct AlignmentProblem {
  ModelKind kind = ModelKind::kCtc;
  Lattice lattice;
  std::vector<double> student;
  std::vector<double> teacher;
  bool normalized = true;
  std::size_t vocab = 0;
  std::vector<double> student_joint;
  std::vector<double> teacher_joint;
  std::vector<std::size_t> weight_to_joint;

  bool has_teacher() const { return !teacher.empty(); }
  bool has_joint() const { return !student_joint.empty(); }
};

AlignmentProblem make_ctc_problem(const FrameLogProbs& student,
                                  const LabelSequence& labels,
                                  const FrameLogProbs* teacher = nullptr);

// `student_joint` and `teacher_joint` may be empty (pre-sliced grids).
AlignmentProblem make_rnnt_problem(const RnntGridLogProbs& student,
                                   const RnntGridLogProbs* teacher,
                                   std::span<const double> student_joint,
                                   std::span<const double> teacher_joint,
                                   std::size_t vocab, bool require_final_blank);

// sum q (log q - log p) over matching entries. Entries with q = 0 add
// nothing; p = 0 under q > 0 makes the result +inf.
double kl_state(std::span<const double> teacher_joint,
                std::span<const double> student_joint);

// Infeasible problems report nll = total = +inf and entropy = 0.
LossReport entropy_regularized_loss(const AlignmentProblem& problem,
                                    const LossConfig& cfg);

LossReport soft_distillation_loss(const AlignmentProblem& problem,
                                  const LossConfig& cfg);

// One log-reverse-KL traversal plus one pass over the joint tensors.
LossReport semiring_distillation_loss(const AlignmentProblem& problem,
                                      const LossConfig& cfg);

enum class LossKind { kNll, kEntropyRegularized, kSoftDistillation, kSemiringDistillation };

// Derivatives of a loss total. With a joint tensor the gradient is indexed
// like the joint, otherwise like the weight table. The teacher is held
// constant, so `teacher` is all zeros by construction.
struct LossGradient {
  std::vector<double> student;
  std::vector<double> teacher;
};

LossGradient loss_gradient(const AlignmentProblem& problem, LossKind kind,
                           const LossConfig& cfg);

}  // namespace semirng

#endif  // SEMIRNG_LOSSES_H_
