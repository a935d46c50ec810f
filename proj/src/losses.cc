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

#include "semirng/losses.h"

#include <cmath>
#include <numeric>
#include <string>

#include "semirng/errors.h"
#include "semirng/semiring_kernels.h"

namespace semirng {

namespace {

using kernels::kNegInf;
using kernels::kPosInf;

void require_normalized(const AlignmentProblem& p, const char* what) {
  if (!p.normalized) {
    throw UnsupportedError(std::string(what) +
                           " requires normalized log-probabilities");
  }
}

void require_teacher(const AlignmentProblem& p) {
  if (!p.has_teacher()) throw UsageError("distillation needs teacher log-probabilities");
}

void require_joint(const AlignmentProblem& p) {
  if (!p.has_joint() || p.teacher_joint.size() != p.student_joint.size()) {
    throw UnsupportedError(
        "kl_state needs full-vocabulary joint tensors for teacher and student");
  }
}

SemiringValue run(const AlignmentProblem& p, SemiringId s, OpCount* ops) {
  const auto w = s == SemiringId::kLogReverseKl
                     ? lift_table(s, p.student, p.teacher)
                     : lift_table(s, p.student);
  ComputeOptions opts;
  opts.want_ops = ops != nullptr;
  ComputeResult r = compute(p.lattice, w, s, opts);
  if (ops != nullptr) *ops += *r.ops;
  return r.total;
}

// Scatters a weight-table gradient onto the joint layout when there is one.
std::vector<double> to_input_layout(const AlignmentProblem& p,
                                    const std::vector<double>& g) {
  if (!p.has_joint() || p.weight_to_joint.empty()) return g;
  std::vector<double> out(p.student_joint.size(), 0.0);
  for (std::size_t i = 0; i < g.size(); ++i) out[p.weight_to_joint[i]] += g[i];
  return out;
}

std::vector<double> scaled(std::vector<double> g, double a) {
  for (double& x : g) x *= a;
  return g;
}

void add_into(std::vector<double>& acc, const std::vector<double>& g) {
  for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += g[i];
}

}  // namespace

void validate(const LossConfig& cfg) {
  for (double a : {cfg.alpha_ent, cfg.alpha_state, cfg.alpha_seq, cfg.alpha_distill}) {
    if (!std::isfinite(a) || a < 0.0) {
      throw UsageError("loss weights must be finite and nonnegative");
    }
  }
}

AlignmentProblem make_ctc_problem(const FrameLogProbs& student,
                                  const LabelSequence& labels,
                                  const FrameLogProbs* teacher) {
  AlignmentProblem p;
  p.kind = ModelKind::kCtc;
  p.lattice = build_ctc_lattice(student.frames(), labels, student.vocab()).lattice;
  p.student = student.data();
  p.normalized = student.normalized();
  p.vocab = student.vocab();
  p.student_joint = student.data();
  p.weight_to_joint.resize(p.student.size());
  std::iota(p.weight_to_joint.begin(), p.weight_to_joint.end(), std::size_t{0});
  if (teacher != nullptr) {
    if (teacher->frames() != student.frames() || teacher->vocab() != student.vocab()) {
      throw UsageError("teacher and student logits differ in shape");
    }
    p.teacher = teacher->data();
    p.teacher_joint = teacher->data();
    p.normalized = p.normalized && teacher->normalized();
  }
  return p;
}

AlignmentProblem make_rnnt_problem(const RnntGridLogProbs& student,
                                   const RnntGridLogProbs* teacher,
                                   std::span<const double> student_joint,
                                   std::span<const double> teacher_joint,
                                   std::size_t vocab, bool require_final_blank) {
  AlignmentProblem p;
  p.kind = ModelKind::kRnnt;
  p.lattice = build_rnnt_lattice(student.frames(), student.label_count(),
                                 require_final_blank)
                  .lattice;
  p.student = student.weights();
  p.normalized = student.normalized();
  p.vocab = vocab;
  p.student_joint.assign(student_joint.begin(), student_joint.end());
  p.weight_to_joint = student.joint_index();
  if (p.has_joint() && p.weight_to_joint.size() != p.student.size()) {
    throw UsageError("student grid was not sliced from the given joint tensor");
  }
  if (teacher != nullptr) {
    if (teacher->frames() != student.frames() ||
        teacher->label_count() != student.label_count()) {
      throw UsageError("teacher and student grids differ in shape");
    }
    p.teacher = teacher->weights();
    p.teacher_joint.assign(teacher_joint.begin(), teacher_joint.end());
    p.normalized = p.normalized && teacher->normalized();
  }
  return p;
}

double kl_state(std::span<const double> teacher_joint,
                std::span<const double> student_joint) {
  if (teacher_joint.size() != student_joint.size()) {
    throw UsageError("kl_state tensors differ in shape");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < teacher_joint.size(); ++i) {
    const double lq = teacher_joint[i];
    const double lp = student_joint[i];
    if (lq > 0.0 || lp > 0.0) throw DomainError("kl_state inputs must be log-probabilities");
    if (lq == kNegInf) continue;
    if (lp == kNegInf) return kPosInf;
    sum += std::exp(lq) * (lq - lp);
  }
  return sum;
}

LossReport entropy_regularized_loss(const AlignmentProblem& problem,
                                    const LossConfig& cfg) {
  validate(cfg);
  require_normalized(problem, "entropy-regularized loss");
  LossReport r;
  const SemiringValue total = run(problem, SemiringId::kLogEntropy, &r.ops);
  r.nll = -total[0];
  if (r.nll == kPosInf) {
    r.entropy = 0.0;
    r.total = kPosInf;
    return r;
  }
  r.entropy = std::exp(total[1]);
  r.total = r.nll - weighted_term(cfg.alpha_ent, *r.entropy);
  return r;
}

LossReport soft_distillation_loss(const AlignmentProblem& problem,
                                  const LossConfig& cfg) {
  validate(cfg);
  require_teacher(problem);
  require_joint(problem);
  LossReport r;
  r.nll = -run(problem, SemiringId::kLog, &r.ops)[0];
  r.kl_state = kl_state(problem.teacher_joint, problem.student_joint);
  r.total = r.nll + weighted_term(cfg.alpha_state, *r.kl_state);
  return r;
}

LossReport semiring_distillation_loss(const AlignmentProblem& problem,
                                      const LossConfig& cfg) {
  validate(cfg);
  require_teacher(problem);
  require_normalized(problem, "sequence KL");
  LossReport r;
  const SemiringValue total = run(problem, SemiringId::kLogReverseKl, &r.ops);
  const SequenceKl kl = sequence_kl_from_total(total, r.ops);
  r.nll = kl.student_nll;
  r.kl_seq = kl.kl_seq;
  r.teacher_entropy_term = kl.teacher_neg_entropy;
  r.cross_term = kl.cross_term;
  if (cfg.alpha_state != 0.0) {
    require_joint(problem);
    r.kl_state = kl_state(problem.teacher_joint, problem.student_joint);
  } else if (problem.has_joint() &&
             problem.teacher_joint.size() == problem.student_joint.size()) {
    r.kl_state = kl_state(problem.teacher_joint, problem.student_joint);
  }
  r.total = r.nll + weighted_term(cfg.alpha_state, r.kl_state.value_or(0.0)) +
            weighted_term(cfg.alpha_seq, *r.kl_seq);
  return r;
}

LossGradient loss_gradient(const AlignmentProblem& problem, LossKind kind,
                           const LossConfig& cfg) {
  validate(cfg);
  const std::size_t n = problem.has_joint() ? problem.student_joint.size()
                                            : problem.student.size();
  LossGradient out;
  out.teacher.assign(problem.has_teacher() ? n : 0, 0.0);

  auto lattice_grad = [&](SemiringId s, std::size_t k, GradientScale scale) {
    const std::span<const double> q =
        s == SemiringId::kLogReverseKl ? std::span<const double>(problem.teacher)
                                       : std::span<const double>();
    return to_input_layout(
        problem, gradient_dense(problem.lattice, problem.student, q, s, k, scale));
  };
  auto kl_state_grad = [&] {
    require_joint(problem);
    std::vector<double> g(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double lq = problem.teacher_joint[i];
      if (lq != kNegInf) g[i] = -std::exp(lq);
    }
    return g;
  };

  switch (kind) {
    case LossKind::kNll:
      out.student = scaled(lattice_grad(SemiringId::kLog, 0, GradientScale::kLog), -1.0);
      break;
    case LossKind::kEntropyRegularized: {
      require_normalized(problem, "entropy-regularized loss");
      out.student = scaled(
          lattice_grad(SemiringId::kLogEntropy, 0, GradientScale::kLog), -1.0);
      if (cfg.alpha_ent != 0.0) {
        add_into(out.student,
                 scaled(lattice_grad(SemiringId::kLogEntropy, 1, GradientScale::kLinear),
                        -cfg.alpha_ent));
      }
      break;
    }
    case LossKind::kSoftDistillation:
      require_teacher(problem);
      out.student = scaled(lattice_grad(SemiringId::kLog, 0, GradientScale::kLog), -1.0);
      if (cfg.alpha_state != 0.0) add_into(out.student, scaled(kl_state_grad(), cfg.alpha_state));
      break;
    case LossKind::kSemiringDistillation: {
      require_teacher(problem);
      require_normalized(problem, "sequence KL");
      out.student = scaled(
          lattice_grad(SemiringId::kLogReverseKl, 0, GradientScale::kLog), -1.0);
      if (cfg.alpha_seq != 0.0) {
        // kl_seq = exp(c4) - exp(c3); c3 holds teacher terms only.
        add_into(out.student,
                 scaled(lattice_grad(SemiringId::kLogReverseKl, 3, GradientScale::kLinear),
                        cfg.alpha_seq));
      }
      if (cfg.alpha_state != 0.0) add_into(out.student, scaled(kl_state_grad(), cfg.alpha_state));
      break;
    }
  }
  return out;
}

}  // namespace semirng
