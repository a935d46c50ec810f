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

#include "semirng/ctc.h"

#include <cmath>
#include <span>
#include <string>

#include "semirng/errors.h"
#include "semirng/semiring_kernels.h"

namespace semirng {

namespace {

constexpr double kNormTolerance = 1e-9;

void check_vocab(const FrameLogProbs& logits, const LabelSequence& labels) {
  validate_labels(labels, logits.vocab());
}

void require_normalized(const FrameLogProbs& logits, const char* what) {
  if (!logits.normalized()) {
    throw UnsupportedError(std::string(what) +
                           " requires normalized log-probabilities");
  }
}

}  // namespace

void validate_labels(const LabelSequence& labels, std::size_t vocab_size) {
  if (labels.tokens.empty()) throw UsageError("label sequence is empty");
  if (labels.blank_id < 0 ||
      static_cast<std::size_t>(labels.blank_id) >= vocab_size) {
    throw UsageError("blank id " + std::to_string(labels.blank_id) +
                     " outside vocabulary of size " +
                     std::to_string(vocab_size));
  }
  for (int tok : labels.tokens) {
    if (tok < 0 || static_cast<std::size_t>(tok) >= vocab_size) {
      throw UsageError("label " + std::to_string(tok) +
                       " outside vocabulary of size " +
                       std::to_string(vocab_size));
    }
    if (tok == labels.blank_id) {
      throw UsageError("label sequence contains the blank id");
    }
  }
}

FrameLogProbs::FrameLogProbs(std::size_t frames, std::size_t vocab,
                             std::vector<double> data, bool normalized)
    : frames_(frames), vocab_(vocab), data_(std::move(data)),
      normalized_(normalized) {
  if (frames_ == 0 || vocab_ == 0) {
    throw UsageError("frame log-probabilities need T >= 1 and V >= 1");
  }
  if (data_.size() != frames_ * vocab_) {
    throw UsageError("logits hold " + std::to_string(data_.size()) +
                     " values, expected T*V = " +
                     std::to_string(frames_ * vocab_));
  }
  if (!normalized_) return;
  for (std::size_t t = 0; t < frames_; ++t) {
    std::span<const double> row(data_.data() + t * vocab_, vocab_);
    const double lse = kernels::log_sum_exp(row);
    if (!(std::abs(lse) <= kNormTolerance)) {
      throw DomainError("frame " + std::to_string(t) +
                        " is not normalized (logsumexp = " +
                        std::to_string(lse) + ")");
    }
  }
}

CtcLattice build_ctc_lattice(std::size_t frames, const LabelSequence& labels,
                             std::size_t vocab_size) {
  if (frames == 0) throw UsageError("CTC needs T >= 1");
  validate_labels(labels, vocab_size);

  CtcLattice out;
  out.frames = frames;
  out.vocab = vocab_size;
  out.expanded.push_back(labels.blank_id);
  for (int tok : labels.tokens) {
    out.expanded.push_back(tok);
    out.expanded.push_back(labels.blank_id);
  }
  const std::size_t S = out.expanded.size();
  const auto& ex = out.expanded;

  // Targets reachable from (t, s) in one frame, in ascending order.
  auto successors = [&](std::size_t s, auto&& visit) {
    visit(s);
    if (s + 1 < S) visit(s + 1);
    if (s + 2 < S && ex[s + 2] != labels.blank_id && ex[s + 2] != ex[s]) {
      visit(s + 2);
    }
  };

  // Reachability from the roots and to the leaves over the full grid.
  std::vector<char> fwd(frames * S, 0), bwd(frames * S, 0);
  fwd[0] = 1;
  if (S > 1) fwd[1] = 1;
  for (std::size_t t = 0; t + 1 < frames; ++t) {
    for (std::size_t s = 0; s < S; ++s) {
      if (!fwd[t * S + s]) continue;
      successors(s, [&](std::size_t d) { fwd[(t + 1) * S + d] = 1; });
    }
  }
  bwd[(frames - 1) * S + S - 1] = 1;
  bwd[(frames - 1) * S + S - 2] = 1;
  for (std::size_t t = frames - 1; t-- > 0;) {
    for (std::size_t s = 0; s < S; ++s) {
      successors(s, [&](std::size_t d) {
        if (bwd[(t + 1) * S + d]) bwd[t * S + s] = 1;
      });
    }
  }

  out.vertex_of.assign(frames * S, -1);
  VertexId next = 0;
  for (std::size_t i = 0; i < frames * S; ++i) {
    if (fwd[i] && bwd[i]) out.vertex_of[i] = next++;
  }
  Lattice& lat = out.lattice;
  lat.vertex_count = next;
  for (std::size_t s = 0; s < 2 && s < S; ++s) {
    const VertexId v = out.vertex_of[s];
    if (v < 0) continue;
    lat.roots.push_back(v);
    lat.entries.push_back({v, static_cast<std::size_t>(ex[s])});
  }
  for (std::size_t s = S - 2; s < S; ++s) {
    const VertexId v = out.vertex_of[(frames - 1) * S + s];
    if (v >= 0) lat.leaves.push_back(v);
  }
  for (std::size_t t = 0; t + 1 < frames; ++t) {
    for (std::size_t s = 0; s < S; ++s) {
      const VertexId src = out.vertex_of[t * S + s];
      if (src < 0) continue;
      successors(s, [&](std::size_t d) {
        const VertexId dst = out.vertex_of[(t + 1) * S + d];
        if (dst < 0) return;
        lat.edges.push_back(
            {src, dst, (t + 1) * vocab_size + static_cast<std::size_t>(ex[d])});
      });
    }
  }
  return out;
}

double ctc_nll(const FrameLogProbs& logits, const LabelSequence& labels) {
  check_vocab(logits, labels);
  const CtcLattice ctc =
      build_ctc_lattice(logits.frames(), labels, logits.vocab());
  const auto w = lift_table(SemiringId::kLog, logits.data());
  return -compute(ctc.lattice, w, SemiringId::kLog).total[0];
}

std::vector<double> ctc_nll_gradient(const FrameLogProbs& logits,
                                     const LabelSequence& labels) {
  check_vocab(logits, labels);
  const CtcLattice ctc =
      build_ctc_lattice(logits.frames(), labels, logits.vocab());
  std::vector<double> g =
      gradient_dense(ctc.lattice, logits.data(), {}, SemiringId::kLog, 0);
  for (double& x : g) x = -x;
  return g;
}

double ctc_alignment_entropy(const FrameLogProbs& logits,
                             const LabelSequence& labels) {
  require_normalized(logits, "alignment entropy");
  check_vocab(logits, labels);
  const CtcLattice ctc =
      build_ctc_lattice(logits.frames(), labels, logits.vocab());
  const auto w = lift_table(SemiringId::kLogEntropy, logits.data());
  return std::exp(compute(ctc.lattice, w, SemiringId::kLogEntropy).total[1]);
}

Matrix ctc_state_posteriors(const FrameLogProbs& logits,
                            const LabelSequence& labels) {
  check_vocab(logits, labels);
  const CtcLattice ctc =
      build_ctc_lattice(logits.frames(), labels, logits.vocab());
  const auto w = lift_table(SemiringId::kLog, logits.data());
  ComputeOptions opts;
  opts.want_tables = true;
  const ComputeResult r = compute(ctc.lattice, w, SemiringId::kLog, opts);
  const double log_z = r.total[0];
  if (log_z == kernels::kNegInf) {
    throw InfeasibleError("infeasible alignment: P(y|x) = 0");
  }
  Matrix post(ctc.frames, ctc.states());
  for (std::size_t t = 0; t < ctc.frames; ++t) {
    for (std::size_t s = 0; s < ctc.states(); ++s) {
      const VertexId v = ctc.vertex(t, s);
      if (v < 0) continue;
      const double a = (*r.forward)[v][0];
      const double b = (*r.backward)[v][0];
      post(t, s) = std::exp(kernels::log_mul(a, b) - log_z);
    }
  }
  return post;
}

std::uint64_t ctc_alignment_count(std::size_t frames,
                                  const LabelSequence& labels,
                                  std::size_t vocab_size) {
  const CtcLattice ctc = build_ctc_lattice(frames, labels, vocab_size);
  const std::vector<SemiringValue> w(frames * vocab_size,
                                     SemiringValue::counting(1));
  return compute(ctc.lattice, w, SemiringId::kCounting).total.count;
}

SequenceKl sequence_kl_from_total(const SemiringValue& total,
                                  const OpCount& ops) {
  if (total.semiring != SemiringId::kLogReverseKl) {
    throw UsageError("sequence KL needs a log-reverse-kl total");
  }
  SequenceKl out;
  out.total = total;
  out.ops = ops;
  out.student_nll = -total[0];
  out.teacher_nll = -total[1];
  const double teacher_entropy = std::exp(total[2]);
  const double cross = std::exp(total[3]);
  out.teacher_neg_entropy = -teacher_entropy;
  out.cross_term = cross;
  out.kl_seq = cross - teacher_entropy;
  return out;
}

SequenceKl ctc_kl_seq(const FrameLogProbs& teacher, const FrameLogProbs& student,
                      const LabelSequence& labels) {
  if (teacher.frames() != student.frames() || teacher.vocab() != student.vocab()) {
    throw UsageError("teacher and student logits differ in shape");
  }
  require_normalized(teacher, "sequence KL");
  require_normalized(student, "sequence KL");
  check_vocab(student, labels);
  const CtcLattice ctc =
      build_ctc_lattice(student.frames(), labels, student.vocab());
  const auto w =
      lift_table(SemiringId::kLogReverseKl, student.data(), teacher.data());
  ComputeOptions opts;
  opts.want_ops = true;
  const ComputeResult r = compute(ctc.lattice, w, SemiringId::kLogReverseKl, opts);
  return sequence_kl_from_total(r.total, *r.ops);
}

}  // namespace semirng
