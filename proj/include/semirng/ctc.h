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

// CTC alignment lattice.
//
// States s = 0..2U index the blank-expanded label sequence
// eps y1 eps y2 ... yU eps. Frame t (0-based here) and state s form vertex
// (t, s). Every edge into (t, s) is weighted by the emission
// logits[t][expanded[s]]; the frame-0 roots carry their own emission as an
// entry weight. Weight refs index the row-major T x V logits table.

#ifndef SEMIRNG_CTC_H_
#define SEMIRNG_CTC_H_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "semirng/engine.h"
#include "semirng/lattice.h"
#include "semirng/matrix.h"

namespace semirng {

struct LabelSequence {
  std::vector<int> tokens;
  int blank_id = 0;
};

// Throws UsageError unless U >= 1, no token is blank and all ids < vocab.
void validate_labels(const LabelSequence& labels, std::size_t vocab_size);

// T x V per-frame log-probabilities. Rows must log-sum-exp to 0 within 1e-9
// unless constructed as unnormalized, which disables entropy and KL.
class FrameLogProbs {
 public:
  FrameLogProbs(std::size_t frames, std::size_t vocab, std::vector<double> data,
                bool normalized = true);

  std::size_t frames() const { return frames_; }
  std::size_t vocab() const { return vocab_; }
  bool normalized() const { return normalized_; }
  const std::vector<double>& data() const { return data_; }
  double at(std::size_t t, std::size_t v) const { return data_[t * vocab_ + v]; }

 private:
  std::size_t frames_;
  std::size_t vocab_;
  std::vector<double> data_;
  bool normalized_;
};

struct CtcLattice {
  Lattice lattice;
  std::size_t frames = 0;
  std::size_t vocab = 0;
  std::vector<int> expanded;          // 2U+1 symbols
  std::vector<VertexId> vertex_of;    // frames x (2U+1); -1 when pruned

  std::size_t states() const { return expanded.size(); }
  VertexId vertex(std::size_t t, std::size_t s) const {
    return vertex_of[t * states() + s];
  }
};

// Only vertices on some root-to-leaf path are kept. When T is shorter than
// the minimum alignment length the lattice is empty and every likelihood is
// zero.
CtcLattice build_ctc_lattice(std::size_t frames, const LabelSequence& labels,
                             std::size_t vocab_size);

// -log P(y|x); +inf when no alignment exists.
double ctc_nll(const FrameLogProbs& logits, const LabelSequence& labels);

// d ctc_nll / d logits, dense T x V. Zero when infeasible.
std::vector<double> ctc_nll_gradient(const FrameLogProbs& logits,
                                     const LabelSequence& labels);

// H = -sum_pi P(pi) log P(pi) over unnormalized path probabilities.
double ctc_alignment_entropy(const FrameLogProbs& logits,
                             const LabelSequence& labels);

// posterior(t, s) = exp(alpha + beta - log P(y|x)). Throws InfeasibleError
// when P(y|x) = 0.
Matrix ctc_state_posteriors(const FrameLogProbs& logits,
                            const LabelSequence& labels);

// Exact number of alignments; OverflowError above 2^63 - 1.
std::uint64_t ctc_alignment_count(std::size_t frames,
                                  const LabelSequence& labels,
                                  std::size_t vocab_size);

// Components of one log-reverse-KL pass.
struct SequenceKl {
  double kl_seq = 0.0;               // sum_pi q log(q / p)
  double student_nll = 0.0;          // -log sum_pi p
  double teacher_nll = 0.0;          // -log sum_pi q
  double teacher_neg_entropy = 0.0;  // sum_pi q log q
  double cross_term = 0.0;           // -sum_pi q log p
  SemiringValue total;
  OpCount ops;
};

// Builds SequenceKl from a log-reverse-KL total.
SequenceKl sequence_kl_from_total(const SemiringValue& total, const OpCount& ops);

SequenceKl ctc_kl_seq(const FrameLogProbs& teacher, const FrameLogProbs& student,
                      const LabelSequence& labels);

}  // namespace semirng

#endif  // SEMIRNG_CTC_H_
