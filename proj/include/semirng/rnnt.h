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

// RNN-T alignment grid.
//
// Vertex (t, u), t in 0..T, u in 0..U, has id t * (U + 1) + u. Blank edges
// (t, u) -> (t + 1, u) carry blank(t, u); label edges (t, u) -> (t, u + 1)
// carry label(t, u). Root (0, 0), leaf (T, U). There are C(T + U, U)
// alignments and 2TU + T + U edges.
//
// With a mandatory final blank the row t = T is replaced by a single
// terminal vertex, id T * (U + 1), entered only from (T - 1, U) by
// blank(T - 1, U); there are then C(T - 1 + U, U) alignments.

#ifndef SEMIRNG_RNNT_H_
#define SEMIRNG_RNNT_H_

#include <cstddef>
#include <span>
#include <vector>

#include "semirng/ctc.h"
#include "semirng/engine.h"
#include "semirng/lattice.h"

namespace semirng {

// Blank and label log-probabilities on the grid, stored in one weight table:
// blank(t, u) for t < T, u <= U at index t * (U + 1) + u, followed by
// label(t, u) for t <= T, u < U at T * (U + 1) + t * U + u.
class RnntGridLogProbs {
 public:
  RnntGridLogProbs(std::size_t frames, std::size_t label_count);

  // Slices a (T + 1) x (U + 1) x V joint tensor. When `normalized` is set
  // each (t, u) row must log-sum-exp to 0 within 1e-9.
  static RnntGridLogProbs from_joint(std::span<const double> joint,
                                     std::size_t frames,
                                     const LabelSequence& labels,
                                     std::size_t vocab, bool normalized = true);

  // Pre-sliced grids: blank is T x (U + 1), label is (T + 1) x U, row-major.
  // `normalized` is the caller's attestation; it is not checkable here.
  static RnntGridLogProbs from_slices(std::size_t frames,
                                      std::size_t label_count,
                                      std::span<const double> blank,
                                      std::span<const double> label,
                                      bool normalized);

  std::size_t frames() const { return frames_; }
  std::size_t label_count() const { return labels_; }
  bool normalized() const { return normalized_; }

  std::size_t blank_ref(std::size_t t, std::size_t u) const {
    return t * (labels_ + 1) + u;
  }
  std::size_t label_ref(std::size_t t, std::size_t u) const {
    return frames_ * (labels_ + 1) + t * labels_ + u;
  }
  double blank(std::size_t t, std::size_t u) const { return weights_[blank_ref(t, u)]; }
  double label(std::size_t t, std::size_t u) const { return weights_[label_ref(t, u)]; }
  double& blank(std::size_t t, std::size_t u) { return weights_[blank_ref(t, u)]; }
  double& label(std::size_t t, std::size_t u) { return weights_[label_ref(t, u)]; }

  const std::vector<double>& weights() const { return weights_; }
  std::vector<double>& weights() { return weights_; }

  // For grids built by from_joint: weight index -> joint index.
  const std::vector<std::size_t>& joint_index() const { return joint_index_; }

 private:
  std::size_t frames_;
  std::size_t labels_;
  bool normalized_ = true;
  std::vector<double> weights_;
  std::vector<std::size_t> joint_index_;
};

struct RnntLattice {
  Lattice lattice;
  std::size_t frames = 0;
  std::size_t label_count = 0;
  bool final_blank = false;

  VertexId vertex(std::size_t t, std::size_t u) const {
    return static_cast<VertexId>(t * (label_count + 1) + u);
  }
};

RnntLattice build_rnnt_lattice(std::size_t frames, std::size_t label_count,
                               bool require_final_blank = false);

struct RnntOptions {
  bool require_final_blank = false;
  int threads = 0;  // wavefront workers; 0 or 1 is sequential
};

double rnnt_nll(const RnntGridLogProbs& grid, const RnntOptions& opts = {});

double rnnt_alignment_entropy(const RnntGridLogProbs& grid,
                              const RnntOptions& opts = {});

// One log-reverse-KL pass: kl_seq, student NLL and teacher entropy together.
SequenceKl rnnt_kl_seq(const RnntGridLogProbs& teacher,
                       const RnntGridLogProbs& student,
                       const RnntOptions& opts = {});

// Anti-diagonals d = t + u for d = 0..T+U, each ordered by ascending t.
// Every edge into a vertex of group d starts in group d - 1.
Schedule wavefront_schedule(std::size_t frames, std::size_t label_count);

// Evaluates `s` over the grid under the wavefront schedule.
ComputeResult rnnt_compute(const RnntGridLogProbs& grid, SemiringId s,
                           const RnntOptions& opts, bool want_ops,
                           const RnntGridLogProbs* teacher = nullptr);

}  // namespace semirng

#endif  // SEMIRNG_RNNT_H_
