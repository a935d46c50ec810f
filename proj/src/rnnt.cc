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

#include "semirng/rnnt.h"

#include <cmath>
#include <string>

#include "semirng/errors.h"
#include "semirng/semiring_kernels.h"

namespace semirng {

RnntGridLogProbs::RnntGridLogProbs(std::size_t frames, std::size_t label_count)
    : frames_(frames), labels_(label_count) {
  if (frames_ == 0) throw UsageError("RNN-T needs T >= 1");
  weights_.assign(frames_ * (labels_ + 1) + (frames_ + 1) * labels_, 0.0);
}

RnntGridLogProbs RnntGridLogProbs::from_joint(std::span<const double> joint,
                                              std::size_t frames,
                                              const LabelSequence& labels,
                                              std::size_t vocab,
                                              bool normalized) {
  const std::size_t U = labels.tokens.size();
  if (vocab == 0) throw UsageError("vocabulary is empty");
  if (joint.size() != (frames + 1) * (U + 1) * vocab) {
    throw UsageError("joint tensor holds " + std::to_string(joint.size()) +
                     " values, expected (T+1)*(U+1)*V = " +
                     std::to_string((frames + 1) * (U + 1) * vocab));
  }
  if (labels.blank_id < 0 || static_cast<std::size_t>(labels.blank_id) >= vocab) {
    throw UsageError("blank id outside vocabulary");
  }
  for (int tok : labels.tokens) {
    if (tok < 0 || static_cast<std::size_t>(tok) >= vocab || tok == labels.blank_id) {
      throw UsageError("label " + std::to_string(tok) +
                       " is the blank or outside the vocabulary");
    }
  }
  RnntGridLogProbs grid(frames, U);
  grid.normalized_ = normalized;
  auto row = [&](std::size_t t, std::size_t u) {
    return (t * (U + 1) + u) * vocab;
  };
  if (normalized) {
    for (std::size_t t = 0; t <= frames; ++t) {
      for (std::size_t u = 0; u <= U; ++u) {
        const double lse = kernels::log_sum_exp(joint.subspan(row(t, u), vocab));
        if (!(std::abs(lse) <= 1e-9)) {
          throw DomainError("joint row (" + std::to_string(t) + ", " +
                            std::to_string(u) + ") is not normalized");
        }
      }
    }
  }
  grid.joint_index_.assign(grid.weights_.size(), 0);
  for (std::size_t t = 0; t < frames; ++t) {
    for (std::size_t u = 0; u <= U; ++u) {
      const std::size_t j = row(t, u) + static_cast<std::size_t>(labels.blank_id);
      grid.weights_[grid.blank_ref(t, u)] = joint[j];
      grid.joint_index_[grid.blank_ref(t, u)] = j;
    }
  }
  for (std::size_t t = 0; t <= frames; ++t) {
    for (std::size_t u = 0; u < U; ++u) {
      const std::size_t j = row(t, u) + static_cast<std::size_t>(labels.tokens[u]);
      grid.weights_[grid.label_ref(t, u)] = joint[j];
      grid.joint_index_[grid.label_ref(t, u)] = j;
    }
  }
  return grid;
}

RnntGridLogProbs RnntGridLogProbs::from_slices(std::size_t frames,
                                               std::size_t label_count,
                                               std::span<const double> blank,
                                               std::span<const double> label,
                                               bool normalized) {
  RnntGridLogProbs grid(frames, label_count);
  if (blank.size() != frames * (label_count + 1) ||
      label.size() != (frames + 1) * label_count) {
    throw UsageError("blank must be T x (U+1) and label (T+1) x U");
  }
  grid.normalized_ = normalized;
  std::copy(blank.begin(), blank.end(), grid.weights_.begin());
  std::copy(label.begin(), label.end(),
            grid.weights_.begin() + static_cast<std::ptrdiff_t>(blank.size()));
  return grid;
}

RnntLattice build_rnnt_lattice(std::size_t frames, std::size_t label_count,
                               bool require_final_blank) {
  if (frames == 0) throw UsageError("RNN-T needs T >= 1");
  RnntLattice out;
  out.frames = frames;
  out.label_count = label_count;
  out.final_blank = require_final_blank;
  const std::size_t T = frames, U = label_count;
  const std::size_t width = U + 1;
  Lattice& lat = out.lattice;
  auto blank_ref = [&](std::size_t t, std::size_t u) { return t * width + u; };
  auto label_ref = [&](std::size_t t, std::size_t u) {
    return T * width + t * U + u;
  };
  // Rows that carry grid vertices: 0..T, or 0..T-1 plus the terminal.
  const std::size_t last_row = require_final_blank ? T - 1 : T;
  lat.vertex_count = static_cast<VertexId>((last_row + 1) * width +
                                           (require_final_blank ? 1 : 0));
  for (std::size_t t = 0; t <= last_row; ++t) {
    for (std::size_t u = 0; u <= U; ++u) {
      const auto v = out.vertex(t, u);
      if (u < U) lat.edges.push_back({v, out.vertex(t, u + 1), label_ref(t, u)});
      if (t < last_row) lat.edges.push_back({v, out.vertex(t + 1, u), blank_ref(t, u)});
    }
  }
  lat.roots = {0};
  if (require_final_blank) {
    const auto terminal = static_cast<VertexId>(T * width);
    lat.edges.push_back({out.vertex(T - 1, U), terminal, blank_ref(T - 1, U)});
    lat.leaves = {terminal};
  } else {
    lat.leaves = {out.vertex(T, U)};
  }
  return out;
}

Schedule wavefront_schedule(std::size_t frames, std::size_t label_count) {
  const std::size_t width = label_count + 1;
  Schedule groups(frames + label_count + 1);
  for (std::size_t d = 0; d < groups.size(); ++d) {
    const std::size_t t_lo = d > label_count ? d - label_count : 0;
    const std::size_t t_hi = std::min(d, frames);
    for (std::size_t t = t_lo; t <= t_hi; ++t) {
      groups[d].push_back(static_cast<VertexId>(t * width + (d - t)));
    }
  }
  return groups;
}

ComputeResult rnnt_compute(const RnntGridLogProbs& grid, SemiringId s,
                           const RnntOptions& opts, bool want_ops,
                           const RnntGridLogProbs* teacher) {
  const RnntLattice lat = build_rnnt_lattice(grid.frames(), grid.label_count(),
                                             opts.require_final_blank);
  std::vector<SemiringValue> w;
  if (s == SemiringId::kLogReverseKl) {
    if (teacher == nullptr) throw UsageError("log-reverse-kl needs a teacher grid");
    if (teacher->frames() != grid.frames() ||
        teacher->label_count() != grid.label_count()) {
      throw UsageError("teacher and student grids differ in shape");
    }
    w = lift_table(s, grid.weights(), teacher->weights());
  } else {
    w = lift_table(s, grid.weights());
  }
  const Schedule schedule =
      opts.require_final_blank ? Schedule{}
                               : wavefront_schedule(grid.frames(), grid.label_count());
  ComputeOptions copts;
  copts.want_ops = want_ops;
  copts.threads = opts.threads;
  copts.schedule = schedule.empty() ? nullptr : &schedule;
  return compute(lat.lattice, w, s, copts);
}

double rnnt_nll(const RnntGridLogProbs& grid, const RnntOptions& opts) {
  return -rnnt_compute(grid, SemiringId::kLog, opts, false).total[0];
}

double rnnt_alignment_entropy(const RnntGridLogProbs& grid,
                              const RnntOptions& opts) {
  if (!grid.normalized()) {
    throw UnsupportedError("alignment entropy requires normalized log-probabilities");
  }
  return std::exp(rnnt_compute(grid, SemiringId::kLogEntropy, opts, false).total[1]);
}

SequenceKl rnnt_kl_seq(const RnntGridLogProbs& teacher,
                       const RnntGridLogProbs& student, const RnntOptions& opts) {
  if (!teacher.normalized() || !student.normalized()) {
    throw UnsupportedError("sequence KL requires normalized log-probabilities");
  }
  const ComputeResult r =
      rnnt_compute(student, SemiringId::kLogReverseKl, opts, true, &teacher);
  return sequence_kl_from_total(r.total, *r.ops);
}

}  // namespace semirng
