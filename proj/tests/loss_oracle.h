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

#ifndef SEMIRNG_TESTS_LOSS_ORACLE_H_
#define SEMIRNG_TESTS_LOSS_ORACLE_H_

#include <quadmath.h>

#include <vector>

#include "semirng/losses.h"
#include "semirng/oracle.h"

namespace semirng::testing {

using Quad = __float128;

// The loss evaluated by enumeration in quad precision, as a function of the
// student joint tensor.
inline Quad oracle_loss(const AlignmentProblem& p, const std::vector<AlignmentPath>& paths,
                 const std::vector<Quad>& joint, LossKind kind, const LossConfig& cfg) {
  std::vector<Quad> logp(p.student.size());
  for (std::size_t i = 0; i < logp.size(); ++i) logp[i] = joint[p.weight_to_joint[i]];
  const std::vector<Quad> teacher(p.teacher.begin(), p.teacher.end());
  const auto q = oracle_quantities<Quad>(paths, logp, teacher);
  const Quad nll = -logq(q.likelihood);
  std::vector<Quad> tj(p.teacher_joint.begin(), p.teacher_joint.end());
  switch (kind) {
    case LossKind::kNll:
      return nll;
    case LossKind::kEntropyRegularized:
      return nll - Quad(cfg.alpha_ent) * q.entropy;
    case LossKind::kSoftDistillation:
      return nll + Quad(cfg.alpha_state) * oracle_kl_state<Quad>(tj, joint);
    case LossKind::kSemiringDistillation:
      return nll + Quad(cfg.alpha_state) * oracle_kl_state<Quad>(tj, joint) +
             Quad(cfg.alpha_seq) * q.kl;
  }
  return 0;
}

}  // namespace semirng::testing

#endif  // SEMIRNG_TESTS_LOSS_ORACLE_H_
