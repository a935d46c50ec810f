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

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "semirng/errors.h"
#include "semirng/losses.h"
#include "semirng/oracle.h"
#include "loss_oracle.h"
#include "test_util.h"

namespace semirng {
namespace {

using testing::rel_close;
using testing::oracle_loss;
using testing::Quad;
constexpr double kInf = std::numeric_limits<double>::infinity();

FrameLogProbs uniform(std::size_t T, std::size_t V) {
  return FrameLogProbs(T, V, std::vector<double>(T * V, -std::log(static_cast<double>(V))));
}

struct Models {
  FrameLogProbs student;
  FrameLogProbs teacher;
  LabelSequence labels;
};

Models random_ctc(std::mt19937_64& rng, std::size_t T, std::size_t U, std::size_t V) {
  LabelSequence labels = testing::random_labels(rng, U, V);
  return {FrameLogProbs(T, V, testing::random_log_rows(rng, T, V)),
          FrameLogProbs(T, V, testing::random_log_rows(rng, T, V)), labels};
}

struct RnntModels {
  std::vector<double> student_joint;
  std::vector<double> teacher_joint;
  RnntGridLogProbs student;
  RnntGridLogProbs teacher;
  std::size_t vocab;
};

RnntModels random_rnnt(std::mt19937_64& rng, std::size_t T, std::size_t U) {
  const std::size_t V = 3;
  const LabelSequence labels = testing::random_labels(rng, U, V);
  auto s = testing::random_log_rows(rng, (T + 1) * (U + 1), V);
  auto t = testing::random_log_rows(rng, (T + 1) * (U + 1), V);
  auto gs = RnntGridLogProbs::from_joint(s, T, labels, V);
  auto gt = RnntGridLogProbs::from_joint(t, T, labels, V);
  return {s, t, gs, gt, V};
}

// Checks loss_gradient against central differences on every joint entry.
int check_gradient(const AlignmentProblem& p, LossKind kind, const LossConfig& cfg) {
  const auto paths = enumerate_paths(p.lattice, p.student, p.teacher);
  const LossGradient g = loss_gradient(p, kind, cfg);
  EXPECT_EQ(g.student.size(), p.student_joint.size());
  for (double x : g.teacher) EXPECT_EQ(x, 0.0);
  int checked = 0;
  for (std::size_t i = 0; i < g.student.size(); ++i) {
    const double fd = central_difference([&](Quad h) {
      std::vector<Quad> joint(p.student_joint.begin(), p.student_joint.end());
      joint[i] += h;
      return oracle_loss(p, paths, joint, kind, cfg);
    });
    if (std::abs(g.student[i]) <= 1e-8 && std::abs(fd) <= 1e-8) continue;
    ++checked;
    EXPECT_TRUE(rel_close(g.student[i], fd, 1e-5, 1e-8))
        << "entry " << i << ": " << g.student[i] << " vs " << fd;
  }
  return checked;
}

TEST(LossesTest, EntropyRegularizedExample) {
  const auto p = make_ctc_problem(uniform(2, 3), LabelSequence{{1}, 0});
  LossConfig cfg;
  cfg.alpha_ent = 0.01;
  const LossReport r = entropy_regularized_loss(p, cfg);
  EXPECT_NEAR(r.nll, std::log(3.0), 1e-15);
  EXPECT_NEAR(*r.entropy, 2.0 / 3.0 * std::log(3.0), 1e-15);
  EXPECT_NEAR(r.total, std::log(3.0) - 0.01 * 2.0 / 3.0 * std::log(3.0), 1e-15);
  EXPECT_NEAR(r.total, 1.0912882067, 1e-10);
  EXPECT_EQ(r.ops.traversals, 1);
}

TEST(LossesTest, KlStateExamples) {
  const std::vector<double> q = {0.0, -kInf};
  const std::vector<double> p = {std::log(0.5), std::log(0.5)};
  EXPECT_NEAR(kl_state(q, p), std::log(2.0), 1e-15);
  EXPECT_EQ(kl_state(p, p), 0.0);
  EXPECT_EQ(kl_state(p, q), kInf);
  EXPECT_THROW(kl_state(p, std::vector<double>{0.0}), UsageError);
  EXPECT_THROW(kl_state(std::vector<double>{0.1}, std::vector<double>{0.0}), DomainError);
}

TEST(LossesTest, KlStateIsNonnegative) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t rows = testing::uniform_size(rng, 1, 8);
    const std::size_t V = testing::uniform_size(rng, 2, 6);
    const auto q = testing::random_log_rows(rng, rows, V, -10.0);
    const auto p = testing::random_log_rows(rng, rows, V, -10.0);
    const double kl = kl_state(q, p);
    ASSERT_GE(kl, -1e-12);
    const double oracle = oracle_kl_state<double>(q, p);
    ASSERT_TRUE(rel_close(kl, oracle, 1e-9, 1e-13));
  }
}

TEST(LossesTest, TotalsRecompose) {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t T = testing::uniform_size(rng, 3, 8);
    const Models m = random_ctc(rng, T, 2, 4);
    const auto p = make_ctc_problem(m.student, m.labels, &m.teacher);
    LossConfig cfg;
    cfg.alpha_ent = 0.3;
    cfg.alpha_state = 0.2;
    cfg.alpha_seq = 0.7;
    const LossReport e = entropy_regularized_loss(p, cfg);
    EXPECT_EQ(e.total, e.nll - 0.3 * *e.entropy);
    const LossReport s = soft_distillation_loss(p, cfg);
    EXPECT_EQ(s.total, s.nll + 0.2 * *s.kl_state);
    const LossReport d = semiring_distillation_loss(p, cfg);
    EXPECT_EQ(d.total, d.nll + 0.2 * *d.kl_state + 0.7 * *d.kl_seq);
    EXPECT_EQ(d.nll, ctc_nll(m.student, m.labels));
    EXPECT_EQ(*d.kl_seq, *d.cross_term + *d.teacher_entropy_term);
    EXPECT_GE(*d.cross_term, 0.0);
    EXPECT_EQ(d.ops.traversals, 1);
  }
}

TEST(LossesTest, ZeroWeightsReduceToNll) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    const Models m = random_ctc(rng, 5, 2, 3);
    const auto p = make_ctc_problem(m.student, m.labels, &m.teacher);
    const LossConfig zero;
    const double nll = ctc_nll(m.student, m.labels);
    EXPECT_EQ(entropy_regularized_loss(p, zero).total, nll);
    EXPECT_EQ(soft_distillation_loss(p, zero).total, nll);
    EXPECT_EQ(semiring_distillation_loss(p, zero).total, nll);
  }
}

TEST(LossesTest, InfeasibleProblem) {
  const auto p = make_ctc_problem(uniform(2, 3), LabelSequence{{1, 1}, 0});
  LossConfig cfg;
  cfg.alpha_ent = 0.5;
  const LossReport r = entropy_regularized_loss(p, cfg);
  EXPECT_EQ(r.nll, kInf);
  EXPECT_EQ(*r.entropy, 0.0);
  EXPECT_EQ(r.total, kInf);
}

TEST(LossesTest, ConfigValidation) {
  const Models m = [] {
    std::mt19937_64 rng(24);
    return random_ctc(rng, 4, 1, 3);
  }();
  const auto no_teacher = make_ctc_problem(m.student, m.labels);
  LossConfig bad;
  bad.alpha_ent = -0.1;
  EXPECT_THROW(entropy_regularized_loss(no_teacher, bad), UsageError);
  bad.alpha_ent = std::nan("");
  EXPECT_THROW(validate(bad), UsageError);
  bad = {};
  bad.alpha_distill = kInf;
  EXPECT_THROW(validate(bad), UsageError);
  EXPECT_THROW(soft_distillation_loss(no_teacher, {}), UsageError);
  EXPECT_THROW(semiring_distillation_loss(no_teacher, {}), UsageError);
  const FrameLogProbs other = uniform(4, 4);
  EXPECT_THROW(make_ctc_problem(m.student, m.labels, &other), UsageError);
}

TEST(LossesTest, RnntLossesMatchOracle) {
  std::mt19937_64 rng(25);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t T = testing::uniform_size(rng, 1, 4);
    const std::size_t U = testing::uniform_size(rng, 0, 3);
    const RnntModels m = random_rnnt(rng, T, U);
    const auto p = make_rnnt_problem(m.student, &m.teacher, m.student_joint,
                                     m.teacher_joint, m.vocab, false);
    const auto paths = enumerate_paths(p.lattice, p.student, p.teacher);
    const auto q = oracle_quantities(paths);
    LossConfig cfg;
    cfg.alpha_state = 0.5;
    cfg.alpha_seq = 0.25;
    cfg.alpha_ent = 0.1;
    const LossReport d = semiring_distillation_loss(p, cfg);
    ASSERT_TRUE(rel_close(d.nll, -std::log(q.likelihood), 1e-9));
    ASSERT_TRUE(rel_close(*d.kl_seq, q.kl, 1e-9, 1e-14));
    ASSERT_TRUE(rel_close(*d.kl_state,
                          oracle_kl_state<double>(m.teacher_joint, m.student_joint), 1e-9));
    const LossReport e = entropy_regularized_loss(p, cfg);
    ASSERT_TRUE(rel_close(*e.entropy, q.entropy, 1e-9, 1e-15));
  }
}

TEST(LossesTest, CtcGradientsMatchFiniteDifferences) {
  std::mt19937_64 rng(26);
  LossConfig cfg;
  cfg.alpha_ent = 0.3;
  cfg.alpha_state = 0.4;
  cfg.alpha_seq = 0.6;
  int checked = 0;
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t T = testing::uniform_size(rng, 2, 5);
    const std::size_t U = testing::uniform_size(rng, 1, 2);
    const Models m = random_ctc(rng, T, U, 3);
    const auto p = make_ctc_problem(m.student, m.labels, &m.teacher);
    if (p.lattice.vertex_count == 0) continue;
    for (LossKind kind : {LossKind::kNll, LossKind::kEntropyRegularized,
                          LossKind::kSoftDistillation, LossKind::kSemiringDistillation}) {
      checked += check_gradient(p, kind, cfg);
    }
  }
  EXPECT_GT(checked, 500);
}

TEST(LossesTest, RnntGradientsMatchFiniteDifferences) {
  std::mt19937_64 rng(27);
  LossConfig cfg;
  cfg.alpha_ent = 0.2;
  cfg.alpha_state = 0.3;
  cfg.alpha_seq = 0.8;
  int checked = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t T = testing::uniform_size(rng, 1, 3);
    const std::size_t U = testing::uniform_size(rng, 0, 2);
    const RnntModels m = random_rnnt(rng, T, U);
    for (bool final_blank : {false, true}) {
      const auto p = make_rnnt_problem(m.student, &m.teacher, m.student_joint,
                                       m.teacher_joint, m.vocab, final_blank);
      for (LossKind kind : {LossKind::kNll, LossKind::kEntropyRegularized,
                            LossKind::kSoftDistillation, LossKind::kSemiringDistillation}) {
        checked += check_gradient(p, kind, cfg);
      }
    }
  }
  EXPECT_GT(checked, 500);
}

TEST(LossesTest, TeacherGradientIsZero) {
  std::mt19937_64 rng(28);
  const Models m = random_ctc(rng, 6, 2, 4);
  const auto p = make_ctc_problem(m.student, m.labels, &m.teacher);
  LossConfig cfg;
  cfg.alpha_state = 1.0;
  cfg.alpha_seq = 1.0;
  for (LossKind kind : {LossKind::kSoftDistillation, LossKind::kSemiringDistillation}) {
    const LossGradient g = loss_gradient(p, kind, cfg);
    ASSERT_EQ(g.teacher.size(), m.teacher.data().size());
    for (double x : g.teacher) EXPECT_EQ(x, 0.0);
  }
}

}  // namespace
}  // namespace semirng
