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
#include <random>

#include "semirng/errors.h"
#include "semirng/oracle.h"
#include "semirng/rnnt.h"
#include "test_util.h"

namespace semirng {
namespace {

using testing::rel_close;

RnntGridLogProbs constant_grid(std::size_t T, std::size_t U, double logp) {
  RnntGridLogProbs g(T, U);
  for (double& x : g.weights()) x = logp;
  return g;
}

// Blank and label slices of a random joint over V = U + 2 symbols.
struct RandomJoint {
  std::vector<double> joint;
  LabelSequence labels;
  std::size_t vocab;
};

RandomJoint random_joint(std::mt19937_64& rng, std::size_t T, std::size_t U) {
  RandomJoint r;
  r.vocab = 3;
  r.labels = testing::random_labels(rng, U, r.vocab);
  r.joint = testing::random_log_rows(rng, (T + 1) * (U + 1), r.vocab);
  return r;
}

TEST(RnntTest, UniformGridTopology) {
  const RnntLattice lat = build_rnnt_lattice(4, 3);
  EXPECT_EQ(lat.lattice.edges.size(), 31u);
  EXPECT_EQ(enumerate_paths(lat.lattice, constant_grid(4, 3, -0.5).weights()).size(), 35u);
}

TEST(RnntTest, SmallPathCounts) {
  auto count = [](std::size_t T, std::size_t U) {
    const RnntLattice lat = build_rnnt_lattice(T, U);
    const std::vector<SemiringValue> w(constant_grid(T, U, 0.0).weights().size(),
                                       SemiringValue::counting(1));
    return compute(lat.lattice, w, SemiringId::kCounting).total.count;
  };
  EXPECT_EQ(count(1, 0), 1u);
  EXPECT_EQ(count(3, 2), 10u);
  for (std::size_t T = 1; T <= 10; ++T) {
    for (std::size_t U = 0; U <= 10; ++U) {
      ASSERT_EQ(count(T, U), binomial(T + U, U)) << T << "," << U;
      ASSERT_EQ(build_rnnt_lattice(T, U).lattice.edges.size(), 2 * T * U + T + U);
    }
  }
}

TEST(RnntTest, PathsHaveTBlanksAndULabels) {
  for (std::size_t T = 1; T <= 5; ++T) {
    for (std::size_t U = 0; U <= 3; ++U) {
      const RnntGridLogProbs g = constant_grid(T, U, -1.0);
      const auto paths = enumerate_paths(build_rnnt_lattice(T, U).lattice, g.weights());
      for (const auto& p : paths) {
        std::size_t blanks = 0;
        for (std::size_t r : p.refs) blanks += r < T * (U + 1);
        ASSERT_EQ(blanks, T);
        ASSERT_EQ(p.refs.size(), T + U);
      }
    }
  }
}

TEST(RnntTest, UniformGridValues) {
  const RnntGridLogProbs g = constant_grid(4, 3, std::log(0.5));
  EXPECT_NEAR(rnnt_nll(g), std::log(128.0 / 35.0), 1e-14);
  EXPECT_NEAR(rnnt_nll(g), 1.2966822, 1e-7);
  EXPECT_NEAR(rnnt_alignment_entropy(g), 35.0 / 128.0 * 7.0 * std::log(2.0), 1e-14);
}

TEST(RnntTest, EmptyTranscript) {
  RnntGridLogProbs g(3, 0);
  g.blank(0, 0) = std::log(0.2);
  g.blank(1, 0) = std::log(0.7);
  g.blank(2, 0) = std::log(0.9);
  EXPECT_NEAR(rnnt_nll(g), -(std::log(0.2) + std::log(0.7) + std::log(0.9)), 1e-15);
  EXPECT_EQ(rnnt_alignment_entropy(constant_grid(3, 0, 0.0)), 0.0);
}

TEST(RnntTest, UniformGridOpCounts) {
  const RnntGridLogProbs g = constant_grid(4, 3, std::log(0.5));
  for (SemiringId s : {SemiringId::kEntropy, SemiringId::kLogEntropy}) {
    const auto r = rnnt_compute(g, s, {}, true);
    EXPECT_EQ(r.ops->real_multiplications, 93) << name(s);
    EXPECT_EQ(r.ops->real_additions, 55) << name(s);
  }
  const NaiveOpCount naive = naive_op_count(4, 3);
  EXPECT_EQ(naive.multiplications, 280u);
  EXPECT_EQ(naive.additions, 34u);
}

TEST(RnntTest, WavefrontSchedule) {
  const Schedule s = wavefront_schedule(4, 3);
  const std::vector<std::size_t> sizes = {1, 2, 3, 4, 4, 3, 2, 1};
  ASSERT_EQ(s.size(), sizes.size());
  for (std::size_t d = 0; d < s.size(); ++d) EXPECT_EQ(s[d].size(), sizes[d]);
  EXPECT_EQ(wavefront_schedule(1, 0), (Schedule{{0}, {1}}));
}

TEST(RnntTest, WavefrontDependencies) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t T = testing::uniform_size(rng, 1, 8);
    const std::size_t U = testing::uniform_size(rng, 0, 8);
    const Schedule s = wavefront_schedule(T, U);
    const Lattice lat = build_rnnt_lattice(T, U).lattice;
    std::vector<int> group(lat.vertex_count, -1);
    std::size_t seen = 0;
    for (std::size_t d = 0; d < s.size(); ++d) {
      const std::size_t expect =
          std::min({d, T, U, T + U - d}) + 1;
      ASSERT_EQ(s[d].size(), expect);
      for (VertexId v : s[d]) {
        ASSERT_EQ(group[v], -1);
        group[v] = static_cast<int>(d);
        ++seen;
      }
    }
    ASSERT_EQ(seen, static_cast<std::size_t>(lat.vertex_count));
    for (const Edge& e : lat.edges) ASSERT_EQ(group[e.src] + 1, group[e.dst]);
  }
}

TEST(RnntTest, WavefrontIsBitIdentical) {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t T = testing::uniform_size(rng, 1, 30);
    const std::size_t U = testing::uniform_size(rng, 0, 20);
    RnntGridLogProbs p(T, U), q(T, U);
    p.weights() = testing::random_logp(rng, p.weights().size(), -3.0);
    q.weights() = testing::random_logp(rng, q.weights().size(), -3.0);
    for (SemiringId s : kAllSemirings) {
      RnntOptions par;
      par.threads = 3;
      const auto a = rnnt_compute(p, s, {}, true, &q);
      const auto b = rnnt_compute(p, s, par, true, &q);
      ASSERT_EQ(a.total, b.total) << name(s);
      ASSERT_EQ(*a.ops, *b.ops);
    }
  }
}

TEST(RnntTest, OracleEquivalence) {
  std::mt19937_64 rng(15);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t T = testing::uniform_size(rng, 1, 5);
    const std::size_t U = testing::uniform_size(rng, 0, 3);
    const RandomJoint s = random_joint(rng, T, U);
    RandomJoint t = s;
    t.joint = testing::random_log_rows(rng, (T + 1) * (U + 1), t.vocab);
    const auto student = RnntGridLogProbs::from_joint(s.joint, T, s.labels, s.vocab);
    const auto teacher = RnntGridLogProbs::from_joint(t.joint, T, t.labels, t.vocab);
    for (bool final_blank : {false, true}) {
      RnntOptions opts;
      opts.require_final_blank = final_blank;
      const Lattice lat = build_rnnt_lattice(T, U, final_blank).lattice;
      const auto paths = enumerate_paths(lat, student.weights(), teacher.weights());
      ASSERT_EQ(paths.size(), final_blank ? binomial(T - 1 + U, U) : binomial(T + U, U));
      const auto q = oracle_quantities(paths);
      ASSERT_TRUE(rel_close(rnnt_nll(student, opts), -std::log(q.likelihood), 1e-9));
      ASSERT_TRUE(rel_close(rnnt_alignment_entropy(student, opts), q.entropy, 1e-9));
      const SequenceKl kl = rnnt_kl_seq(teacher, student, opts);
      ASSERT_TRUE(rel_close(kl.kl_seq, q.kl, 1e-9, 1e-15));
      ASSERT_TRUE(rel_close(-kl.teacher_neg_entropy, q.teacher_entropy, 1e-9));
      ASSERT_EQ(kl.student_nll, rnnt_nll(student, opts));
      ASSERT_EQ(kl.teacher_nll, rnnt_nll(teacher, opts));
      ASSERT_GE(kl.cross_term, 0.0);
      ASSERT_GE(-kl.teacher_neg_entropy, 0.0);
    }
  }
}

TEST(RnntTest, FinalBlankEndsWithBlank) {
  const std::size_t T = 3, U = 2;
  const RnntGridLogProbs g = constant_grid(T, U, -1.0);
  const auto paths = enumerate_paths(build_rnnt_lattice(T, U, true).lattice, g.weights());
  for (const auto& p : paths) EXPECT_EQ(p.refs.back(), g.blank_ref(T - 1, U));
}

TEST(RnntTest, KlSeqIdenticalModelsIsZero) {
  std::mt19937_64 rng(16);
  for (int trial = 0; trial < 50; ++trial) {
    const RandomJoint s = random_joint(rng, 4, 2);
    const auto g = RnntGridLogProbs::from_joint(s.joint, 4, s.labels, s.vocab);
    EXPECT_NEAR(rnnt_kl_seq(g, g).kl_seq, 0.0, 1e-12);
  }
}

TEST(RnntTest, SingleTraversalForSequenceKl) {
  std::mt19937_64 rng(18);
  const RandomJoint s = random_joint(rng, 4, 3);
  const auto g = RnntGridLogProbs::from_joint(s.joint, 4, s.labels, s.vocab);
  const SequenceKl kl = rnnt_kl_seq(g, g);
  EXPECT_EQ(kl.ops.traversals, 1);
  EXPECT_EQ(kl.ops.real_multiplications, 31 * 6);
  EXPECT_EQ(kl.ops.real_additions, 31 * 2 + 12 * 4);
}

TEST(RnntTest, JointSlicing) {
  std::mt19937_64 rng(19);
  const std::size_t T = 2, U = 2;
  const RandomJoint s = random_joint(rng, T, U);
  const auto g = RnntGridLogProbs::from_joint(s.joint, T, s.labels, s.vocab);
  auto at = [&](std::size_t t, std::size_t u, int v) {
    return s.joint[(t * (U + 1) + u) * s.vocab + static_cast<std::size_t>(v)];
  };
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t u = 0; u <= U; ++u) EXPECT_EQ(g.blank(t, u), at(t, u, 0));
  }
  for (std::size_t t = 0; t <= T; ++t) {
    for (std::size_t u = 0; u < U; ++u) EXPECT_EQ(g.label(t, u), at(t, u, s.labels.tokens[u]));
  }
  for (std::size_t i = 0; i < g.weights().size(); ++i) {
    EXPECT_EQ(g.weights()[i], s.joint[g.joint_index()[i]]);
  }
}

TEST(RnntTest, InputValidation) {
  const LabelSequence labels{{1}, 0};
  EXPECT_THROW(RnntGridLogProbs::from_joint(std::vector<double>(5, -1.0), 1, labels, 2),
               UsageError);
  EXPECT_THROW(RnntGridLogProbs::from_joint(std::vector<double>(8, -0.1), 1, labels, 2),
               DomainError);
  EXPECT_NO_THROW(RnntGridLogProbs::from_joint(std::vector<double>(8, -0.1), 1, labels, 2,
                                               /*normalized=*/false));
  EXPECT_THROW(RnntGridLogProbs::from_slices(2, 1, std::vector<double>(3), std::vector<double>(3),
                                             true),
               UsageError);
  const auto raw = RnntGridLogProbs::from_slices(1, 1, std::vector<double>(2, -0.1),
                                                 std::vector<double>(2, -0.1), false);
  EXPECT_THROW(rnnt_alignment_entropy(raw), UnsupportedError);
  EXPECT_THROW(build_rnnt_lattice(0, 1), UsageError);
  EXPECT_THROW(rnnt_kl_seq(constant_grid(2, 1, -1.0), constant_grid(3, 1, -1.0)), UsageError);
}

}  // namespace
}  // namespace semirng
