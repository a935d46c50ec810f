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

// semirng command-line tool. Results go to stdout as JSON, diagnostics to
// stderr. Exit codes: 0 success, 1 failed check or internal error,
// 2 invalid input, 3 posteriors requested for an infeasible alignment.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "semirng/axioms.h"
#include "semirng/case_file.h"
#include "semirng/ctc.h"
#include "semirng/engine.h"
#include "semirng/errors.h"
#include "semirng/losses.h"
#include "semirng/oracle.h"
#include "semirng/report.h"
#include "semirng/rnnt.h"
#include "semirng/semiring.h"
#include "semirng/tensor_io.h"

namespace {

using namespace semirng;

constexpr int kExitFailure = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitInfeasible = 3;

int env_threads() {
  const char* raw = std::getenv("SEMIRNG_THREADS");
  if (raw == nullptr || *raw == '\0') return 0;
  char* end = nullptr;
  const long n = std::strtol(raw, &end, 10);
  if (*end != '\0' || n < 0 || n > 1024) {
    throw UsageError("SEMIRNG_THREADS must be an integer in [0, 1024]");
  }
  return static_cast<int>(n);
}

struct LatticeArgs {
  std::string case_path;
  std::string semiring = "log";
  bool entropy = false;
  bool grad = false;
  std::string posteriors;
  bool oracle_check = false;
  bool count_ops = false;
  std::optional<double> alpha_ent;
  bool final_blank = false;
  bool allow_nan = false;
};

struct DistillArgs {
  std::string case_path;
  double alpha_state = 0.0;
  double alpha_seq = 0.0;
  bool final_blank = false;
  bool allow_nan = false;
};

struct AxiomArgs {
  std::string semiring;
  std::size_t trials = 10000;
  std::uint64_t seed = 20260101;
};

struct BenchArgs {
  std::size_t t = 200;
  std::size_t u = 50;
  std::string semiring = "log-entropy";
  int repeat = 5;
};

class Evaluator {
 public:
  Evaluator(const AlignmentProblem& p, const CaseData& c, bool final_blank)
      : p_(p), threads_(env_threads()) {
    if (c.kind == ModelKind::kRnnt && !final_blank) {
      schedule_ = wavefront_schedule(c.frames, c.label_count);
    }
  }

  ComputeResult run(SemiringId s, bool want_ops) const {
    if (s == SemiringId::kLogReverseKl && !p_.has_teacher()) {
      throw UsageError("log-reverse-kl needs \"teacher_logits\" in the case");
    }
    std::vector<SemiringValue> w;
    if (s == SemiringId::kCounting) {
      w.assign(p_.student.size(), SemiringValue::counting(1));
    } else if (s == SemiringId::kLogReverseKl) {
      w = lift_table(s, p_.student, p_.teacher);
    } else {
      w = lift_table(s, p_.student);
    }
    ComputeOptions opts;
    opts.want_ops = want_ops;
    opts.threads = threads_;
    opts.schedule = schedule_.empty() ? nullptr : &schedule_;
    return compute(p_.lattice, w, s, opts);
  }

 private:
  const AlignmentProblem& p_;
  int threads_;
  Schedule schedule_;
};

void require_normalized(const AlignmentProblem& p, const char* what) {
  if (!p.normalized) {
    throw UnsupportedError(std::string(what) +
                           " requires normalized log-probabilities");
  }
}

int run_lattice(ModelKind kind, const LatticeArgs& a) {
  const CaseData c = load_case(a.case_path, a.allow_nan);
  if (c.kind != kind) {
    throw UsageError("case kind does not match the subcommand");
  }
  const AlignmentProblem p = make_problem(c, a.final_blank);
  const Evaluator eval(p, c, a.final_blank);
  const SemiringId s = parse_semiring(a.semiring);

  JsonObject out;
  out.add("kind", kind == ModelKind::kCtc ? "ctc" : "rnnt");
  out.add("semiring", name(s));
  const ComputeResult main = eval.run(s, a.count_ops);
  if (s == SemiringId::kCounting) {
    out.add("value", main.total.count);
  } else {
    out.add("value", main.total.components());
  }

  const double nll =
      is_log_space(s) ? -main.total[0] : -eval.run(SemiringId::kLog, false).total[0];
  out.add("nll", nll);

  const bool want_entropy =
      a.entropy || a.alpha_ent.has_value() || s == SemiringId::kLogEntropy;
  std::optional<double> entropy;
  if (want_entropy) {
    require_normalized(p, "alignment entropy");
    const SemiringValue t = s == SemiringId::kLogEntropy
                                ? main.total
                                : eval.run(SemiringId::kLogEntropy, false).total;
    entropy = std::exp(t[1]);
    out.add("entropy", *entropy);
  }

  std::optional<SequenceKl> kl;
  if (s == SemiringId::kLogReverseKl) {
    require_normalized(p, "sequence KL");
    kl = sequence_kl_from_total(main.total, main.ops.value_or(OpCount{}));
    out.add("kl_seq", kl->kl_seq);
    out.add("teacher_entropy_term", kl->teacher_neg_entropy);
    out.add("cross_term", kl->cross_term);
  }

  const double alpha = a.alpha_ent.value_or(0.0);
  if (a.alpha_ent) {
    LossConfig cfg;
    cfg.alpha_ent = alpha;
    cfg.model_kind = kind;
    out.add("total", entropy_regularized_loss(p, cfg).total);
  }

  if (a.grad) {
    const GradientTable g = gradient(p.lattice, p.student, {}, SemiringId::kLog, 0);
    std::vector<double> dh;
    if (alpha != 0.0) {
      dh = gradient_dense(p.lattice, p.student, {}, SemiringId::kLogEntropy, 1,
                          GradientScale::kLinear);
    }
    JsonObject grad;
    for (const auto& [ref, d] : g) {
      const double v = alpha != 0.0 ? -d - alpha * dh[ref] : -d;
      grad.add(std::to_string(ref), v);
    }
    out.add("grad", grad);
  }

  if (a.count_ops) {
    out.add("ops", ops_json(*main.ops));
    if (kind == ModelKind::kRnnt && !a.final_blank) {
      const NaiveOpCount n = naive_op_count(c.frames, c.label_count);
      JsonObject naive;
      naive.add("mul", n.multiplications);
      naive.add("add", n.additions);
      out.add("naive_ops", naive);
    }
  }

  if (a.oracle_check) {
    const std::uint64_t count = eval.run(SemiringId::kCounting, false).total.count;
    out.add("paths", count);
    const auto paths = enumerate_paths(p.lattice, p.student, p.teacher);
    const OracleQuantities<double> q = oracle_quantities(paths);
    JsonObject oracle;
    oracle.add("nll", -std::log(q.likelihood));
    if (entropy) oracle.add("entropy", q.entropy);
    if (kl) oracle.add("kl_seq", q.kl);
    oracle.add("paths", static_cast<std::uint64_t>(q.paths));
    out.add("oracle", oracle);
  }

  if (!a.posteriors.empty()) {
    if (kind != ModelKind::kCtc) throw UsageError("--posteriors is available for CTC cases");
    const FrameLogProbs logits(c.frames, c.vocab, c.logits, c.normalized);
    const Matrix post = ctc_state_posteriors(logits, c.labels);
    write_tensor(a.posteriors, Tensor{{post.rows, post.cols}, post.data});
    out.add("posteriors", a.posteriors);
  }

  std::cout << out.dump();
  return 0;
}

int run_distill(const DistillArgs& a) {
  const CaseData c = load_case(a.case_path, a.allow_nan);
  if (!c.has_teacher()) throw UsageError("distill needs \"teacher_logits\" in the case");
  const AlignmentProblem p = make_problem(c, a.final_blank);
  LossConfig cfg;
  cfg.alpha_state = a.alpha_state;
  cfg.alpha_seq = a.alpha_seq;
  cfg.model_kind = c.kind;
  const LossReport r = semiring_distillation_loss(p, cfg);
  std::cout << loss_report_json(r).dump();
  return 0;
}

int run_axioms(const AxiomArgs& a) {
  std::vector<SemiringId> which;
  if (a.semiring.empty()) {
    which.assign(kAllSemirings.begin(), kAllSemirings.end());
  } else {
    which.push_back(parse_semiring(a.semiring));
  }
  JsonObject out;
  bool ok = true;
  for (SemiringId s : which) {
    const AxiomReport r = check_axioms(s, a.trials, a.seed);
    JsonObject entry;
    entry.add("trials", static_cast<std::uint64_t>(r.trials));
    entry.add("failures", static_cast<std::uint64_t>(r.total_failures()));
    JsonObject laws;
    for (const auto& [law, n] : r.failures) laws.add(law, static_cast<std::uint64_t>(n));
    entry.add("laws", laws);
    if (!r.ok()) {
      entry.add("first_failure", r.first_failure);
      ok = false;
    }
    out.add(name(s), entry);
  }
  out.add("ok", ok);
  std::cout << out.dump();
  return ok ? 0 : kExitFailure;
}

int run_bench(const BenchArgs& a) {
  if (a.t == 0 || a.repeat < 1) throw UsageError("bench needs --t >= 1 and --repeat >= 1");
  const SemiringId s = parse_semiring(a.semiring);
  if (s == SemiringId::kLogReverseKl || s == SemiringId::kCounting) {
    throw UsageError("bench supports probability, log, tropical, entropy and log-entropy");
  }
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(0.05, 0.95);
  RnntGridLogProbs grid(a.t, a.u);
  for (std::size_t t = 0; t <= a.t; ++t) {
    for (std::size_t u = 0; u <= a.u; ++u) {
      const double b = unit(rng);
      const double l = (1.0 - b) * unit(rng);
      if (t < a.t) grid.blank(t, u) = std::log(b);
      if (u < a.u) grid.label(t, u) = std::log(l);
    }
  }
  int threads = env_threads();
  if (threads < 2) {
    threads = std::max(2, static_cast<int>(std::thread::hardware_concurrency()));
  }
  auto time_it = [&](int n_threads, ComputeResult& last) {
    RnntOptions opts;
    opts.threads = n_threads;
    double best = 1e300;
    for (int i = 0; i < a.repeat; ++i) {
      const auto t0 = std::chrono::steady_clock::now();
      last = rnnt_compute(grid, s, opts, true);
      const auto t1 = std::chrono::steady_clock::now();
      best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    return best;
  };
  ComputeResult seq, par;
  const double seq_ms = time_it(0, seq);
  const double par_ms = time_it(threads, par);
  JsonObject out;
  out.add("T", static_cast<std::uint64_t>(a.t));
  out.add("U", static_cast<std::uint64_t>(a.u));
  out.add("semiring", name(s));
  out.add("threads", threads);
  out.add("sequential_ms", seq_ms);
  out.add("wavefront_ms", par_ms);
  out.add("identical", seq.total == par.total);
  out.add("value", seq.total.components());
  out.add("ops", ops_json(*seq.ops));
  std::cout << out.dump();
  return seq.total == par.total ? 0 : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semiring dynamic programming over CTC and RNN-T lattices"};
  app.require_subcommand(1);

  LatticeArgs ctc_args, rnnt_args;
  auto add_lattice = [&](const char* cmd, LatticeArgs& a, const char* help) {
    CLI::App* sub = app.add_subcommand(cmd, help);
    sub->add_option("case", a.case_path, "Case file (JSON)")->required();
    sub->add_option("--semiring", a.semiring, "Semiring for the main pass");
    sub->add_flag("--entropy", a.entropy, "Report the alignment entropy");
    sub->add_flag("--grad", a.grad, "Report d(total or nll)/d log-prob per weight ref");
    sub->add_option("--posteriors", a.posteriors, "Write CTC state posteriors to a tensor file");
    sub->add_flag("--oracle-check", a.oracle_check, "Also evaluate by path enumeration");
    sub->add_flag("--count-ops", a.count_ops, "Report scalar operation counts");
    sub->add_option("--alpha-ent", a.alpha_ent, "Entropy regularization weight");
    sub->add_flag("--final-blank", a.final_blank, "RNN-T: require a terminal blank");
    sub->add_flag("--allow-nan", a.allow_nan, "Accept NaN entries in tensors");
    return sub;
  };
  CLI::App* ctc = add_lattice("ctc", ctc_args, "Evaluate a CTC case");
  CLI::App* rnnt = add_lattice("rnnt", rnnt_args, "Evaluate an RNN-T case");

  DistillArgs distill_args;
  CLI::App* distill = app.add_subcommand("distill", "Semiring distillation loss");
  distill->add_option("case", distill_args.case_path, "Case file with teacher_logits")->required();
  distill->add_option("--alpha-state", distill_args.alpha_state, "KL_state weight");
  distill->add_option("--alpha-seq", distill_args.alpha_seq, "KL_seq weight");
  distill->add_flag("--final-blank", distill_args.final_blank, "RNN-T: require a terminal blank");
  distill->add_flag("--allow-nan", distill_args.allow_nan, "Accept NaN entries in tensors");

  AxiomArgs axiom_args;
  CLI::App* axioms = app.add_subcommand("axioms", "Randomized semiring law checks");
  axioms->add_option("--semiring", axiom_args.semiring, "Only this semiring");
  axioms->add_option("--trials", axiom_args.trials, "Random triples per semiring");
  axioms->add_option("--seed", axiom_args.seed, "Random seed");

  BenchArgs bench_args;
  CLI::App* bench = app.add_subcommand("bench", "Sequential vs wavefront RNN-T timing");
  bench->add_option("--t", bench_args.t, "Frames");
  bench->add_option("--u", bench_args.u, "Labels");
  bench->add_option("--semiring", bench_args.semiring, "Semiring");
  bench->add_option("--repeat", bench_args.repeat, "Repetitions (best time is kept)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInvalid;
  }

  try {
    if (ctc->parsed()) return run_lattice(ModelKind::kCtc, ctc_args);
    if (rnnt->parsed()) return run_lattice(ModelKind::kRnnt, rnnt_args);
    if (distill->parsed()) return run_distill(distill_args);
    if (axioms->parsed()) return run_axioms(axiom_args);
    if (bench->parsed()) return run_bench(bench_args);
  } catch (const InfeasibleError& e) {
    std::cerr << "semirng: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const Error& e) {
    std::cerr << "semirng: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "semirng: internal error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}
