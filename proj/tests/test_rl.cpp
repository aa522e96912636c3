#include "doctest.h"

#include <cmath>
#include <random>
#include <sstream>

#include <autodistill/ltlf/parser.hpp>
#include <autodistill/rl/experience.hpp>
#include <autodistill/rl/replay.hpp>
#include <autodistill/rl/tabular.hpp>
#include <autodistill/rl/teacher.hpp>

using namespace autodistill::rl;
namespace ltlf = autodistill::ltlf;

using Exp = Experience<std::uint64_t, int>;

TEST_CASE("bootstrap targets") {
  CHECK(dqn_target(100.0, true, 0.99, 55.0) == 100.0);
  CHECK(dqn_target(-0.1, false, 0.99, 10.0) == doctest::Approx(9.8));
  CHECK(td3_target(7.0, true, 0.5, 1.0, 2.0) == 7.0);
  CHECK(td3_target(0.0, false, 0.5, 3.0, 5.0) == doctest::Approx(1.5));
  // Single-critic mode ignores the twin.
  CHECK(td3_target(0.0, false, 0.5, 3.0, 5.0, true) == doctest::Approx(1.5));
  CHECK(td3_target(0.0, false, 0.5, 5.0, 3.0, true) == doctest::Approx(2.5));
  // Equal twins reduce to the single-critic form.
  CHECK(td3_target(1.0, false, 0.9, 4.0, 4.0) ==
        td3_target(1.0, false, 0.9, 4.0, 4.0, true));
}

TEST_CASE("student target blending") {
  CHECK(student_target(7.5, 1.0, 123.0) == 7.5);
  CHECK(student_target(2.0, 0.5, 4.0) == doctest::Approx(3.0));
  CHECK(student_target(2.0, 0.0, 4.0) == 4.0);
  CHECK(student_target(std::nullopt, 0.9, 4.0) == 4.0);

  // Convex combination: the blend never leaves [min, max] of its inputs.
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> val(-50.0, 50.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    double qt = val(rng), target = val(rng), beta = unit(rng);
    double out = student_target(qt, beta, target);
    CHECK(out >= std::min(qt, target) - 1e-12);
    CHECK(out <= std::max(qt, target) + 1e-12);
  }
}

TEST_CASE("annealing weight is exact exponentiation") {
  AnnealState anneal(0.999);
  CHECK(anneal.beta(0, 1) == 1.0);
  anneal.observe(0, 1, 1000);
  double direct = anneal.beta(0, 1);
  double log_domain = std::exp(1000.0 * std::log(0.999));
  CHECK(direct == doctest::Approx(0.36770).epsilon(1e-4));
  CHECK(direct == doctest::Approx(log_domain).epsilon(1e-12));
  // Counts are per transition, not global.
  CHECK(anneal.beta(0, 2) == 1.0);
  CHECK(anneal.eta(0, 1) == 1000);

  AnnealState off(1.0);
  off.observe(3, 3, 1 << 20);
  CHECK(off.beta(3, 3) == 1.0);
  CHECK_THROWS_AS(AnnealState(0.0), std::invalid_argument);
  CHECK_THROWS_AS(AnnealState(1.5), std::invalid_argument);
}

TEST_CASE("transition statistics average contributions") {
  TransitionStats stats;
  CHECK_FALSE(stats.q_avg(2, 1).has_value());
  stats.add(2, 1, 1.0);
  stats.add(2, 1, 3.0);
  CHECK(stats.q_avg(2, 1) == doctest::Approx(2.0));
  CHECK(stats.eta(2, 1) == 2);
  stats.add(0, 4, 5.5);
  CHECK(stats.q_avg(0, 4) == doctest::Approx(5.5));
  auto es = stats.entries();
  REQUIRE(es.size() == 2);
  CHECK(es[0].omega == 0);
  CHECK(es[1].omega == 2);
}

TEST_CASE("teacher table persistence round-trips exactly") {
  TransitionStats stats;
  stats.add(0, 1, 0.1);
  stats.add(0, 1, 0.2);
  stats.add(3, 0, -17.25);
  TeacherTable t = TeacherTable::from_stats(stats, Provenance::static_abstract);
  t.set(5, 7, 1.0 / 3.0, 42);

  std::stringstream buf;
  t.save(buf);
  TeacherTable u = TeacherTable::load(buf);
  CHECK(u.provenance() == Provenance::static_abstract);
  CHECK(u.size() == t.size());
  CHECK(u.q(0, 1) == t.q(0, 1));          // exact, via %.17g
  CHECK(u.q(5, 7) == doctest::Approx(1.0 / 3.0).epsilon(1e-16));
  CHECK(*u.q(5, 7) == *t.q(5, 7));
  CHECK(u.eta(5, 7) == 42);
  CHECK_FALSE(u.q(9, 9).has_value());

  std::stringstream bad("teacher-table v9\n");
  CHECK_THROWS(TeacherTable::load(bad));
  CHECK_THROWS(t.set(0, 0, std::nan("")));
}

TEST_CASE("replay buffer ring semantics") {
  ReplayBuffer<Exp> buf(4);
  for (int i = 0; i < 6; ++i) {
    Exp e;
    e.r = i;
    buf.append(e);
  }
  CHECK(buf.size() == 4);
  // Slots 0 and 1 were overwritten by experiences 4 and 5.
  CHECK(buf[0].r == 4.0);
  CHECK(buf[1].r == 5.0);
  CHECK(buf[2].r == 2.0);
  CHECK(buf[3].r == 3.0);
  for (std::size_t i = 0; i < 4; ++i) CHECK(buf.priority(i) == 1.0);
  CHECK(buf.total_priority() == doctest::Approx(4.0));
}

TEST_CASE("replay sampling follows priorities") {
  ReplayBuffer<Exp> buf(8);
  buf.append(Exp{});
  buf.append(Exp{});
  buf.set_priority(0, 1.0);
  buf.set_priority(1, 3.0);
  std::mt19937_64 rng(11);
  const int n = 20000;
  int ones = 0;
  for (std::size_t i : buf.sample(n, rng)) ones += (i == 1);
  // Binomial(20000, 0.75): sd ~ 0.003 of the fraction; allow 5 sd.
  CHECK(std::abs(ones / double(n) - 0.75) < 0.016);

  // Zero-priority entries are never sampled while others are positive.
  buf.set_priority(0, 0.0);
  for (std::size_t i : buf.sample(5000, rng)) CHECK(i == 1);

  // Sampling more than the buffer size draws with replacement.
  CHECK(buf.sample(100, rng).size() == 100);

  buf.set_priority(1, 0.0);
  CHECK_THROWS_AS(buf.sample(1, rng), std::logic_error);
  CHECK_THROWS_AS(buf.set_priority(1, -1.0), std::invalid_argument);
}

TEST_CASE("anneal counter tracks sampled minibatch elements") {
  // eta counts how many sampled elements used a transition, not how many
  // environment steps produced it.
  ReplayBuffer<Exp> buf(16);
  Exp a;
  a.omega = 0;
  a.label_next = 1;
  Exp b;
  b.omega = 1;
  b.label_next = 2;
  buf.append(a);
  buf.append(b);

  AnnealState anneal(0.999);
  std::mt19937_64 rng(3);
  long long seen_a = 0, seen_b = 0;
  for (int round = 0; round < 50; ++round) {
    for (std::size_t i : buf.sample(32, rng)) {
      const Exp& e = buf[i];
      anneal.observe(e.omega, e.label_next);
      (i == 0 ? seen_a : seen_b) += 1;
    }
  }
  CHECK(anneal.eta(0, 1) == seen_a);
  CHECK(anneal.eta(1, 2) == seen_b);
  CHECK(seen_a + seen_b == 50 * 32);
}

TEST_CASE("counterfactual experiences cover every automaton state") {
  // "a U b" compiles to three states: pending, accepting, and the sink.
  ltlf::AtomSet atoms({"a", "b"});
  ltlf::Dfa d = ltlf::compile(ltlf::parse("a U b", atoms), atoms);
  REQUIRE(d.num_states() == 3);

  Exp e;
  e.s = 10;
  e.omega = 0;
  e.a = 2;
  e.s_next = 11;
  e.label_next = 0b10;  // {b}
  e.omega_next = d.step(0, e.label_next);
  e.done = d.accepting(e.omega_next);

  auto reward = [&](int, ltlf::Label sigma, int to) {
    return d.accepting(to) ? 1.0 : (sigma == 0 ? -0.5 : 0.0);
  };
  auto cf = crm_experiences(e, d, reward);
  REQUIRE(cf.size() == 3);
  for (int w = 0; w < 3; ++w) {
    CHECK(cf[w].omega == w);
    CHECK(cf[w].omega_next == d.step(w, e.label_next));
    CHECK(cf[w].r == reward(w, e.label_next, cf[w].omega_next));
    CHECK(cf[w].done == d.accepting(cf[w].omega_next));
    CHECK(cf[w].s == e.s);
    CHECK(cf[w].s_next == e.s_next);
    CHECK(cf[w].a == e.a);
    CHECK(cf[w].label_next == e.label_next);
  }
  // The original experience is reproduced at its own automaton state.
  CHECK(cf[e.omega].omega_next == e.omega_next);
  CHECK(cf[e.omega].done == e.done);

  // A label that self-loops everywhere ({a} keeps a U b pending) only
  // changes omega.
  Exp quiet = e;
  quiet.label_next = 0b01;
  quiet.omega_next = d.step(0, quiet.label_next);
  auto cq = crm_experiences(quiet, d, reward);
  for (int w = 0; w < 3; ++w) CHECK(cq[w].omega_next == w);
}

TEST_CASE("tabular update reduces to vanilla Q-learning at beta zero") {
  TabularQ q(2);
  q.set(1, 0, 2.0);
  q.set(2, 0, 3.0);
  q.set(2, 1, 7.0);

  TabularQ vanilla(2);
  vanilla.set(1, 0, 2.0);
  vanilla.set(2, 0, 3.0);
  vanilla.set(2, 1, 7.0);

  // Hand-computed vanilla step: Q <- (1-a)Q + a (r + g max Q(s')).
  q.automaton_update(1, 0, 0.5, 2, false, 0.25, 0.0, 9.0, 0.9);
  double expected = 0.75 * 2.0 + 0.25 * (0.5 + 0.9 * 7.0);
  CHECK(q.q(1, 0) == doctest::Approx(expected).epsilon(1e-15));

  // Absent teacher behaves identically regardless of beta.
  vanilla.automaton_update(1, 0, 0.5, 2, false, 0.25, 0.8, std::nullopt, 0.9);
  CHECK(vanilla.q(1, 0) == doctest::Approx(expected).epsilon(1e-15));

  // alpha = 0 leaves the table untouched; done drops the bootstrap.
  q.automaton_update(1, 0, 55.0, 2, false, 0.0, 0.5, 1.0, 0.9);
  CHECK(q.q(1, 0) == doctest::Approx(expected).epsilon(1e-15));
  q.set(1, 0, 0.0);
  q.automaton_update(1, 0, 100.0, 2, true, 1.0, 0.0, std::nullopt, 0.9);
  CHECK(q.q(1, 0) == 100.0);
}

namespace {

// Deterministic 12-state, 3-action MDP used as a convergence oracle target.
constexpr int kStates = 12, kActions = 3, kTerminal = 11;

int mdp_next(int s, int a) { return (7 * s + 3 * a + 1) % kStates; }
double mdp_reward(int s, int a) { return ((s + a) % 5) * 0.25 - 0.1; }

std::vector<std::vector<double>> mdp_qstar(double gamma) {
  std::vector<double> v(kStates, 0.0);
  for (int it = 0; it < 20000; ++it) {
    double delta = 0.0;
    for (int s = 0; s < kStates; ++s) {
      if (s == kTerminal) continue;
      double best = -1e100;
      for (int a = 0; a < kActions; ++a) {
        int n = mdp_next(s, a);
        double q = mdp_reward(s, a) + (n == kTerminal ? 0.0 : gamma * v[n]);
        best = std::max(best, q);
      }
      delta = std::max(delta, std::abs(best - v[s]));
      v[s] = best;
    }
    if (delta < 1e-14) break;
  }
  std::vector<std::vector<double>> q(kStates, std::vector<double>(kActions));
  for (int s = 0; s < kStates; ++s)
    for (int a = 0; a < kActions; ++a) {
      int n = mdp_next(s, a);
      q[s][a] = mdp_reward(s, a) + (n == kTerminal ? 0.0 : gamma * v[n]);
    }
  return q;
}

}  // namespace

TEST_CASE("annealed tabular updates converge to Q* and decompose as q + r") {
  // With alpha_t = 1/(1+n) the iterate is a running average and the error
  // decays like n^(gamma-1); gamma is kept small so 1e-3 is reachable in a
  // unit-test budget.
  const double gamma = 0.2, rho = 0.5;
  auto qstar = mdp_qstar(gamma);

  TabularQ Q(kActions);
  // Two parallel processes: the bootstrap process qproc and the annealed
  // teacher perturbation rproc, whose sum must track Q exactly.
  std::vector<std::vector<double>> qproc(kStates,
                                         std::vector<double>(kActions, 0.0));
  std::vector<std::vector<double>> rproc = qproc;
  std::vector<std::vector<long long>> visits(
      kStates, std::vector<long long>(kActions, 0));

  const double teacher = 5.0;  // deliberately wrong constant teacher
  double worst_gap = 0.0;
  const int sweeps = 150000;
  for (int t = 0; t < sweeps; ++t) {
    for (int s = 0; s < kStates; ++s) {
      if (s == kTerminal) continue;
      for (int a = 0; a < kActions; ++a) {
        long long n = visits[s][a]++;
        double alpha = 1.0 / (1.0 + static_cast<double>(n));
        double beta = std::pow(rho, static_cast<double>(n));
        int nxt = mdp_next(s, a);
        bool done = nxt == kTerminal;
        double bootstrap = mdp_reward(s, a) +
                           (done ? 0.0 : gamma * Q.max_q(std::uint64_t(nxt)));
        Q.automaton_update(std::uint64_t(s), a, mdp_reward(s, a),
                           std::uint64_t(nxt), done, alpha, beta, teacher,
                           gamma);
        qproc[s][a] = (1.0 - alpha) * qproc[s][a] + alpha * bootstrap;
        rproc[s][a] =
            (1.0 - alpha) * rproc[s][a] + alpha * beta * (teacher - bootstrap);
        worst_gap = std::max(
            worst_gap, std::abs(Q.q(std::uint64_t(s), a) -
                                (qproc[s][a] + rproc[s][a])));
      }
    }
  }
  CHECK(worst_gap < 1e-10);

  double sup_err = 0.0, sup_r = 0.0;
  for (int s = 0; s < kStates; ++s) {
    if (s == kTerminal) continue;
    for (int a = 0; a < kActions; ++a) {
      sup_err = std::max(sup_err,
                         std::abs(Q.q(std::uint64_t(s), a) - qstar[s][a]));
      sup_r = std::max(sup_r, std::abs(rproc[s][a]));
    }
  }
  CHECK(sup_err < 1e-3);
  CHECK(sup_r < 1e-3);
}
