#include <cmath>

#include "autodistill/automata/abstract_mdp.hpp"
#include "autodistill/envs/env.hpp"
#include "autodistill/ltlf/parser.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace autodistill;
using namespace autodistill::automata;
using autodistill::testing::accept_entry_reward;
using autodistill::testing::two_trace_dfa;

TEST_CASE("two-trace automaton and its abstract MDP") {
  ltlf::Dfa d = two_trace_dfa();
  AbstractMdp m = AbstractMdp::build(d, accept_entry_reward(d));
  // Init, one mid state per trace prefix (a; c; c,d), two distinct terminals.
  CHECK(m.num_states() == 6);

  // Short path: two transitions via a then b; long path: c, d, e.
  auto vi = value_iteration(m, 0.9, 1e-10);
  CHECK(vi.v[m.initial()] == doctest::Approx(0.9).epsilon(1e-9));

  const ltlf::Label a = 1 << 0, c = 1 << 2;
  for (double gamma : {0.5, 0.9, 0.99}) {
    auto r = value_iteration(m, gamma, 1e-12);
    double qa = -1, qc = -1;
    for (const auto& act : m.actions(m.initial())) {
      double q = act.reward + gamma * r.v[act.next];
      if (act.sigma == a) qa = q;
      if (act.sigma == c) qc = q;
    }
    CHECK(qa > qc);  // the two-step trace always wins under discounting
  }
}

TEST_CASE("value iteration residuals are non-increasing") {
  ltlf::Dfa d = two_trace_dfa();
  AbstractMdp m = AbstractMdp::build(d, accept_entry_reward(d));
  auto r = value_iteration(m, 0.99, 1e-9);
  for (std::size_t i = 1; i < r.residuals.size(); ++i)
    CHECK(r.residuals[i] <= r.residuals[i - 1] + 1e-15);
}

TEST_CASE("value iteration trivial fixed points") {
  ltlf::AtomSet atoms({"a"});
  ltlf::CompileOptions opt;
  opt.feasible = std::vector<ltlf::Label>{0, 1};
  ltlf::Dfa d = ltlf::compile(ltlf::parse("F a", atoms), atoms, opt);
  AbstractMdp m = AbstractMdp::build(d, accept_entry_reward(d));
  auto r = value_iteration(m, 0.9, 1e-12);
  CHECK(r.v[m.initial()] == doctest::Approx(1.0));  // one step to terminal

  AbstractMdp zero = AbstractMdp::build(
      d, [](int, ltlf::Label, int) { return 0.0; });
  auto rz = value_iteration(zero, 0.9, 1e-12);
  for (double v : rz.v) CHECK(v == 0.0);
}

TEST_CASE("no accepting state still terminates") {
  ltlf::AtomSet atoms({"a"});
  ltlf::CompileOptions opt;
  opt.feasible = std::vector<ltlf::Label>{0, 1};
  ltlf::Dfa d = ltlf::compile(ltlf::parse("false", atoms), atoms, opt);
  AbstractMdp m = AbstractMdp::build(d, accept_entry_reward(d));
  CHECK(m.num_states() == 1);
  auto r = value_iteration(m, 0.9, 1e-9);
  CHECK(r.v[0] == 0.0);
  auto q = abstract_q_learning(m, 0.9, 0.5, 1000, 7);
  CHECK(q.greedy_value(0) == 0.0);
}

TEST_CASE("abstract Q-learning approaches the value-iteration values") {
  ltlf::Dfa d = two_trace_dfa();
  AbstractMdp m = AbstractMdp::build(d, accept_entry_reward(d));
  auto q = abstract_q_learning(m, 0.9, 0.2, 50000, 3);
  const ltlf::Label a = 1 << 0, c = 1 << 2;
  double qa = -1, qc = -1;
  const auto& acts = m.actions(m.initial());
  for (std::size_t i = 0; i < acts.size(); ++i) {
    if (acts[i].sigma == a) qa = q.q[m.initial()][i];
    if (acts[i].sigma == c) qc = q.q[m.initial()][i];
  }
  CHECK(qa == doctest::Approx(0.9).epsilon(0.025));
  CHECK(qc == doctest::Approx(0.81).epsilon(0.025));
}

TEST_CASE("abstract Q-learning with zero steps stays zero") {
  ltlf::Dfa d = two_trace_dfa();
  AbstractMdp m = AbstractMdp::build(d, accept_entry_reward(d));
  auto q = abstract_q_learning(m, 0.9, 0.5, 0, 1);
  for (const auto& qs : q.q)
    for (double v : qs) CHECK(v == 0.0);
}

TEST_CASE("undiscounted chain propagates the terminal reward") {
  ltlf::AtomSet atoms({"a"});
  ltlf::CompileOptions opt;
  opt.feasible = std::vector<ltlf::Label>{0, 1};
  ltlf::Dfa d = ltlf::compile(ltlf::parse("X X a", atoms), atoms, opt);
  AbstractMdp m = AbstractMdp::build(d, accept_entry_reward(d));
  auto q = abstract_q_learning(m, 1.0, 0.5, 20000, 11);
  // Greedy values along the chain are all 1 under gamma = 1.
  for (int s = 0; s < m.num_states(); ++s)
    if (!m.terminal(s))
      CHECK(q.greedy_value(s) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("oracle equivalence on the environment automata") {
  for (auto kind : {envs::EnvKind::blind_craftsman,
                    envs::EnvKind::dungeon_quest}) {
    auto d = envs::objective_dfa(kind);
    AbstractMdp m = AbstractMdp::build(*d, accept_entry_reward(*d));
    auto vi = value_iteration(m, 0.9, 1e-10);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      auto q = abstract_q_learning(m, 0.9, 0.2, 200000, seed);
      for (int s = 0; s < m.num_states(); ++s) {
        if (m.terminal(s) || m.actions(s).empty()) continue;
        CHECK(std::abs(q.greedy_value(s) - vi.v[s]) < 0.03);
      }
    }
  }
}

TEST_CASE("automaton step follows guards and rejects infeasible labels") {
  ltlf::AtomSet atoms({"sword", "shield"});
  ltlf::Dfa d =
      ltlf::compile(ltlf::parse("F sword & F shield", atoms), atoms);
  int s1 = d.step(d.initial(), 1);  // sword only
  CHECK(s1 != d.initial());
  CHECK_FALSE(d.accepting(s1));
  int s2 = d.step(s1, 2);  // then shield
  CHECK(d.accepting(s2));
  for (ltlf::Label l : d.feasible_labels())
    CHECK(d.step(s2, l) == s2);  // accepting state is absorbing here
  CHECK(d.step(d.initial(), 0) == d.initial());
}

TEST_CASE("environment automata sizes are stable") {
  auto bc = envs::objective_dfa(envs::EnvKind::blind_craftsman);
  auto dq = envs::objective_dfa(envs::EnvKind::dungeon_quest);
  auto dm = envs::objective_dfa(envs::EnvKind::diamond_mine);
  CHECK(bc->num_states() == 4);
  CHECK(bc->live_state_count() == 4);
  CHECK(dq->num_states() == 8);
  CHECK(dq->live_state_count() == 7);
  CHECK(dm->num_states() == 16);
  CHECK(dm->live_state_count() == 15);
}
