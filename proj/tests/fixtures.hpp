#ifndef AUTODISTILL_TESTS_FIXTURES_HPP
#define AUTODISTILL_TESTS_FIXTURES_HPP

#include "autodistill/automata/abstract_mdp.hpp"
#include "autodistill/ltlf/dfa.hpp"
#include "autodistill/ltlf/parser.hpp"

namespace autodistill::testing {

// The two-trace automaton: one accepting trace of two transitions (a, b)
// and one of three (c, d, e).
inline ltlf::Dfa two_trace_dfa() {
  ltlf::AtomSet atoms({"a", "b", "c", "d", "e"});
  std::vector<ltlf::Label> feasible{0};
  for (int i = 0; i < 5; ++i) feasible.push_back(ltlf::Label{1} << i);
  ltlf::CompileOptions opt;
  opt.feasible = feasible;
  return ltlf::compile(
      ltlf::parse("F(b | e) & (!F a | !F c) & (a R !b) & (c R !d) & (d R !e)",
                  atoms),
      atoms, opt);
}

// Reward 1 on transitions entering an accepting state, 0 elsewhere.
inline automata::TransitionReward accept_entry_reward(const ltlf::Dfa& d) {
  return [&d](int, ltlf::Label, int next) {
    return d.accepting(next) ? 1.0 : 0.0;
  };
}

}  // namespace autodistill::testing

#endif
