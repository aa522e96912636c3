#pragma once

#include <vector>

#include <autodistill/ltlf/dfa.hpp>

namespace autodistill::rl {

// One automaton-augmented transition ((s, omega), a, r, (s', omega')).
// label_next is the event label sigma = L(s') observed on this step, so
// omega_next == delta(omega, label_next) always holds.
template <class S, class A>
struct Experience {
  S s{};
  int omega = 0;
  A a{};
  double r = 0.0;
  S s_next{};
  int omega_next = 0;
  bool done = false;
  ltlf::Label label_next = 0;
};

// Counterfactual experiences for reward machines: replay the observed
// concrete transition from every automaton state. Rewards are recomputed
// from the automaton transition; done is set when the counterfactual
// transition reaches an accepting state. The original experience appears in
// the output at index e.omega.
template <class S, class A, class RewardFn>
std::vector<Experience<S, A>> crm_experiences(const Experience<S, A>& e,
                                              const ltlf::Dfa& d,
                                              RewardFn reward) {
  std::vector<Experience<S, A>> out;
  out.reserve(static_cast<std::size_t>(d.num_states()));
  for (int w = 0; w < d.num_states(); ++w) {
    Experience<S, A> c = e;
    c.omega = w;
    c.omega_next = d.step(w, e.label_next);
    c.r = reward(w, e.label_next, c.omega_next);
    c.done = d.accepting(c.omega_next);
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace autodistill::rl
