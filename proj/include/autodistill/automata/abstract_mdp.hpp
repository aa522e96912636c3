#ifndef AUTODISTILL_AUTOMATA_ABSTRACT_MDP_HPP
#define AUTODISTILL_AUTOMATA_ABSTRACT_MDP_HPP

#include <cstdint>
#include <functional>
#include <unordered_map>
#include <vector>

#include "autodistill/ltlf/dfa.hpp"

namespace autodistill::automata {

using ltlf::Dfa;
using ltlf::Label;

/// Reward attached to one automaton transition (omega, sigma) -> omega'.
using TransitionReward = std::function<double(int, Label, int)>;

/// The automaton viewed as a small MDP: states are automaton nodes,
/// actions are feasible labels, transitions follow delta. Accepting
/// states are absorbing terminals with no outgoing actions.
class AbstractMdp {
 public:
  struct Action {
    Label sigma;
    int next;
    double reward;
  };

  /// Options: when `prune_rejecting` is set and the automaton has at least
  /// one accepting state, states that cannot reach an accepting state are
  /// dropped together with the actions leading into them.
  static AbstractMdp build(const Dfa& d, const TransitionReward& reward,
                           bool prune_rejecting = true);

  int num_states() const { return static_cast<int>(actions_.size()); }
  int initial() const { return initial_; }
  bool terminal(int s) const { return terminal_.at(s); }
  const std::vector<Action>& actions(int s) const { return actions_.at(s); }
  /// Original automaton state for MDP state s.
  int automaton_state(int s) const { return automaton_state_.at(s); }
  /// MDP state for an automaton state, or -1 if pruned.
  int mdp_state(int omega) const { return mdp_state_.at(omega); }

 private:
  int initial_ = 0;
  std::vector<bool> terminal_;
  std::vector<std::vector<Action>> actions_;
  std::vector<int> automaton_state_;
  std::vector<int> mdp_state_;
};

struct ValueIterationResult {
  std::vector<double> v;                       // per MDP state, terminals 0
  std::vector<double> residuals;               // sup-norm residual per sweep
  int sweeps = 0;
};

/// Value iteration: V(w) = max_sigma [R(w, sigma) + gamma V(delta(w, sigma))].
/// Terminal states are fixed at 0. Throws on non-convergence (only possible
/// with gamma = 1 and positive cycles).
ValueIterationResult value_iteration(const AbstractMdp& m, double gamma,
                                     double tol, int max_sweeps = 1000000);

struct AbstractQTable {
  /// q[state][action index], aligned with AbstractMdp::actions.
  std::vector<std::vector<double>> q;
  double greedy_value(int s) const;
};

/// Epsilon-greedy tabular Q-learning over the abstract MDP. Episodes start
/// at the initial state and reset at terminals (or after episode_cap steps,
/// so automata without accepting states still terminate).
AbstractQTable abstract_q_learning(const AbstractMdp& m, double gamma,
                                   double alpha, long steps,
                                   std::uint64_t seed, double epsilon = 0.1,
                                   int episode_cap = 200);

}  // namespace autodistill::automata

#endif
