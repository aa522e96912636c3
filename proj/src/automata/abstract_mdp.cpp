#include "autodistill/automata/abstract_mdp.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace autodistill::automata {

AbstractMdp AbstractMdp::build(const Dfa& d, const TransitionReward& reward,
                               bool prune_rejecting) {
  const int n = d.num_states();

  // States that can reach an accepting state.
  std::vector<bool> live(n, false);
  for (int s = 0; s < n; ++s) live[s] = d.accepting(s);
  bool has_accepting = std::any_of(live.begin(), live.end(),
                                   [](bool b) { return b; });
  if (has_accepting) {
    bool changed = true;
    while (changed) {
      changed = false;
      for (int s = 0; s < n; ++s) {
        if (live[s]) continue;
        for (Label sigma : d.feasible_labels())
          if (live[d.step(s, sigma)]) {
            live[s] = true;
            changed = true;
            break;
          }
      }
    }
  }
  const bool prune = prune_rejecting && has_accepting;

  AbstractMdp m;
  m.mdp_state_.assign(n, -1);
  for (int s = 0; s < n; ++s) {
    if (prune && !live[s]) continue;
    m.mdp_state_[s] = static_cast<int>(m.automaton_state_.size());
    m.automaton_state_.push_back(s);
  }
  const int nn = static_cast<int>(m.automaton_state_.size());
  m.actions_.resize(nn);
  m.terminal_.resize(nn);
  for (int i = 0; i < nn; ++i) {
    int s = m.automaton_state_[i];
    m.terminal_[i] = d.accepting(s);
    if (m.terminal_[i]) continue;  // absorbing, no outgoing actions
    for (Label sigma : d.feasible_labels()) {
      int t = d.step(s, sigma);
      if (prune && !live[t]) continue;
      m.actions_[i].push_back(Action{sigma, m.mdp_state_[t],
                                     reward(s, sigma, t)});
    }
  }
  if (m.mdp_state_[d.initial()] < 0)
    throw std::runtime_error(
        "abstract MDP: initial state cannot reach an accepting state");
  m.initial_ = m.mdp_state_[d.initial()];
  return m;
}

ValueIterationResult value_iteration(const AbstractMdp& m, double gamma,
                                     double tol, int max_sweeps) {
  if (gamma < 0.0 || gamma > 1.0)
    throw std::invalid_argument("value_iteration: gamma outside [0,1]");
  if (tol <= 0.0) throw std::invalid_argument("value_iteration: tol <= 0");

  ValueIterationResult r;
  r.v.assign(m.num_states(), 0.0);
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double residual = 0.0;
    std::vector<double> next = r.v;
    for (int s = 0; s < m.num_states(); ++s) {
      if (m.terminal(s) || m.actions(s).empty()) {
        next[s] = 0.0;
        continue;
      }
      double best = -std::numeric_limits<double>::infinity();
      for (const auto& a : m.actions(s))
        best = std::max(best, a.reward + gamma * r.v[a.next]);
      next[s] = best;
      residual = std::max(residual, std::abs(best - r.v[s]));
    }
    r.v = std::move(next);
    r.residuals.push_back(residual);
    r.sweeps = sweep + 1;
    if (residual <= tol) return r;
  }
  throw std::runtime_error("value iteration did not converge within sweep cap");
}

double AbstractQTable::greedy_value(int s) const {
  const auto& qs = q.at(s);
  if (qs.empty()) return 0.0;
  return *std::max_element(qs.begin(), qs.end());
}

AbstractQTable abstract_q_learning(const AbstractMdp& m, double gamma,
                                   double alpha, long steps,
                                   std::uint64_t seed, double epsilon,
                                   int episode_cap) {
  if (alpha <= 0.0 || alpha > 1.0)
    throw std::invalid_argument("abstract_q_learning: alpha outside (0,1]");

  AbstractQTable table;
  table.q.resize(m.num_states());
  for (int s = 0; s < m.num_states(); ++s)
    table.q[s].assign(m.actions(s).size(), 0.0);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);

  int state = m.initial();
  int episode_steps = 0;
  for (long t = 0; t < steps; ++t) {
    if (m.terminal(state) || m.actions(state).empty() ||
        episode_steps >= episode_cap) {
      state = m.initial();
      episode_steps = 0;
      if (m.terminal(state) || m.actions(state).empty()) break;
    }
    const auto& acts = m.actions(state);
    int ai;
    if (coin(rng) < epsilon) {
      ai = static_cast<int>(rng() % acts.size());
    } else {
      ai = 0;
      for (std::size_t k = 1; k < acts.size(); ++k)
        if (table.q[state][k] > table.q[state][ai])
          ai = static_cast<int>(k);
    }
    const auto& a = acts[ai];
    double bootstrap = m.terminal(a.next) ? 0.0 : gamma * table.greedy_value(a.next);
    table.q[state][ai] +=
        alpha * (a.reward + bootstrap - table.q[state][ai]);
    state = a.next;
    ++episode_steps;
  }
  return table;
}

}  // namespace autodistill::automata
