#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <unordered_map>
#include <vector>

namespace autodistill::rl {

// Tabular Q-function over opaque 64-bit state keys (callers encode the
// product state (s, omega) into the key). Unvisited entries read as zero.
class TabularQ {
 public:
  explicit TabularQ(int num_actions);

  int num_actions() const { return num_actions_; }
  double q(std::uint64_t s, int a) const;
  double max_q(std::uint64_t s) const;
  int argmax(std::uint64_t s) const;  // ties broken by lowest action index
  void set(std::uint64_t s, int a, double v);
  std::size_t num_states() const { return table_.size(); }

  // Annealed distillation update:
  //   Q(s,a) <- (1-alpha) Q(s,a)
  //           + alpha beta Q_teacher
  //           + alpha (1-beta) (r + gamma max_a' Q(s',a'))
  // with the bootstrap term dropped at episode end. When q_teacher is
  // absent the update is the vanilla Q-learning step (effective beta = 0).
  void automaton_update(std::uint64_t s, int a, double r, std::uint64_t s_next,
                        bool done, double alpha, double beta,
                        std::optional<double> q_teacher, double gamma);

  // Epsilon-greedy action selection.
  int select_action(std::uint64_t s, double epsilon, std::mt19937_64& rng) const;

 private:
  std::vector<double>& row(std::uint64_t s);
  const std::vector<double>* row_if(std::uint64_t s) const;

  int num_actions_;
  std::unordered_map<std::uint64_t, std::vector<double>> table_;
};

}  // namespace autodistill::rl
