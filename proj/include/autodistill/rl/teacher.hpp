#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <autodistill/ltlf/formula.hpp>

namespace autodistill::rl {

using ltlf::Label;

// Packs an (automaton state, event label) pair into a map key.
inline std::uint64_t transition_key(int omega, Label sigma) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(omega)) << 32) |
         sigma;
}

// Per-transition visit counts and Q-value sums; the distilled teacher value
// for (omega, sigma) is the running average q_sum / eta.
class TransitionStats {
 public:
  struct Entry {
    int omega = 0;
    Label sigma = 0;
    long long eta = 0;
    double q_sum = 0.0;
  };

  void add(int omega, Label sigma, double q);
  long long eta(int omega, Label sigma) const;
  std::optional<double> q_avg(int omega, Label sigma) const;
  std::vector<Entry> entries() const;  // sorted by (omega, sigma)

 private:
  std::unordered_map<std::uint64_t, Entry> map_;
};

enum class Provenance { dynamic_replay, static_abstract };

std::string to_string(Provenance p);
Provenance provenance_from_string(const std::string& s);

// Distilled teacher Q-values keyed by automaton transition. Transitions the
// teacher never observed are absent, not zero; consumers fall back to their
// own bootstrap target there.
class TeacherTable {
 public:
  explicit TeacherTable(Provenance provenance = Provenance::dynamic_replay)
      : provenance_(provenance) {}

  static TeacherTable from_stats(const TransitionStats& stats, Provenance p);

  Provenance provenance() const { return provenance_; }
  void set(int omega, Label sigma, double q_avg, long long eta = 0);
  std::optional<double> q(int omega, Label sigma) const;
  long long eta(int omega, Label sigma) const;
  std::size_t size() const { return map_.size(); }
  std::vector<TransitionStats::Entry> entries() const;  // q_sum holds q_avg

  // Versioned text persistence with exact decimal round-trip.
  void save(std::ostream& out) const;
  void save_file(const std::string& path) const;
  static TeacherTable load(std::istream& in);
  static TeacherTable load_file(const std::string& path);

 private:
  struct Cell {
    double q = 0.0;
    long long eta = 0;
  };
  Provenance provenance_;
  std::unordered_map<std::uint64_t, Cell> map_;
};

// Student-side annealing weight beta(omega, sigma) = rho^eta, where eta
// counts sampled minibatch elements (not environment steps) that used the
// transition.
class AnnealState {
 public:
  explicit AnnealState(double rho = 0.999);

  double rho() const { return rho_; }
  void observe(int omega, Label sigma, long long times = 1);
  long long eta(int omega, Label sigma) const;
  double beta(int omega, Label sigma) const;

 private:
  double rho_;
  std::unordered_map<std::uint64_t, long long> counts_;
};

// r + gamma * max_a' Q_target(s', a'); the bootstrap term is dropped at
// episode end.
inline double dqn_target(double r, bool done, double gamma,
                         double max_next_q) {
  return done ? r : r + gamma * max_next_q;
}

// r + gamma * min(Q1, Q2) evaluated at the smoothed target action. With
// single_critic the twin minimum is disabled and q1 is used alone.
inline double td3_target(double r, bool done, double gamma, double q1,
                         double q2, bool single_critic = false) {
  double q = single_critic ? q1 : (q1 < q2 ? q1 : q2);
  return done ? r : r + gamma * q;
}

// beta * Q_teacher + (1 - beta) * q_target; absent teacher entries reduce to
// the plain bootstrap target.
inline double student_target(std::optional<double> q_teacher, double beta,
                             double q_target) {
  if (!q_teacher) return q_target;
  return beta * *q_teacher + (1.0 - beta) * q_target;
}

}  // namespace autodistill::rl
