#ifndef AUTODISTILL_LTLF_DFA_HPP
#define AUTODISTILL_LTLF_DFA_HPP

#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "autodistill/ltlf/formula.hpp"

namespace autodistill::ltlf {

/// One product term over the atom set: matches sigma iff the bits under
/// `care` equal `value`.
struct Cube {
  Label care = 0;
  Label value = 0;
  bool matches(Label sigma) const { return (sigma & care) == value; }
};

/// Disjunction of cubes; the guard of a DFA edge.
struct Guard {
  std::vector<Cube> cubes;
  bool matches(Label sigma) const {
    for (const Cube& c : cubes)
      if (c.matches(sigma)) return true;
    return false;
  }
};

std::string to_string(const Guard& g, const AtomSet& atoms);

struct Edge {
  Guard guard;
  int target = -1;
};

struct CompileError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InfeasibleLabelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Deterministic finite automaton over labels drawn from a feasible subset
/// of 2^AP. Immutable after construction; guards partition the feasible
/// labels at every state, and every state is reachable from the initial
/// one. Non-accepting absorbing states are flagged as sinks.
class Dfa {
 public:
  Dfa(AtomSet atoms, std::vector<Label> feasible, int initial,
      std::vector<bool> accepting,
      std::vector<std::vector<int>> delta);  // delta[state][feasible index]

  const AtomSet& atoms() const { return atoms_; }
  int num_states() const { return static_cast<int>(accepting_.size()); }
  int initial() const { return initial_; }
  bool accepting(int state) const { return accepting_.at(state); }
  int accepting_count() const;
  bool is_sink(int state) const { return sink_.at(state); }
  const std::vector<Label>& feasible_labels() const { return feasible_; }
  bool label_feasible(Label sigma) const {
    return feasible_index_.count(sigma) > 0;
  }

  /// delta(state, sigma); throws InfeasibleLabelError on labels outside
  /// the feasible set.
  int step(int state, Label sigma) const;

  const std::vector<Edge>& edges_from(int state) const {
    return edges_.at(state);
  }

  /// Number of guarded edges (one per (state, target) pair with traffic).
  int edge_count() const;
  /// Number of feasible (state, label) pairs.
  int pair_count() const {
    return num_states() * static_cast<int>(feasible_.size());
  }
  /// Counting convention that excludes rejecting sinks and edges into them.
  int live_state_count() const;
  int live_edge_count() const;

 private:
  AtomSet atoms_;
  std::vector<Label> feasible_;
  std::unordered_map<Label, int> feasible_index_;
  int initial_;
  std::vector<bool> accepting_;
  std::vector<bool> sink_;
  std::vector<std::vector<int>> delta_;
  std::vector<std::vector<Edge>> edges_;
};

struct CompileOptions {
  /// Feasible labels; defaults to all of 2^AP.
  std::optional<std::vector<Label>> feasible;
  bool minimize = true;
  int state_cap = 10000;
};

/// Compiles a formula into a DFA by deduplicated progression, then
/// Hopcroft minimization and guard re-synthesis.
Dfa compile(const FormulaRef& f, const AtomSet& atoms,
            const CompileOptions& options = {});

/// Runs the automaton over a trace; the empty trace answers whether the
/// initial state accepts.
bool accepts(const Dfa& d, std::span<const Label> trace);

/// Hopcroft minimization (exposed for the idempotence property).
Dfa minimize(const Dfa& d);

/// Graphviz rendering: accepting states double-circled, sinks dashed,
/// stable ordering.
std::string to_dot(const Dfa& d);

}  // namespace autodistill::ltlf

#endif
