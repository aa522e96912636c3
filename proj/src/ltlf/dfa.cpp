#include "autodistill/ltlf/dfa.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <sstream>

#include "autodistill/ltlf/progression.hpp"

namespace autodistill::ltlf {

namespace {

// Minimal sum-of-cubes cover of `on` with `off` as the blocking set;
// everything outside on+off is don't-care. Greedy expand-and-cover,
// followed by an irredundancy pass.
std::vector<Cube> synthesize_guard(const std::vector<Label>& on,
                                   const std::vector<Label>& off,
                                   int num_atoms) {
  const Label full = num_atoms >= 32 ? ~Label{0}
                                     : ((Label{1} << num_atoms) - 1);
  auto blocked = [&](const Cube& c) {
    for (Label o : off)
      if (c.matches(o)) return true;
    return false;
  };

  std::vector<Cube> cubes;
  for (Label m : on) {
    Cube c{full, m};
    for (int b = 0; b < num_atoms; ++b) {
      Cube wider{c.care & ~(Label{1} << b),
                 static_cast<Label>(c.value & ~(Label{1} << b))};
      if (!blocked(wider)) c = wider;
    }
    cubes.push_back(c);
  }

  // Greedy cover of the on-set.
  std::vector<bool> covered(on.size(), false);
  std::vector<Cube> cover;
  for (;;) {
    int best = -1;
    int best_gain = 0;
    for (std::size_t i = 0; i < cubes.size(); ++i) {
      int gain = 0;
      for (std::size_t j = 0; j < on.size(); ++j)
        if (!covered[j] && cubes[i].matches(on[j])) ++gain;
      if (gain > best_gain) {
        best_gain = gain;
        best = static_cast<int>(i);
      }
    }
    if (best < 0) break;
    cover.push_back(cubes[best]);
    for (std::size_t j = 0; j < on.size(); ++j)
      if (cubes[best].matches(on[j])) covered[j] = true;
  }

  // Drop cubes whose on-labels are covered by the rest.
  for (std::size_t i = 0; i < cover.size();) {
    bool redundant = true;
    for (Label m : on) {
      if (!cover[i].matches(m)) continue;
      bool elsewhere = false;
      for (std::size_t k = 0; k < cover.size(); ++k)
        if (k != i && cover[k].matches(m)) {
          elsewhere = true;
          break;
        }
      if (!elsewhere) {
        redundant = false;
        break;
      }
    }
    if (redundant)
      cover.erase(cover.begin() + static_cast<long>(i));
    else
      ++i;
  }
  std::sort(cover.begin(), cover.end(), [](const Cube& a, const Cube& b) {
    return a.care != b.care ? a.care < b.care : a.value < b.value;
  });
  return cover;
}

}  // namespace

std::string to_string(const Guard& g, const AtomSet& atoms) {
  if (g.cubes.empty()) return "false";
  std::string out;
  for (std::size_t i = 0; i < g.cubes.size(); ++i) {
    if (i) out += " | ";
    const Cube& c = g.cubes[i];
    if (c.care == 0) {
      out += "true";
      continue;
    }
    bool first = true;
    for (int b = 0; b < atoms.size(); ++b) {
      if (!(c.care & (Label{1} << b))) continue;
      if (!first) out += " & ";
      if (!(c.value & (Label{1} << b))) out += '!';
      out += atoms.name(b);
      first = false;
    }
  }
  return out;
}

Dfa::Dfa(AtomSet atoms, std::vector<Label> feasible, int initial,
         std::vector<bool> accepting, std::vector<std::vector<int>> delta)
    : atoms_(std::move(atoms)),
      feasible_(std::move(feasible)),
      initial_(initial),
      accepting_(std::move(accepting)),
      delta_(std::move(delta)) {
  for (int i = 0; i < static_cast<int>(feasible_.size()); ++i)
    feasible_index_.emplace(feasible_[i], i);

  const int n = num_states();
  sink_.assign(n, false);
  for (int s = 0; s < n; ++s) {
    if (accepting_[s]) continue;
    bool self = true;
    for (int t : delta_[s])
      if (t != s) {
        self = false;
        break;
      }
    sink_[s] = self;
  }

  // Guard synthesis per (state, target).
  edges_.resize(n);
  for (int s = 0; s < n; ++s) {
    std::map<int, std::vector<Label>> by_target;
    for (std::size_t li = 0; li < feasible_.size(); ++li)
      by_target[delta_[s][li]].push_back(feasible_[li]);
    for (auto& [target, on] : by_target) {
      std::vector<Label> off;
      for (std::size_t li = 0; li < feasible_.size(); ++li)
        if (delta_[s][li] != target) off.push_back(feasible_[li]);
      edges_[s].push_back(
          Edge{Guard{synthesize_guard(on, off, atoms_.size())}, target});
    }
  }
}

int Dfa::step(int state, Label sigma) const {
  auto it = feasible_index_.find(sigma);
  if (it == feasible_index_.end())
    throw InfeasibleLabelError("label " + atoms_.label_to_string(sigma) +
                               " is outside the feasible set at state " +
                               std::to_string(state));
  return delta_.at(state)[it->second];
}

int Dfa::accepting_count() const {
  int n = 0;
  for (bool a : accepting_)
    if (a) ++n;
  return n;
}

int Dfa::edge_count() const {
  int n = 0;
  for (const auto& es : edges_) n += static_cast<int>(es.size());
  return n;
}

int Dfa::live_state_count() const {
  int n = 0;
  for (int s = 0; s < num_states(); ++s)
    if (!is_sink(s)) ++n;
  return n;
}

int Dfa::live_edge_count() const {
  int n = 0;
  for (int s = 0; s < num_states(); ++s) {
    if (is_sink(s)) continue;
    for (const Edge& e : edges_from(s))
      if (!is_sink(e.target)) ++n;
  }
  return n;
}

bool accepts(const Dfa& d, std::span<const Label> trace) {
  int state = d.initial();
  for (Label sigma : trace) state = d.step(state, sigma);
  return d.accepting(state);
}

namespace {

std::vector<Label> default_feasible(int num_atoms) {
  if (num_atoms > 24)
    throw CompileError("explicit-label mode supports at most 24 propositions");
  std::vector<Label> all(std::size_t{1} << num_atoms);
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<Label>(i);
  return all;
}

// Progression state: residual obligation plus the "accept if the trace
// ended here" bit carried from the last consumed label.
struct ProgState {
  FormulaRef residual;
  bool accept;
};

struct ProgStateHash {
  std::size_t operator()(const ProgState& s) const {
    return s.residual->hash() * 2 + (s.accept ? 1 : 0);
  }
};
struct ProgStateEq {
  bool operator()(const ProgState& a, const ProgState& b) const {
    return a.accept == b.accept && equal(a.residual, b.residual);
  }
};

}  // namespace

Dfa compile(const FormulaRef& f, const AtomSet& atoms,
            const CompileOptions& options) {
  std::vector<Label> feasible =
      options.feasible ? *options.feasible : default_feasible(atoms.size());
  if (feasible.empty()) throw CompileError("empty feasible label set");
  std::sort(feasible.begin(), feasible.end());
  feasible.erase(std::unique(feasible.begin(), feasible.end()),
                 feasible.end());
  const Label max_label =
      atoms.size() >= 32 ? ~Label{0} : ((Label{1} << atoms.size()) - 1);
  for (Label l : feasible)
    if (l > max_label)
      throw CompileError("feasible label exceeds the atom-set width");

  std::unordered_map<ProgState, int, ProgStateHash, ProgStateEq> index;
  std::vector<ProgState> states;
  std::vector<std::vector<int>> delta;

  auto intern = [&](ProgState s) {
    auto it = index.find(s);
    if (it != index.end()) return it->second;
    int id = static_cast<int>(states.size());
    if (id >= options.state_cap)
      throw CompileError("state cap of " + std::to_string(options.state_cap) +
                         " exceeded during progression");
    index.emplace(s, id);
    states.push_back(std::move(s));
    delta.emplace_back();
    return id;
  };

  intern(ProgState{f, holds_on_empty(f)});
  for (std::size_t s = 0; s < states.size(); ++s) {
    const FormulaRef residual = states[s].residual;
    delta[s].resize(feasible.size());
    for (std::size_t li = 0; li < feasible.size(); ++li) {
      ProgState next{progress(residual, feasible[li]),
                     holds_at_end(residual, feasible[li])};
      delta[s][li] = intern(std::move(next));
    }
  }

  std::vector<bool> accepting(states.size());
  for (std::size_t s = 0; s < states.size(); ++s)
    accepting[s] = states[s].accept;

  Dfa raw(atoms, feasible, 0, std::move(accepting), std::move(delta));
  return options.minimize ? minimize(raw) : raw;
}

Dfa minimize(const Dfa& d) {
  const int n = d.num_states();
  const int m = static_cast<int>(d.feasible_labels().size());

  // Inverse transition lists.
  std::vector<std::vector<std::vector<int>>> inv(
      n, std::vector<std::vector<int>>(m));
  for (int s = 0; s < n; ++s)
    for (int li = 0; li < m; ++li)
      inv[d.step(s, d.feasible_labels()[li])][li].push_back(s);

  // Hopcroft partition refinement.
  std::vector<int> block_of(n);
  std::vector<std::vector<int>> blocks(2);
  for (int s = 0; s < n; ++s) {
    int b = d.accepting(s) ? 1 : 0;
    block_of[s] = b;
    blocks[b].push_back(s);
  }
  if (blocks[1].empty()) blocks.pop_back();
  if (blocks[0].empty()) {
    blocks.erase(blocks.begin());
    for (int s = 0; s < n; ++s) block_of[s] = 0;
  }

  std::deque<std::pair<int, int>> work;  // (block, label index)
  for (int li = 0; li < m; ++li)
    for (int b = 0; b < static_cast<int>(blocks.size()); ++b)
      work.emplace_back(b, li);

  std::vector<int> touched_count;
  while (!work.empty()) {
    auto [splitter, li] = work.front();
    work.pop_front();

    // States with a transition on label li into the splitter block.
    std::unordered_map<int, std::vector<int>> moved;  // block -> members hit
    for (int t : blocks[splitter])
      for (int s : inv[t][li]) moved[block_of[s]].push_back(s);

    for (auto& [b, members] : moved) {
      if (members.size() == blocks[b].size()) continue;  // no split
      int nb = static_cast<int>(blocks.size());
      blocks.emplace_back();
      for (int s : members) {
        block_of[s] = nb;
        blocks[nb].push_back(s);
      }
      std::vector<int> rest;
      for (int s : blocks[b])
        if (block_of[s] == b) rest.push_back(s);
      blocks[b] = std::move(rest);
      for (int l2 = 0; l2 < m; ++l2) work.emplace_back(nb, l2);
    }
  }

  // Renumber blocks in BFS order from the initial block for stable output.
  std::vector<int> order(blocks.size(), -1);
  std::vector<int> bfs{block_of[d.initial()]};
  order[block_of[d.initial()]] = 0;
  int next_id = 1;
  for (std::size_t i = 0; i < bfs.size(); ++i) {
    int rep = blocks[bfs[i]].front();
    for (int li = 0; li < m; ++li) {
      int tb = block_of[d.step(rep, d.feasible_labels()[li])];
      if (order[tb] < 0) {
        order[tb] = next_id++;
        bfs.push_back(tb);
      }
    }
  }
  // All states of the input are reachable, so all blocks get an order.

  const int nn = next_id;
  std::vector<bool> accepting(nn, false);
  std::vector<std::vector<int>> delta(nn, std::vector<int>(m));
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    if (order[b] < 0) continue;
    int rep = blocks[b].front();
    accepting[order[b]] = d.accepting(rep);
    for (int li = 0; li < m; ++li)
      delta[order[b]][li] =
          order[block_of[d.step(rep, d.feasible_labels()[li])]];
  }
  return Dfa(d.atoms(), d.feasible_labels(), 0, std::move(accepting),
             std::move(delta));
}

std::string to_dot(const Dfa& d) {
  std::ostringstream out;
  out << "digraph dfa {\n";
  out << "  rankdir=LR;\n";
  out << "  __init [shape=point];\n";
  for (int s = 0; s < d.num_states(); ++s) {
    out << "  q" << s << " [shape="
        << (d.accepting(s) ? "doublecircle" : "circle");
    if (d.is_sink(s)) out << ", style=dashed";
    out << "];\n";
  }
  out << "  __init -> q" << d.initial() << ";\n";
  for (int s = 0; s < d.num_states(); ++s)
    for (const Edge& e : d.edges_from(s))
      out << "  q" << s << " -> q" << e.target << " [label=\""
          << to_string(e.guard, d.atoms()) << "\"];\n";
  out << "}\n";
  return out.str();
}

}  // namespace autodistill::ltlf
