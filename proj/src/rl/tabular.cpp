#include <autodistill/rl/tabular.hpp>

#include <algorithm>
#include <stdexcept>

namespace autodistill::rl {

TabularQ::TabularQ(int num_actions) : num_actions_(num_actions) {
  if (num_actions <= 0)
    throw std::invalid_argument("num_actions must be positive");
}

std::vector<double>& TabularQ::row(std::uint64_t s) {
  auto it = table_.find(s);
  if (it == table_.end())
    it = table_.emplace(s, std::vector<double>(num_actions_, 0.0)).first;
  return it->second;
}

const std::vector<double>* TabularQ::row_if(std::uint64_t s) const {
  auto it = table_.find(s);
  return it == table_.end() ? nullptr : &it->second;
}

double TabularQ::q(std::uint64_t s, int a) const {
  const auto* r = row_if(s);
  return r ? r->at(static_cast<std::size_t>(a)) : 0.0;
}

double TabularQ::max_q(std::uint64_t s) const {
  const auto* r = row_if(s);
  if (!r) return 0.0;
  return *std::max_element(r->begin(), r->end());
}

int TabularQ::argmax(std::uint64_t s) const {
  const auto* r = row_if(s);
  if (!r) return 0;
  return static_cast<int>(std::max_element(r->begin(), r->end()) - r->begin());
}

void TabularQ::set(std::uint64_t s, int a, double v) {
  row(s).at(static_cast<std::size_t>(a)) = v;
}

void TabularQ::automaton_update(std::uint64_t s, int a, double r,
                                std::uint64_t s_next, bool done, double alpha,
                                double beta, std::optional<double> q_teacher,
                                double gamma) {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw std::invalid_argument("alpha must be in [0, 1]");
  if (!(beta >= 0.0 && beta <= 1.0))
    throw std::invalid_argument("beta must be in [0, 1]");
  double bootstrap = done ? r : r + gamma * max_q(s_next);
  double b = q_teacher ? beta : 0.0;
  double qt = q_teacher ? *q_teacher : 0.0;
  double& cell = row(s).at(static_cast<std::size_t>(a));
  cell = (1.0 - alpha) * cell + alpha * b * qt + alpha * (1.0 - b) * bootstrap;
}

int TabularQ::select_action(std::uint64_t s, double epsilon,
                            std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  if (coin(rng) < epsilon) {
    std::uniform_int_distribution<int> pick(0, num_actions_ - 1);
    return pick(rng);
  }
  return argmax(s);
}

}  // namespace autodistill::rl
