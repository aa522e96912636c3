#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <autodistill/automata/abstract_mdp.hpp>
#include <autodistill/envs/env.hpp>
#include <autodistill/neural/mlp.hpp>
#include <autodistill/neural/td3.hpp>
#include <autodistill/rl/experience.hpp>
#include <autodistill/rl/tabular.hpp>
#include <autodistill/rl/teacher.hpp>

namespace autodistill::distill {

using TabularExp = rl::Experience<std::uint64_t, int>;
using NeuralExp = rl::Experience<Eigen::VectorXd, int>;
using ContExp = rl::Experience<Eigen::VectorXd, Eigen::Vector2d>;

// Product-state key (s, omega) for tabular tables.
inline std::uint64_t product_key(std::uint64_t s, int omega, int num_omega) {
  return s * static_cast<std::uint64_t>(num_omega) +
         static_cast<std::uint64_t>(omega);
}

// Linearly annealed epsilon: start -> end over the first `fraction` of
// training, then flat.
double epsilon_at(long long step, long long total_steps, double start,
                  double end, double fraction);

struct TeacherConfig {
  long long steps = 200000;
  double gamma = 0.99;
  double alpha = 0.1;  // tabular step size
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  double epsilon_fraction = 0.2;
  std::size_t buffer_capacity = 200000;
  // DQN-only knobs.
  int batch = 32;
  int hidden = 64;
  long long warmup = 1000;
  long long target_sync_period = 500;
  std::uint64_t seed = 0;
};

// Tabular teacher: product-state Q-table plus the augmented replay it
// collected.
struct TabularTeacher {
  rl::TabularQ q{1};
  std::vector<TabularExp> buffer;
  int num_automaton_states = 0;
  double gamma = 0.99;

  void save_dir(const std::string& dir) const;
  static TabularTeacher load_dir(const std::string& dir);
};

// DQN teacher: dueling network over encoded product states plus its replay.
struct NeuralTeacher {
  neural::DuelingQ q{1, 1, 1, 0};
  std::vector<NeuralExp> buffer;
  int num_automaton_states = 0;
  double gamma = 0.99;

  void save_dir(const std::string& dir) const;
  static NeuralTeacher load_dir(const std::string& dir);
};

TabularTeacher train_teacher_tabular(envs::Env& env, const TeacherConfig& cfg);
NeuralTeacher train_teacher_dqn(envs::Env& env, const TeacherConfig& cfg);

// Dynamic transfer: average the frozen teacher's Q(s, a) over buffered
// experiences grouped by automaton transition (omega, L(s')).
rl::TeacherTable distill_dynamic(const TabularTeacher& teacher);
rl::TeacherTable distill_dynamic(const NeuralTeacher& teacher);

enum class StaticMode { value_iteration, q_learning };

// Static transfer: solve the abstract MDP over the automaton directly.
rl::TeacherTable distill_static(const ltlf::Dfa& d,
                                const automata::TransitionReward& reward,
                                double gamma,
                                StaticMode mode = StaticMode::value_iteration,
                                std::uint64_t seed = 0,
                                long long q_steps = 200000);

// Abstract reward used both for static distillation and CRM counterfactual
// reward recomputation: step penalty everywhere, bonus on entering an
// accepting state.
automata::TransitionReward accept_reward(const ltlf::Dfa& d,
                                         double step_reward = -0.1,
                                         double accept_bonus = 100.0);

enum class Baseline {
  none,     // automaton distillation: product representation + teacher blend
  vanilla,  // environment state only, no automaton, no teacher
  product,  // product representation, no teacher
  crm       // product representation + counterfactual experiences
};

std::string to_string(Baseline b);
Baseline baseline_from_string(const std::string& s);

struct StudentConfig {
  long long max_steps = 300000;
  double gamma = 0.99;
  double alpha = 0.1;  // tabular step size
  double rho = 0.999;
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  double epsilon_fraction = 0.2;
  Baseline baseline = Baseline::none;
  // Replay/network knobs (dqn, td3).
  std::size_t buffer_capacity = 200000;
  int batch = 32;
  int hidden = 64;
  long long warmup = 1000;
  long long target_sync_period = 500;
  // CRM reward projection.
  double crm_step_reward = -0.1;
  double crm_accept_reward = 100.0;
  // Early stop: moving-average return within 2% of its running max for
  // 20k consecutive steps. Disabled when convergence_window <= 0.
  long long convergence_window = 0;
  std::uint64_t seed = 0;
};

struct EpisodeRecord {
  int episode = 0;          // 1-based
  long long env_steps = 0;  // cumulative environment steps at episode end
  double ret = 0.0;         // undiscounted environment return
  double moving_avg = 0.0;  // window-100 moving average of returns
  double wall_clock = 0.0;  // seconds since training start
};

struct StudentResult {
  std::vector<EpisodeRecord> episodes;
  long long total_steps = 0;
  bool converged_early = false;

  // First episode whose moving average reaches the threshold; nullopt if
  // never reached.
  std::optional<int> first_episode_reaching(double threshold) const;
  // First cumulative step count at which an episode completed the objective.
  std::optional<long long> first_completion_step() const;

 public:
  std::vector<long long> completion_steps;  // env_steps of completed episodes
};

StudentResult train_student_tabular(envs::Env& env,
                                    const rl::TeacherTable* teacher,
                                    const StudentConfig& cfg);
StudentResult train_student_dqn(envs::Env& env, const rl::TeacherTable* teacher,
                                const StudentConfig& cfg);
StudentResult train_student_td3(envs::Env& env, const rl::TeacherTable* teacher,
                                const StudentConfig& cfg,
                                neural::Td3Config td3 = {});

}  // namespace autodistill::distill
