#pragma once

#include <cstdint>
#include <random>

#include <autodistill/neural/mlp.hpp>

namespace autodistill::neural {

struct Td3Config {
  double gamma = 0.99;
  double tau_polyak = 0.005;
  double actor_lr = 1e-3;
  double critic_lr = 1e-3;
  double exploration_noise = 0.1;   // Gaussian sigma on behavior actions
  double policy_noise = 0.2;        // target-policy smoothing sigma
  double noise_clip = 0.5;
  bool single_critic = false;       // disable the twin minimum
  int hidden = 128;
};

// Actor update period: d = 4 during the first 20,000 training steps, d = 2
// afterwards.
inline int td3_actor_period(long long step) { return step < 20000 ? 4 : 2; }

// Twin-critic TD3 agent over continuous actions in [-cap, cap]^dim.
// Critics are updated on every call; the actor and all target networks are
// updated only on delayed steps following the d-schedule.
class Td3 {
 public:
  Td3(int state_dim, int action_dim, double action_cap, std::uint64_t seed,
      Td3Config config = {});

  int state_dim() const { return actor_.input_dim(); }
  int action_dim() const { return actor_.output_dim(); }
  double action_cap() const { return action_cap_; }
  const Td3Config& config() const { return config_; }
  long long steps() const { return steps_; }

  Eigen::VectorXd act(const Eigen::VectorXd& s) const;
  Eigen::VectorXd act_noisy(const Eigen::VectorXd& s, std::mt19937_64& rng) const;

  // Bootstrap value for the critic targets: twin-minimum target
  // critic evaluated at the smoothed target action (caller adds r + gamma*).
  double target_q(const Eigen::VectorXd& s_next, std::mt19937_64& rng) const;

  // One critic regression step towards per-sample targets, with per-sample
  // gradient weights (Alg. 1 weights by priority p_i). Returns the TD errors
  // target - Q1(s, a) for priority updates. Internally advances the step
  // counter and performs the delayed actor/target update when due.
  Eigen::VectorXd train_step(const Eigen::MatrixXd& states,
                             const Eigen::MatrixXd& actions,
                             const Eigen::VectorXd& targets,
                             const Eigen::VectorXd& weights);

  double critic1_value(const Eigen::VectorXd& s, const Eigen::VectorXd& a) const;

  const Mlp& actor() const { return actor_; }
  const Mlp& target_actor() const { return target_actor_.net(); }

 private:
  static Eigen::MatrixXd stack(const Eigen::MatrixXd& states,
                               const Eigen::MatrixXd& actions);
  void actor_step(const Eigen::MatrixXd& states);

  Td3Config config_;
  double action_cap_;
  Mlp actor_, critic1_, critic2_;
  TargetNetwork<Mlp> target_actor_, target_critic1_, target_critic2_;
  Adam actor_opt_, critic1_opt_, critic2_opt_;
  long long steps_ = 0;
};

}  // namespace autodistill::neural
