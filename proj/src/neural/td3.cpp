#include <autodistill/neural/td3.hpp>

#include <algorithm>
#include <stdexcept>

namespace autodistill::neural {

Td3::Td3(int state_dim, int action_dim, double action_cap, std::uint64_t seed,
         Td3Config config)
    : config_(config),
      action_cap_(action_cap),
      actor_({state_dim, config.hidden, config.hidden, action_dim}, seed,
             Output::tanh_scaled, action_cap),
      critic1_({state_dim + action_dim, config.hidden, config.hidden, 1},
               seed + 101),
      critic2_({state_dim + action_dim, config.hidden, config.hidden, 1},
               seed + 202),
      target_actor_(actor_),
      target_critic1_(critic1_),
      target_critic2_(critic2_),
      actor_opt_(actor_.num_parameters(), config.actor_lr),
      critic1_opt_(critic1_.num_parameters(), config.critic_lr),
      critic2_opt_(critic2_.num_parameters(), config.critic_lr) {
  if (action_cap <= 0.0)
    throw std::invalid_argument("action cap must be positive");
}

Eigen::VectorXd Td3::act(const Eigen::VectorXd& s) const {
  return actor_.forward(s);
}

Eigen::VectorXd Td3::act_noisy(const Eigen::VectorXd& s,
                               std::mt19937_64& rng) const {
  Eigen::VectorXd a = act(s);
  std::normal_distribution<double> noise(0.0, config_.exploration_noise);
  for (int i = 0; i < a.size(); ++i)
    a[i] = std::clamp(a[i] + noise(rng), -action_cap_, action_cap_);
  return a;
}

double Td3::target_q(const Eigen::VectorXd& s_next,
                     std::mt19937_64& rng) const {
  Eigen::VectorXd a = target_actor_.net().forward(s_next);
  std::normal_distribution<double> noise(0.0, config_.policy_noise);
  for (int i = 0; i < a.size(); ++i) {
    double n = std::clamp(noise(rng), -config_.noise_clip, config_.noise_clip);
    a[i] = std::clamp(a[i] + n, -action_cap_, action_cap_);
  }
  Eigen::VectorXd sa(s_next.size() + a.size());
  sa << s_next, a;
  double q1 = target_critic1_.net().forward(sa)[0];
  if (config_.single_critic) return q1;
  double q2 = target_critic2_.net().forward(sa)[0];
  return std::min(q1, q2);
}

Eigen::MatrixXd Td3::stack(const Eigen::MatrixXd& states,
                           const Eigen::MatrixXd& actions) {
  Eigen::MatrixXd sa(states.rows() + actions.rows(), states.cols());
  sa << states, actions;
  return sa;
}

double Td3::critic1_value(const Eigen::VectorXd& s,
                          const Eigen::VectorXd& a) const {
  Eigen::VectorXd sa(s.size() + a.size());
  sa << s, a;
  return critic1_.forward(sa)[0];
}

Eigen::VectorXd Td3::train_step(const Eigen::MatrixXd& states,
                                const Eigen::MatrixXd& actions,
                                const Eigen::VectorXd& targets,
                                const Eigen::VectorXd& weights) {
  const auto m = states.cols();
  if (actions.cols() != m || targets.size() != m || weights.size() != m)
    throw std::invalid_argument("batch size mismatch");

  Eigen::MatrixXd sa = stack(states, actions);
  Eigen::VectorXd td;
  for (Mlp* critic : {&critic1_, &critic2_}) {
    Adam& opt = critic == &critic1_ ? critic1_opt_ : critic2_opt_;
    Mlp::Cache cache;
    Eigen::MatrixXd pred = critic->forward(sa, cache);
    // Weighted squared-error loss (1/M) sum_i p_i (pred_i - target_i)^2.
    Eigen::MatrixXd dY(1, m);
    for (Eigen::Index i = 0; i < m; ++i)
      dY(0, i) = 2.0 * weights[i] * (pred(0, i) - targets[i]) /
                 static_cast<double>(m);
    Eigen::VectorXd grad = critic->backward(cache, dY);
    Eigen::VectorXd theta = critic->parameters();
    opt.step(theta, grad);
    critic->set_parameters(theta);
    if (critic == &critic1_)
      td = (targets.transpose() - pred.row(0)).transpose();
  }

  ++steps_;
  if (steps_ % td3_actor_period(steps_) == 0) {
    actor_step(states);
    target_actor_.polyak(actor_, config_.tau_polyak);
    target_critic1_.polyak(critic1_, config_.tau_polyak);
    target_critic2_.polyak(critic2_, config_.tau_polyak);
  }
  return td;
}

void Td3::actor_step(const Eigen::MatrixXd& states) {
  const auto m = states.cols();
  Mlp::Cache actor_cache;
  Eigen::MatrixXd a = actor_.forward(states, actor_cache);

  // Ascend (1/M) sum_i Q1(s_i, pi(s_i)): backprop through the critic to get
  // dQ/da, then through the actor; the critic's own parameters are frozen.
  Mlp::Cache critic_cache;
  Eigen::MatrixXd sa = stack(states, a);
  critic1_.forward(sa, critic_cache);
  Eigen::MatrixXd ones =
      Eigen::MatrixXd::Constant(1, m, -1.0 / static_cast<double>(m));
  Eigen::MatrixXd dsa;
  critic1_.backward(critic_cache, ones, &dsa);
  Eigen::MatrixXd da = dsa.bottomRows(a.rows());

  Eigen::VectorXd grad = actor_.backward(actor_cache, da);
  Eigen::VectorXd phi = actor_.parameters();
  actor_opt_.step(phi, grad);
  actor_.set_parameters(phi);
}

}  // namespace autodistill::neural
