#include <autodistill/distill/distill.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <deque>
#include <filesystem>
#include <fstream>
#include <random>
#include <stdexcept>

#include <autodistill/rl/replay.hpp>

namespace autodistill::distill {

namespace fs = std::filesystem;

double epsilon_at(long long step, long long total_steps, double start,
                  double end, double fraction) {
  long long anneal = static_cast<long long>(fraction * total_steps);
  if (anneal <= 0 || step >= anneal) return end;
  double t = static_cast<double>(step) / static_cast<double>(anneal);
  return start + t * (end - start);
}

std::string to_string(Baseline b) {
  switch (b) {
    case Baseline::none: return "none";
    case Baseline::vanilla: return "vanilla";
    case Baseline::product: return "product";
    case Baseline::crm: return "crm";
  }
  return "none";
}

Baseline baseline_from_string(const std::string& s) {
  if (s == "none") return Baseline::none;
  if (s == "vanilla") return Baseline::vanilla;
  if (s == "product") return Baseline::product;
  if (s == "crm") return Baseline::crm;
  throw std::invalid_argument("unknown baseline: " + s);
}

automata::TransitionReward accept_reward(const ltlf::Dfa& d, double step_reward,
                                         double accept_bonus) {
  return [&d, step_reward, accept_bonus](int from, ltlf::Label, int to) {
    return step_reward +
           ((d.accepting(to) && !d.accepting(from)) ? accept_bonus : 0.0);
  };
}

// ---------------------------------------------------------------------------
// Teacher training

TabularTeacher train_teacher_tabular(envs::Env& env, const TeacherConfig& cfg) {
  const int n_omega = env.dfa().num_states();
  TabularTeacher teacher;
  teacher.q = rl::TabularQ(env.num_actions());
  teacher.num_automaton_states = n_omega;
  teacher.gamma = cfg.gamma;
  teacher.buffer.reserve(
      std::min<std::size_t>(cfg.buffer_capacity,
                            static_cast<std::size_t>(cfg.steps)));

  std::mt19937_64 rng(cfg.seed);
  env.reset();
  for (long long t = 0; t < cfg.steps; ++t) {
    std::uint64_t s = env.state_id();
    int omega = env.omega();
    std::uint64_t key = product_key(s, omega, n_omega);
    double eps = epsilon_at(t, cfg.steps, cfg.epsilon_start, cfg.epsilon_end,
                            cfg.epsilon_fraction);
    int a = teacher.q.select_action(key, eps, rng);
    envs::StepResult r = env.step(a);

    std::uint64_t s2 = env.state_id();
    std::uint64_t key2 = product_key(s2, r.omega, n_omega);
    // Bootstrapping stops at objective completion only; timeouts are
    // truncations, not terminal states.
    teacher.q.automaton_update(key, a, r.reward, key2, r.completed, cfg.alpha,
                               0.0, std::nullopt, cfg.gamma);

    TabularExp e;
    e.s = s;
    e.omega = omega;
    e.a = a;
    e.r = r.reward;
    e.s_next = s2;
    e.omega_next = r.omega;
    e.done = r.completed;
    e.label_next = r.label;
    if (teacher.buffer.size() < cfg.buffer_capacity)
      teacher.buffer.push_back(e);
    else
      teacher.buffer[static_cast<std::size_t>(t) % cfg.buffer_capacity] = e;

    if (r.done) env.reset();
  }
  return teacher;
}

NeuralTeacher train_teacher_dqn(envs::Env& env, const TeacherConfig& cfg) {
  const int n_omega = env.dfa().num_states();
  const int n_actions = env.num_actions();
  const int input_dim = env.feature_dim() + n_omega;

  NeuralTeacher teacher;
  teacher.q = neural::DuelingQ(input_dim, n_actions, cfg.hidden, cfg.seed);
  teacher.num_automaton_states = n_omega;
  teacher.gamma = cfg.gamma;

  neural::TargetNetwork<neural::DuelingQ> target(teacher.q);
  neural::Adam opt(teacher.q.num_parameters());
  rl::ReplayBuffer<NeuralExp> replay(cfg.buffer_capacity);

  std::mt19937_64 rng(cfg.seed);
  std::uniform_int_distribution<int> random_action(0, n_actions - 1);
  std::uniform_real_distribution<double> coin(0.0, 1.0);

  env.reset();
  for (long long t = 0; t < cfg.steps; ++t) {
    Eigen::VectorXd s =
        neural::encode_product_state(env.features(), env.omega(), n_omega);
    int omega = env.omega();
    double eps = epsilon_at(t, cfg.steps, cfg.epsilon_start, cfg.epsilon_end,
                            cfg.epsilon_fraction);
    int a;
    if (coin(rng) < eps) {
      a = random_action(rng);
    } else {
      Eigen::VectorXd qv = teacher.q.q(s);
      a = static_cast<int>(
          std::max_element(qv.data(), qv.data() + qv.size()) - qv.data());
    }
    envs::StepResult r = env.step(a);
    Eigen::VectorXd s2 =
        neural::encode_product_state(env.features(), r.omega, n_omega);

    NeuralExp e;
    e.s = s;
    e.omega = omega;
    e.a = a;
    e.r = r.reward;
    e.s_next = s2;
    e.omega_next = r.omega;
    e.done = r.completed;
    e.label_next = r.label;
    replay.append(e);

    if (t >= cfg.warmup) {
      auto idx = replay.sample(static_cast<std::size_t>(cfg.batch), rng);
      const auto m = static_cast<Eigen::Index>(idx.size());
      Eigen::MatrixXd S(input_dim, m);
      Eigen::VectorXd targets(m), weights(m);
      std::vector<int> acts(idx.size());
      for (Eigen::Index i = 0; i < m; ++i) {
        const NeuralExp& x = replay[idx[static_cast<std::size_t>(i)]];
        S.col(i) = x.s;
        acts[static_cast<std::size_t>(i)] = x.a;
        double max_next = target.net().q(x.s_next).maxCoeff();
        targets[i] = rl::dqn_target(x.r, x.done, cfg.gamma, max_next);
        weights[i] = replay.priority(idx[static_cast<std::size_t>(i)]);
      }
      neural::DuelingQ::Cache cache;
      Eigen::MatrixXd pred = teacher.q.q(S, cache);
      Eigen::MatrixXd dQ = Eigen::MatrixXd::Zero(n_actions, m);
      for (Eigen::Index i = 0; i < m; ++i) {
        double td = pred(acts[static_cast<std::size_t>(i)], i) - targets[i];
        dQ(acts[static_cast<std::size_t>(i)], i) =
            2.0 * weights[i] * td / static_cast<double>(m);
        replay.set_priority(idx[static_cast<std::size_t>(i)], td * td);
      }
      Eigen::VectorXd grad = teacher.q.backward(cache, dQ);
      Eigen::VectorXd theta = teacher.q.parameters();
      opt.step(theta, grad);
      teacher.q.set_parameters(theta);
      if ((t + 1) % cfg.target_sync_period == 0) target.hard_copy(teacher.q);
    }

    if (r.done) env.reset();
  }

  teacher.buffer.reserve(replay.size());
  for (std::size_t i = 0; i < replay.size(); ++i)
    teacher.buffer.push_back(replay[i]);
  return teacher;
}

// ---------------------------------------------------------------------------
// Distillation

rl::TeacherTable distill_dynamic(const TabularTeacher& teacher) {
  if (teacher.buffer.empty())
    throw std::invalid_argument("teacher buffer is empty; nothing to distill");
  rl::TransitionStats stats;
  for (const TabularExp& e : teacher.buffer) {
    double q = teacher.q.q(
        product_key(e.s, e.omega, teacher.num_automaton_states), e.a);
    stats.add(e.omega, e.label_next, q);
  }
  return rl::TeacherTable::from_stats(stats, rl::Provenance::dynamic_replay);
}

rl::TeacherTable distill_dynamic(const NeuralTeacher& teacher) {
  if (teacher.buffer.empty())
    throw std::invalid_argument("teacher buffer is empty; nothing to distill");
  rl::TransitionStats stats;
  for (const NeuralExp& e : teacher.buffer) {
    double q = teacher.q.q(e.s)[e.a];
    stats.add(e.omega, e.label_next, q);
  }
  return rl::TeacherTable::from_stats(stats, rl::Provenance::dynamic_replay);
}

rl::TeacherTable distill_static(const ltlf::Dfa& d,
                                const automata::TransitionReward& reward,
                                double gamma, StaticMode mode,
                                std::uint64_t seed, long long q_steps) {
  automata::AbstractMdp m = automata::AbstractMdp::build(d, reward);
  rl::TeacherTable table(rl::Provenance::static_abstract);
  if (mode == StaticMode::value_iteration) {
    auto vi = automata::value_iteration(m, gamma, 1e-12);
    for (int s = 0; s < m.num_states(); ++s) {
      if (m.terminal(s)) continue;
      for (const auto& act : m.actions(s))
        table.set(m.automaton_state(s), act.sigma,
                  act.reward + gamma * vi.v[act.next]);
    }
  } else {
    auto qt = automata::abstract_q_learning(m, gamma, 0.1, q_steps, seed);
    for (int s = 0; s < m.num_states(); ++s) {
      if (m.terminal(s)) continue;
      const auto& acts = m.actions(s);
      for (std::size_t i = 0; i < acts.size(); ++i)
        table.set(m.automaton_state(s), acts[i].sigma, qt.q[s][i]);
    }
  }
  return table;
}

// ---------------------------------------------------------------------------
// Student training

namespace {

class CurveTracker {
 public:
  explicit CurveTracker(long long convergence_window)
      : window_(convergence_window),
        start_(std::chrono::steady_clock::now()) {}

  void end_episode(StudentResult& out, long long total_steps, double ret,
                   bool completed) {
    returns_.push_back(ret);
    sum_ += ret;
    if (returns_.size() > 100) {
      sum_ -= returns_.front();
      returns_.pop_front();
    }
    EpisodeRecord rec;
    rec.episode = static_cast<int>(out.episodes.size()) + 1;
    rec.env_steps = total_steps;
    rec.ret = ret;
    rec.moving_avg = sum_ / static_cast<double>(returns_.size());
    rec.wall_clock =
        std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                      start_)
            .count();
    out.episodes.push_back(rec);
    if (completed) out.completion_steps.push_back(total_steps);

    if (rec.moving_avg > best_) best_ = rec.moving_avg;
    double slack = 0.02 * std::abs(best_);
    if (rec.moving_avg < best_ - slack) stable_since_ = total_steps;
  }

  bool converged(long long total_steps) const {
    return window_ > 0 && !returns_.empty() &&
           total_steps - stable_since_ >= window_;
  }

 private:
  long long window_;
  std::deque<double> returns_;
  double sum_ = 0.0;
  double best_ = -1e300;
  long long stable_since_ = 0;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace

std::optional<int> StudentResult::first_episode_reaching(
    double threshold) const {
  for (const EpisodeRecord& e : episodes)
    if (e.moving_avg >= threshold) return e.episode;
  return std::nullopt;
}

std::optional<long long> StudentResult::first_completion_step() const {
  if (completion_steps.empty()) return std::nullopt;
  return completion_steps.front();
}

StudentResult train_student_tabular(envs::Env& env,
                                    const rl::TeacherTable* teacher,
                                    const StudentConfig& cfg) {
  if (cfg.baseline == Baseline::vanilla && teacher)
    throw std::invalid_argument("vanilla baseline cannot take a teacher");
  const ltlf::Dfa& d = env.dfa();
  const int n_omega = d.num_states();
  const bool product = cfg.baseline != Baseline::vanilla;
  auto key_of = [&](std::uint64_t s, int omega) {
    return product ? product_key(s, omega, n_omega) : s;
  };
  automata::TransitionReward crm_reward =
      accept_reward(d, cfg.crm_step_reward, cfg.crm_accept_reward);

  rl::TabularQ q(env.num_actions());
  rl::AnnealState anneal(cfg.rho);
  rl::ReplayBuffer<TabularExp> replay(cfg.buffer_capacity);
  std::mt19937_64 rng(cfg.seed);

  StudentResult out;
  CurveTracker curve(cfg.convergence_window);
  double episode_return = 0.0;
  env.reset();
  for (long long t = 0; t < cfg.max_steps; ++t) {
    std::uint64_t s = env.state_id();
    int omega = env.omega();
    double eps = epsilon_at(t, cfg.max_steps, cfg.epsilon_start,
                            cfg.epsilon_end, cfg.epsilon_fraction);
    int a = q.select_action(key_of(s, omega), eps, rng);
    envs::StepResult r = env.step(a);
    episode_return += r.reward;
    std::uint64_t s2 = env.state_id();

    if (cfg.baseline == Baseline::vanilla) {
      // Plain online Q-learning; the automaton is ignored entirely.
      q.automaton_update(s, a, r.reward, s2, r.completed, cfg.alpha, 0.0,
                         std::nullopt, cfg.gamma);
    } else {
      TabularExp e;
      e.s = s;
      e.omega = omega;
      e.a = a;
      e.r = r.reward;
      e.s_next = s2;
      e.omega_next = r.omega;
      e.done = r.completed;
      e.label_next = r.label;
      if (cfg.baseline == Baseline::crm) {
        for (const TabularExp& c : rl::crm_experiences(e, d, crm_reward))
          replay.append(c);
      } else {
        replay.append(e);
      }

      if (replay.size() >= static_cast<std::size_t>(cfg.batch)) {
        auto idx = replay.sample(static_cast<std::size_t>(cfg.batch), rng);
        for (std::size_t i : idx) {
          const TabularExp& x = replay[i];
          std::uint64_t k = key_of(x.s, x.omega);
          double bootstrap =
              x.done ? x.r
                     : x.r + cfg.gamma * q.max_q(key_of(x.s_next, x.omega_next));
          double target = bootstrap;
          if (teacher) {
            double beta = anneal.beta(x.omega, x.label_next);
            target = rl::student_target(teacher->q(x.omega, x.label_next),
                                        beta, bootstrap);
            anneal.observe(x.omega, x.label_next);
          }
          double td = target - q.q(k, x.a);
          q.set(k, x.a, q.q(k, x.a) + cfg.alpha * td);
          replay.set_priority(i, std::max(td * td, 1e-8));
        }
      }
    }

    if (r.done) {
      curve.end_episode(out, t + 1, episode_return, r.completed);
      episode_return = 0.0;
      env.reset();
      if (curve.converged(t + 1)) {
        out.converged_early = true;
        out.total_steps = t + 1;
        return out;
      }
    }
  }
  out.total_steps = cfg.max_steps;
  return out;
}

StudentResult train_student_dqn(envs::Env& env, const rl::TeacherTable* teacher,
                                const StudentConfig& cfg) {
  if (cfg.baseline == Baseline::vanilla && teacher)
    throw std::invalid_argument("vanilla baseline cannot take a teacher");
  const ltlf::Dfa& d = env.dfa();
  const int n_omega = d.num_states();
  const int n_actions = env.num_actions();
  const bool product = cfg.baseline != Baseline::vanilla;
  const int input_dim = env.feature_dim() + (product ? n_omega : 0);
  auto encode = [&](const Eigen::VectorXd& f, int omega) {
    return product ? neural::encode_product_state(f, omega, n_omega) : f;
  };
  automata::TransitionReward crm_reward =
      accept_reward(d, cfg.crm_step_reward, cfg.crm_accept_reward);

  neural::DuelingQ net(input_dim, n_actions, cfg.hidden, cfg.seed);
  neural::TargetNetwork<neural::DuelingQ> target(net);
  neural::Adam opt(net.num_parameters());
  rl::ReplayBuffer<NeuralExp> replay(cfg.buffer_capacity);
  rl::AnnealState anneal(cfg.rho);

  std::mt19937_64 rng(cfg.seed);
  std::uniform_int_distribution<int> random_action(0, n_actions - 1);
  std::uniform_real_distribution<double> coin(0.0, 1.0);

  StudentResult out;
  CurveTracker curve(cfg.convergence_window);
  double episode_return = 0.0;
  env.reset();
  for (long long t = 0; t < cfg.max_steps; ++t) {
    Eigen::VectorXd f = env.features();
    int omega = env.omega();
    Eigen::VectorXd s = encode(f, omega);
    double eps = epsilon_at(t, cfg.max_steps, cfg.epsilon_start,
                            cfg.epsilon_end, cfg.epsilon_fraction);
    int a;
    if (coin(rng) < eps) {
      a = random_action(rng);
    } else {
      Eigen::VectorXd qv = net.q(s);
      a = static_cast<int>(
          std::max_element(qv.data(), qv.data() + qv.size()) - qv.data());
    }
    envs::StepResult r = env.step(a);
    episode_return += r.reward;
    Eigen::VectorXd f2 = env.features();

    NeuralExp e;
    e.omega = omega;
    e.a = a;
    e.omega_next = r.omega;
    e.label_next = r.label;
    if (cfg.baseline == Baseline::crm) {
      // Counterfactual copies from every automaton state, rewards
      // recomputed from the automaton transition.
      for (int w = 0; w < n_omega; ++w) {
        NeuralExp c = e;
        c.omega = w;
        c.omega_next = d.step(w, r.label);
        c.s = encode(f, w);
        c.s_next = encode(f2, c.omega_next);
        c.r = crm_reward(w, r.label, c.omega_next);
        c.done = d.accepting(c.omega_next);
        replay.append(c);
      }
    } else {
      e.s = s;
      e.s_next = encode(f2, r.omega);
      e.r = r.reward;
      e.done = r.completed;
      replay.append(e);
    }

    if (t >= cfg.warmup) {
      auto idx = replay.sample(static_cast<std::size_t>(cfg.batch), rng);
      const auto m = static_cast<Eigen::Index>(idx.size());
      Eigen::MatrixXd S(input_dim, m);
      Eigen::VectorXd targets(m), weights(m);
      std::vector<int> acts(idx.size());
      for (Eigen::Index i = 0; i < m; ++i) {
        const NeuralExp& x = replay[idx[static_cast<std::size_t>(i)]];
        S.col(i) = x.s;
        acts[static_cast<std::size_t>(i)] = x.a;
        double max_next = target.net().q(x.s_next).maxCoeff();
        double q_target = rl::dqn_target(x.r, x.done, cfg.gamma, max_next);
        if (teacher) {
          double beta = anneal.beta(x.omega, x.label_next);
          targets[i] =
              rl::student_target(teacher->q(x.omega, x.label_next), beta,
                                 q_target);
          anneal.observe(x.omega, x.label_next);
        } else {
          targets[i] = q_target;
        }
        weights[i] = replay.priority(idx[static_cast<std::size_t>(i)]);
      }
      neural::DuelingQ::Cache cache;
      Eigen::MatrixXd pred = net.q(S, cache);
      Eigen::MatrixXd dQ = Eigen::MatrixXd::Zero(n_actions, m);
      for (Eigen::Index i = 0; i < m; ++i) {
        double td = pred(acts[static_cast<std::size_t>(i)], i) - targets[i];
        dQ(acts[static_cast<std::size_t>(i)], i) =
            2.0 * weights[i] * td / static_cast<double>(m);
        replay.set_priority(idx[static_cast<std::size_t>(i)], td * td);
      }
      Eigen::VectorXd grad = net.backward(cache, dQ);
      Eigen::VectorXd theta = net.parameters();
      opt.step(theta, grad);
      net.set_parameters(theta);
      if ((t + 1) % cfg.target_sync_period == 0) target.hard_copy(net);
    }

    if (r.done) {
      curve.end_episode(out, t + 1, episode_return, r.completed);
      episode_return = 0.0;
      env.reset();
      if (curve.converged(t + 1)) {
        out.converged_early = true;
        out.total_steps = t + 1;
        return out;
      }
    }
  }
  out.total_steps = cfg.max_steps;
  return out;
}

StudentResult train_student_td3(envs::Env& env, const rl::TeacherTable* teacher,
                                const StudentConfig& cfg,
                                neural::Td3Config td3cfg) {
  if (cfg.baseline == Baseline::vanilla && teacher)
    throw std::invalid_argument("vanilla baseline cannot take a teacher");
  if (env.num_actions() != 0)
    throw std::invalid_argument("td3 requires a continuous environment");
  const ltlf::Dfa& d = env.dfa();
  const int n_omega = d.num_states();
  const bool product = cfg.baseline != Baseline::vanilla;
  const int input_dim = env.feature_dim() + (product ? n_omega : 0);
  auto encode = [&](const Eigen::VectorXd& f, int omega) {
    return product ? neural::encode_product_state(f, omega, n_omega) : f;
  };

  td3cfg.gamma = cfg.gamma;
  td3cfg.hidden = cfg.hidden;
  const double cap = 0.5;  // environment action limit, cm per axis
  neural::Td3 agent(input_dim, 2, cap, cfg.seed, td3cfg);
  rl::ReplayBuffer<ContExp> replay(cfg.buffer_capacity);
  rl::AnnealState anneal(cfg.rho);

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> uniform_action(-cap, cap);

  StudentResult out;
  CurveTracker curve(cfg.convergence_window);
  double episode_return = 0.0;
  env.reset();
  for (long long t = 0; t < cfg.max_steps; ++t) {
    Eigen::VectorXd s = encode(env.features(), env.omega());
    int omega = env.omega();
    Eigen::Vector2d a;
    if (t < cfg.warmup) {
      a = Eigen::Vector2d(uniform_action(rng), uniform_action(rng));
    } else {
      a = agent.act_noisy(s, rng);
    }
    envs::StepResult r = env.step(a);
    episode_return += r.reward;

    ContExp e;
    e.s = s;
    e.omega = omega;
    e.a = a;
    e.r = r.reward;
    e.s_next = encode(env.features(), r.omega);
    e.omega_next = r.omega;
    e.done = r.completed;
    e.label_next = r.label;
    replay.append(e);

    if (t >= cfg.warmup) {
      auto idx = replay.sample(static_cast<std::size_t>(cfg.batch), rng);
      const auto m = static_cast<Eigen::Index>(idx.size());
      Eigen::MatrixXd S(input_dim, m), A(2, m);
      Eigen::VectorXd targets(m), weights(m);
      for (Eigen::Index i = 0; i < m; ++i) {
        const ContExp& x = replay[idx[static_cast<std::size_t>(i)]];
        S.col(i) = x.s;
        A.col(i) = x.a;
        double boot = agent.target_q(x.s_next, rng);
        double q_target = rl::td3_target(x.r, x.done, cfg.gamma, boot, boot,
                                         true);
        if (teacher) {
          double beta = anneal.beta(x.omega, x.label_next);
          targets[i] = rl::student_target(teacher->q(x.omega, x.label_next),
                                          beta, q_target);
          anneal.observe(x.omega, x.label_next);
        } else {
          targets[i] = q_target;
        }
        weights[i] = replay.priority(idx[static_cast<std::size_t>(i)]);
      }
      Eigen::VectorXd td = agent.train_step(S, A, targets, weights);
      for (Eigen::Index i = 0; i < m; ++i)
        replay.set_priority(idx[static_cast<std::size_t>(i)], td[i] * td[i]);
    }

    if (r.done) {
      curve.end_episode(out, t + 1, episode_return, r.completed);
      episode_return = 0.0;
      env.reset();
      if (curve.converged(t + 1)) {
        out.converged_early = true;
        out.total_steps = t + 1;
        return out;
      }
    }
  }
  out.total_steps = cfg.max_steps;
  return out;
}

// ---------------------------------------------------------------------------
// Teacher persistence

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void TabularTeacher::save_dir(const std::string& dir) const {
  fs::create_directories(dir);
  {
    std::ofstream meta(dir + "/meta.txt");
    meta << "tabular-teacher v1\n";
    meta << "automaton_states " << num_automaton_states << "\n";
    meta << "gamma " << fmt(gamma) << "\n";
    meta << "actions " << q.num_actions() << "\n";
  }
  {
    // The Q-table is reconstructible from the buffer keys actually used;
    // persist only the entries the buffer references plus greedy values.
    std::ofstream out(dir + "/buffer.txt");
    out << "replay v1\n" << buffer.size() << "\n";
    for (const TabularExp& e : buffer) {
      out << e.s << " " << e.omega << " " << e.a << " " << fmt(e.r) << " "
          << e.s_next << " " << e.omega_next << " " << (e.done ? 1 : 0) << " "
          << e.label_next;
      // Frozen teacher evaluation for this (s, omega, a), so distillation
      // can run without the full table.
      out << " "
          << fmt(q.q(product_key(e.s, e.omega, num_automaton_states), e.a))
          << "\n";
    }
  }
}

TabularTeacher TabularTeacher::load_dir(const std::string& dir) {
  TabularTeacher t;
  std::ifstream meta(dir + "/meta.txt");
  if (!meta) throw std::runtime_error("cannot open: " + dir + "/meta.txt");
  std::string header, word;
  std::getline(meta, header);
  if (header != "tabular-teacher v1")
    throw std::runtime_error("unrecognized teacher header: " + header);
  int actions = 0;
  meta >> word >> t.num_automaton_states >> word >> t.gamma >> word >> actions;
  t.q = rl::TabularQ(actions);

  std::ifstream in(dir + "/buffer.txt");
  if (!in) throw std::runtime_error("cannot open: " + dir + "/buffer.txt");
  std::getline(in, header);
  if (header != "replay v1")
    throw std::runtime_error("unrecognized replay header: " + header);
  std::size_t n = 0;
  in >> n;
  t.buffer.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    TabularExp e;
    int done = 0;
    double qv = 0.0;
    if (!(in >> e.s >> e.omega >> e.a >> e.r >> e.s_next >> e.omega_next >>
          done >> e.label_next >> qv))
      throw std::runtime_error("malformed replay entry");
    e.done = done != 0;
    t.buffer.push_back(e);
    t.q.set(product_key(e.s, e.omega, t.num_automaton_states), e.a, qv);
  }
  return t;
}

void NeuralTeacher::save_dir(const std::string& dir) const {
  fs::create_directories(dir);
  {
    std::ofstream meta(dir + "/meta.txt");
    meta << "neural-teacher v1\n";
    meta << "automaton_states " << num_automaton_states << "\n";
    meta << "gamma " << fmt(gamma) << "\n";
  }
  q.save_file(dir + "/weights");
  std::ofstream out(dir + "/buffer.bin", std::ios::binary);
  std::uint64_t n = buffer.size();
  std::uint64_t dim = buffer.empty() ? 0 : buffer.front().s.size();
  out.write(reinterpret_cast<const char*>(&n), sizeof(n));
  out.write(reinterpret_cast<const char*>(&dim), sizeof(dim));
  for (const NeuralExp& e : buffer) {
    out.write(reinterpret_cast<const char*>(e.s.data()),
              static_cast<std::streamsize>(dim * sizeof(double)));
    out.write(reinterpret_cast<const char*>(e.s_next.data()),
              static_cast<std::streamsize>(dim * sizeof(double)));
    std::int32_t fields[4] = {e.omega, e.a, e.omega_next,
                              static_cast<std::int32_t>(e.done)};
    out.write(reinterpret_cast<const char*>(fields), sizeof(fields));
    out.write(reinterpret_cast<const char*>(&e.r), sizeof(e.r));
    std::uint32_t label = e.label_next;
    out.write(reinterpret_cast<const char*>(&label), sizeof(label));
  }
  if (!out) throw std::runtime_error("write failed: " + dir + "/buffer.bin");
}

NeuralTeacher NeuralTeacher::load_dir(const std::string& dir) {
  NeuralTeacher t;
  std::ifstream meta(dir + "/meta.txt");
  if (!meta) throw std::runtime_error("cannot open: " + dir + "/meta.txt");
  std::string header, word;
  std::getline(meta, header);
  if (header != "neural-teacher v1")
    throw std::runtime_error("unrecognized teacher header: " + header);
  meta >> word >> t.num_automaton_states >> word >> t.gamma;
  t.q = neural::DuelingQ::load_file(dir + "/weights");

  std::ifstream in(dir + "/buffer.bin", std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + dir + "/buffer.bin");
  std::uint64_t n = 0, dim = 0;
  in.read(reinterpret_cast<char*>(&n), sizeof(n));
  in.read(reinterpret_cast<char*>(&dim), sizeof(dim));
  t.buffer.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    NeuralExp e;
    e.s.resize(static_cast<Eigen::Index>(dim));
    e.s_next.resize(static_cast<Eigen::Index>(dim));
    in.read(reinterpret_cast<char*>(e.s.data()),
            static_cast<std::streamsize>(dim * sizeof(double)));
    in.read(reinterpret_cast<char*>(e.s_next.data()),
            static_cast<std::streamsize>(dim * sizeof(double)));
    std::int32_t fields[4];
    in.read(reinterpret_cast<char*>(fields), sizeof(fields));
    in.read(reinterpret_cast<char*>(&e.r), sizeof(e.r));
    std::uint32_t label = 0;
    in.read(reinterpret_cast<char*>(&label), sizeof(label));
    if (!in) throw std::runtime_error("truncated replay file");
    e.omega = fields[0];
    e.a = fields[1];
    e.omega_next = fields[2];
    e.done = fields[3] != 0;
    e.label_next = label;
    t.buffer.push_back(std::move(e));
  }
  return t;
}

}  // namespace autodistill::distill
