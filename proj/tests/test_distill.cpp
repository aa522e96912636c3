#include "doctest.h"

#include <cstdio>
#include <filesystem>

#include <autodistill/distill/distill.hpp>
#include "fixtures.hpp"

using namespace autodistill::distill;
namespace ltlf = autodistill::ltlf;
namespace envs = autodistill::envs;
namespace rl = autodistill::rl;
using autodistill::testing::two_trace_dfa;

namespace {

envs::EnvSpec grid_spec(envs::EnvKind kind, int w, int h, std::uint64_t seed,
                        int max_steps = 0) {
  envs::EnvSpec spec;
  spec.kind = kind;
  spec.geometry = envs::Geometry::grid(w, h);
  spec.seed = seed;
  spec.max_steps = max_steps;
  return spec;
}

}  // namespace

TEST_CASE("epsilon schedule") {
  CHECK(epsilon_at(0, 1000, 1.0, 0.05, 0.2) == doctest::Approx(1.0));
  CHECK(epsilon_at(100, 1000, 1.0, 0.05, 0.2) == doctest::Approx(0.525));
  CHECK(epsilon_at(200, 1000, 1.0, 0.05, 0.2) == doctest::Approx(0.05));
  CHECK(epsilon_at(999, 1000, 1.0, 0.05, 0.2) == doctest::Approx(0.05));
  CHECK(epsilon_at(5, 1000, 1.0, 0.05, 0.0) == doctest::Approx(0.05));
}

TEST_CASE("dynamic distillation averages frozen teacher Q-values") {
  // Two buffer entries sharing (omega0, {wood}) with teacher Q-values 2 and
  // 4 must yield eta = 2, Q^avg = 3.
  TabularTeacher teacher;
  teacher.q = rl::TabularQ(2);
  teacher.num_automaton_states = 4;

  TabularExp e1;
  e1.s = 11;
  e1.omega = 0;
  e1.a = 1;
  e1.label_next = 0b1;
  TabularExp e2 = e1;
  e2.s = 12;
  e2.a = 0;
  teacher.q.set(product_key(11, 0, 4), 1, 2.0);
  teacher.q.set(product_key(12, 0, 4), 0, 4.0);
  teacher.buffer = {e1, e2};

  rl::TeacherTable table = distill_dynamic(teacher);
  CHECK(table.provenance() == rl::Provenance::dynamic_replay);
  CHECK(table.q(0, 0b1) == doctest::Approx(3.0));
  CHECK(table.eta(0, 0b1) == 2);
  CHECK_FALSE(table.q(1, 0b1).has_value());  // unobserved transition absent

  teacher.buffer.clear();
  CHECK_THROWS_AS(distill_dynamic(teacher), std::invalid_argument);
}

TEST_CASE("static distillation prefers the short trace at the start state") {
  ltlf::Dfa d = two_trace_dfa();
  auto table = distill_static(d, accept_reward(d, 0.0, 1.0), 0.9);
  CHECK(table.provenance() == rl::Provenance::static_abstract);
  const ltlf::Label a = 1 << 0, c = 1 << 2;
  REQUIRE(table.q(0, a).has_value());
  REQUIRE(table.q(0, c).has_value());
  CHECK(*table.q(0, a) > *table.q(0, c));
  CHECK(table.eta(0, a) == 0);  // annealing driven by student sampling

  // All-zero rewards give an all-zero table.
  auto zero = distill_static(
      d, [](int, ltlf::Label, int) { return 0.0; }, 0.9);
  for (const auto& e : zero.entries()) CHECK(e.q_sum == 0.0);

  // Abstract Q-learning agrees with value iteration within tolerance.
  auto ql = distill_static(d, accept_reward(d, 0.0, 1.0), 0.9,
                           StaticMode::q_learning, 7, 400000);
  for (const auto& e : table.entries()) {
    REQUIRE(ql.q(e.omega, e.sigma).has_value());
    CHECK(*ql.q(e.omega, e.sigma) ==
          doctest::Approx(e.q_sum).epsilon(0.05));
  }
}

TEST_CASE("tabular teacher learns a small dungeon and distills cleanly") {
  auto env = envs::make_env(grid_spec(envs::EnvKind::dungeon_quest, 5, 5, 3));
  TeacherConfig cfg;
  cfg.steps = 150000;
  cfg.gamma = 0.99;
  cfg.seed = 3;
  TabularTeacher teacher = train_teacher_tabular(*env, cfg);
  CHECK(teacher.buffer.size() == std::min<std::size_t>(
                                     cfg.buffer_capacity,
                                     static_cast<std::size_t>(cfg.steps)));

  // Greedy rollouts complete the objective at least 95% of the time.
  int completed = 0;
  const int n_omega = teacher.num_automaton_states;
  for (int ep = 0; ep < 100; ++ep) {
    env->reset();
    while (!env->done()) {
      std::uint64_t key =
          product_key(env->state_id(), env->omega(), n_omega);
      envs::StepResult r = env->step(teacher.q.argmax(key));
      if (r.completed) ++completed;
    }
  }
  CHECK(completed >= 95);

  // Distilled table covers the transitions the teacher exercised, and
  // persistence round-trips to an identical distillation result.
  rl::TeacherTable table = distill_dynamic(teacher);
  CHECK(table.size() > 0);

  std::string dir = "/tmp/autodistill_test_teacher";
  teacher.save_dir(dir);
  TabularTeacher loaded = TabularTeacher::load_dir(dir);
  CHECK(loaded.buffer.size() == teacher.buffer.size());
  rl::TeacherTable table2 = distill_dynamic(loaded);
  CHECK(table2.size() == table.size());
  for (const auto& e : table.entries()) {
    REQUIRE(table2.q(e.omega, e.sigma).has_value());
    CHECK(*table2.q(e.omega, e.sigma) == e.q_sum);
    CHECK(table2.eta(e.omega, e.sigma) == e.eta);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("vanilla student matches a plain Q-learning oracle trajectory") {
  // With no teacher and no automaton in the state, the student must follow
  // exactly the trajectory of textbook Q-learning under the same seed.
  auto spec = grid_spec(envs::EnvKind::blind_craftsman, 7, 7, 9);
  StudentConfig cfg;
  cfg.max_steps = 20000;
  cfg.baseline = Baseline::vanilla;
  cfg.seed = 42;
  auto env = envs::make_env(spec);
  StudentResult got = train_student_tabular(*env, nullptr, cfg);

  auto env2 = envs::make_env(spec);
  rl::TabularQ q(env2->num_actions());
  std::mt19937_64 rng(cfg.seed);
  std::vector<double> returns;
  double ep_ret = 0.0;
  env2->reset();
  for (long long t = 0; t < cfg.max_steps; ++t) {
    std::uint64_t s = env2->state_id();
    double eps = epsilon_at(t, cfg.max_steps, cfg.epsilon_start,
                            cfg.epsilon_end, cfg.epsilon_fraction);
    int a = q.select_action(s, eps, rng);
    envs::StepResult r = env2->step(a);
    ep_ret += r.reward;
    double boot = r.completed ? r.reward
                              : r.reward + cfg.gamma * q.max_q(env2->state_id());
    q.set(s, a, (1 - cfg.alpha) * q.q(s, a) + cfg.alpha * boot);
    if (r.done) {
      returns.push_back(ep_ret);
      ep_ret = 0.0;
      env2->reset();
    }
  }
  REQUIRE(got.episodes.size() == returns.size());
  for (std::size_t i = 0; i < returns.size(); ++i)
    CHECK(got.episodes[i].ret == returns[i]);

  CHECK_THROWS_AS(
      [&] {
        rl::TeacherTable t;
        auto env3 = envs::make_env(spec);
        train_student_tabular(*env3, &t, cfg);
      }(),
      std::invalid_argument);
}

TEST_CASE("student runs are deterministic per seed") {
  auto spec = grid_spec(envs::EnvKind::blind_craftsman, 7, 7, 4);
  StudentConfig cfg;
  cfg.max_steps = 15000;
  cfg.baseline = Baseline::product;
  cfg.seed = 5;
  auto e1 = envs::make_env(spec);
  auto e2 = envs::make_env(spec);
  StudentResult a = train_student_tabular(*e1, nullptr, cfg);
  StudentResult b = train_student_tabular(*e2, nullptr, cfg);
  REQUIRE(a.episodes.size() == b.episodes.size());
  for (std::size_t i = 0; i < a.episodes.size(); ++i) {
    CHECK(a.episodes[i].ret == b.episodes[i].ret);
    CHECK(a.episodes[i].env_steps == b.episodes[i].env_steps);
    CHECK(a.episodes[i].moving_avg == b.episodes[i].moving_avg);
  }
}

TEST_CASE("distilled teacher accelerates a tabular student") {
  // Teacher on a 7x7 layout, student on a larger 10x10 layout: Q-values
  // transfer through the automaton alone. Short episode caps make random
  // completions scarce, which is where replayed teacher targets help most.
  auto tenv = envs::make_env(grid_spec(envs::EnvKind::dungeon_quest, 7, 7, 1));
  TeacherConfig tcfg;
  tcfg.steps = 200000;
  tcfg.gamma = 0.8;
  tcfg.seed = 1;
  TabularTeacher teacher = train_teacher_tabular(*tenv, tcfg);
  rl::TeacherTable table = distill_dynamic(teacher);

  StudentConfig cfg;
  cfg.max_steps = 300000;
  cfg.rho = 0.9;
  cfg.epsilon_fraction = 0.03;
  for (std::uint64_t trial : {7, 8}) {
    cfg.seed = 100 + trial;
    auto sspec = grid_spec(envs::EnvKind::dungeon_quest, 10, 10, 1000 + trial);
    sspec.max_steps = 100;

    auto senv = envs::make_env(sspec);
    cfg.baseline = Baseline::none;
    StudentResult with = train_student_tabular(*senv, &table, cfg);

    auto venv = envs::make_env(sspec);
    cfg.baseline = Baseline::vanilla;
    StudentResult without = train_student_tabular(*venv, nullptr, cfg);

    REQUIRE_FALSE(with.episodes.empty());
    REQUIRE_FALSE(without.episodes.empty());
    auto hit_with = with.first_episode_reaching(90.0);
    auto hit_without = without.first_episode_reaching(90.0);
    REQUIRE(hit_with.has_value());
    REQUIRE(hit_without.has_value());
    CHECK(*hit_with < *hit_without);
  }
}

TEST_CASE("crm student trains on recomputed automaton rewards") {
  auto spec = grid_spec(envs::EnvKind::blind_craftsman, 7, 7, 2);
  StudentConfig cfg;
  cfg.max_steps = 15000;
  cfg.baseline = Baseline::crm;
  cfg.seed = 6;
  auto env = envs::make_env(spec);
  StudentResult res = train_student_tabular(*env, nullptr, cfg);
  CHECK_FALSE(res.episodes.empty());
  CHECK(res.total_steps == cfg.max_steps);
}

TEST_CASE("dqn student smoke run is deterministic") {
  auto spec = grid_spec(envs::EnvKind::dungeon_quest, 5, 5, 7, 60);
  StudentConfig cfg;
  cfg.max_steps = 1500;
  cfg.warmup = 200;
  cfg.batch = 8;
  cfg.hidden = 16;
  cfg.baseline = Baseline::product;
  cfg.seed = 13;
  auto e1 = envs::make_env(spec);
  auto e2 = envs::make_env(spec);
  StudentResult a = train_student_dqn(*e1, nullptr, cfg);
  StudentResult b = train_student_dqn(*e2, nullptr, cfg);
  REQUIRE_FALSE(a.episodes.empty());
  REQUIRE(a.episodes.size() == b.episodes.size());
  for (std::size_t i = 0; i < a.episodes.size(); ++i)
    CHECK(a.episodes[i].ret == b.episodes[i].ret);
}

TEST_CASE("td3 student smoke run on the continuous craftsman") {
  envs::EnvSpec spec;
  spec.kind = envs::EnvKind::blind_craftsman;
  spec.geometry = envs::Geometry::cont(7.0, 7.0);
  spec.seed = 5;
  spec.max_steps = 80;

  StudentConfig cfg;
  cfg.max_steps = 1200;
  cfg.warmup = 200;
  cfg.batch = 8;
  cfg.hidden = 16;
  cfg.baseline = Baseline::product;
  cfg.seed = 17;
  auto env = envs::make_env(spec);
  StudentResult res = train_student_td3(*env, nullptr, cfg);
  CHECK_FALSE(res.episodes.empty());

  auto grid = envs::make_env(grid_spec(envs::EnvKind::blind_craftsman, 7, 7, 5));
  CHECK_THROWS_AS(train_student_td3(*grid, nullptr, cfg),
                  std::invalid_argument);
}
