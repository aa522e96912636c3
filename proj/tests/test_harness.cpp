#include <doctest.h>

#include <autodistill/harness/harness.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace harness = autodistill::harness;
namespace distill = autodistill::distill;
namespace envs = autodistill::envs;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

fs::path temp_dir(const std::string& tag) {
  fs::path dir = fs::temp_directory_path() / ("autodistill_test_" + tag);
  fs::remove_all(dir);
  return dir;
}

// Small but real experiment: tabular agents on a 6x6 grid.
harness::ExperimentConfig tiny_config(const std::string& tag) {
  harness::ExperimentConfig cfg;
  cfg.env_kind = envs::EnvKind::dungeon_quest;
  cfg.width = 6;
  cfg.height = 6;
  cfg.env_seed = 1000;
  cfg.env_seed_per_trial = true;
  cfg.episode_cap = 60;
  cfg.teacher_width = 5;
  cfg.teacher_height = 5;
  cfg.teacher.steps = 4000;
  cfg.teacher.gamma = 0.9;
  cfg.teacher.seed = 1;
  cfg.agent = "tabular";
  cfg.arms = {"dynamic", "vanilla"};
  cfg.trials = 3;
  cfg.student.max_steps = 4000;
  cfg.student.rho = 0.9;
  cfg.output_dir = temp_dir(tag).string();
  return cfg;
}

}  // namespace

TEST_CASE("experiment config round-trips losslessly through JSON") {
  harness::ExperimentConfig cfg;
  cfg.env_kind = envs::EnvKind::blind_craftsman;
  cfg.continuous = true;
  cfg.width = 12.5;
  cfg.height = 8.25;
  cfg.env_seed = 42;
  cfg.env_seed_per_trial = true;
  cfg.episode_cap = 123;
  cfg.teacher_agent = "dqn";
  cfg.teacher.gamma = 0.875;
  cfg.teacher.steps = 54321;
  cfg.static_mode = distill::StaticMode::q_learning;
  cfg.agent = "td3";
  cfg.arms = {"dynamic", "vanilla"};
  cfg.trials = 4;
  cfg.seeds = {7, 11, 13, 17};
  cfg.student.alpha = 0.0625;
  cfg.student.rho = 0.9990000000000001;  // exercises full double precision
  cfg.output_dir = "results/bc";
  cfg.workers = 3;

  std::string text = harness::to_json(cfg);
  harness::ExperimentConfig back = harness::config_from_json(text);
  CHECK(harness::to_json(back) == text);
  CHECK(back.env_kind == envs::EnvKind::blind_craftsman);
  CHECK(back.continuous);
  CHECK(back.width == 12.5);
  CHECK(back.student.rho == cfg.student.rho);
  CHECK(back.seeds == cfg.seeds);
  CHECK(back.static_mode == distill::StaticMode::q_learning);

  SUBCASE("file round-trip") {
    fs::path p = fs::temp_directory_path() / "autodistill_cfg.json";
    harness::save_config(cfg, p.string());
    harness::ExperimentConfig loaded = harness::load_config(p.string());
    CHECK(harness::to_json(loaded) == text);
    fs::remove(p);
  }
}

TEST_CASE("config validation rejects broken experiments") {
  harness::ExperimentConfig cfg;
  CHECK_NOTHROW(cfg.validate());

  SUBCASE("zero trials") {
    cfg.trials = 0;
    CHECK_THROWS_AS(cfg.validate(), harness::ConfigError);
  }
  SUBCASE("duplicate seeds") {
    cfg.trials = 2;
    cfg.seeds = {5, 5};
    CHECK_THROWS_AS(cfg.validate(), harness::ConfigError);
  }
  SUBCASE("seed count mismatch") {
    cfg.trials = 3;
    cfg.seeds = {1, 2};
    CHECK_THROWS_AS(cfg.validate(), harness::ConfigError);
  }
  SUBCASE("unknown arm") {
    cfg.arms = {"dynamic", "mystery"};
    CHECK_THROWS_AS(cfg.validate(), harness::ConfigError);
  }
  SUBCASE("td3 needs a continuous environment") {
    cfg.agent = "td3";
    cfg.continuous = false;
    CHECK_THROWS_AS(cfg.validate(), harness::ConfigError);
  }
  SUBCASE("no workers") {
    cfg.workers = 0;
    CHECK_THROWS_AS(cfg.validate(), harness::ConfigError);
  }
  SUBCASE("malformed JSON") {
    CHECK_THROWS_AS(harness::config_from_json("{not json"),
                    harness::ConfigError);
    CHECK_THROWS_AS(harness::config_from_json("{}"), harness::ConfigError);
  }
}

TEST_CASE("per-trial CSV uses the fixed header and survives a parse audit") {
  std::vector<distill::EpisodeRecord> eps(2);
  eps[0] = {1, 37, 0.1, 0.1, 0.0};
  eps[1] = {2, 80, 99.30000000000001, 49.700000000000003, 0.0};
  std::string csv = harness::per_trial_csv(7, eps);

  std::istringstream in(csv);
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line == "trial,episode,env_steps,return,moving_avg");
  // Every float must round-trip exactly from its decimal form.
  std::size_t row = 0;
  while (std::getline(in, line)) {
    int trial, episode;
    long long steps;
    double ret, ma;
    REQUIRE(std::sscanf(line.c_str(), "%d,%d,%lld,%lf,%lf", &trial, &episode,
                        &steps, &ret, &ma) == 5);
    CHECK(trial == 7);
    CHECK(episode == eps[row].episode);
    CHECK(steps == eps[row].env_steps);
    CHECK(ret == eps[row].ret);
    CHECK(ma == eps[row].moving_avg);
    ++row;
  }
  CHECK(row == 2);
}

TEST_CASE("aggregate statistics match hand-computed values") {
  // [DERIVED] three trials with returns {1, 2, 10} at episode 1 and a lone
  // survivor at episode 2: mean 13/3, median 2, q25 1.5, q75 6 (linear
  // interpolation between order statistics).
  harness::ArmResult arm;
  arm.arm = "vanilla";
  auto mk = [](std::vector<distill::EpisodeRecord> eps) {
    harness::TrialOutcome t;
    t.ok = true;
    t.result.episodes = std::move(eps);
    return t;
  };
  arm.trials.push_back(mk({{1, 10, 1.0, 1.0, 0.0}, {2, 20, 5.0, 3.0, 0.0}}));
  arm.trials.push_back(mk({{1, 12, 2.0, 2.0, 0.0}}));
  arm.trials.push_back(mk({{1, 14, 10.0, 10.0, 0.0}}));
  harness::TrialOutcome failed;
  failed.ok = false;
  failed.error = "boom";
  arm.trials.push_back(failed);

  auto rows = harness::aggregate(arm);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].episode == 1);
  CHECK(rows[0].n == 3);
  CHECK(rows[0].mean_env_steps == doctest::Approx(12.0));
  CHECK(rows[0].mean_return == doctest::Approx(13.0 / 3.0));
  CHECK(rows[0].median_return == doctest::Approx(2.0));
  CHECK(rows[0].q25_return == doctest::Approx(1.5));
  CHECK(rows[0].q75_return == doctest::Approx(6.0));
  CHECK(rows[1].episode == 2);
  CHECK(rows[1].n == 1);
  CHECK(rows[1].median_return == doctest::Approx(5.0));

  std::string csv = harness::aggregate_csv(rows);
  CHECK(csv.rfind("episode,n,mean_env_steps,mean_return,median_return,"
                  "q25_return,q75_return,mean_moving_avg\n",
                  0) == 0);
}

TEST_CASE("q-value report marks unobserved transitions dashed") {
  auto dfa = envs::objective_dfa(envs::EnvKind::dungeon_quest);
  autodistill::rl::TeacherTable table;

  SUBCASE("empty table: every edge dashed") {
    std::string dot = harness::report_qvalues(table, *dfa);
    CHECK(dot.find("digraph") != std::string::npos);
    CHECK(dot.find("style=dashed") != std::string::npos);
    CHECK(dot.find("Q=") == std::string::npos);
  }

  SUBCASE("observed transitions carry Q and eta annotations") {
    autodistill::ltlf::Label sigma = *dfa->feasible_labels().begin();
    table.set(dfa->initial(), sigma, 3.5, 12);
    std::string dot = harness::report_qvalues(table, *dfa);
    CHECK(dot.find("Q=3.5 eta=12") != std::string::npos);
    CHECK(dot.find("style=dashed") != std::string::npos);  // others still dashed
  }

  SUBCASE("overlay renders both tables in distinct colors") {
    autodistill::ltlf::Label sigma = *dfa->feasible_labels().begin();
    table.set(dfa->initial(), sigma, 3.5, 12);
    autodistill::rl::TeacherTable stat(
        autodistill::rl::Provenance::static_abstract);
    stat.set(dfa->initial(), sigma, -1.25, 0);
    std::string dot = harness::report_qvalues_overlay(table, stat, *dfa);
    CHECK(dot.find("color=\"red\">Q=3.5 eta=12") != std::string::npos);
    CHECK(dot.find("color=\"blue\">Q=-1.25 eta=0") != std::string::npos);
  }
}

TEST_CASE("run_experiment output is deterministic and worker-count invariant") {
  harness::ExperimentConfig solo = tiny_config("solo");
  solo.workers = 1;
  harness::ExperimentConfig pooled = tiny_config("pooled");
  pooled.workers = 4;

  harness::RunResult r1 = harness::run_experiment(solo);
  harness::RunResult r2 = harness::run_experiment(pooled);
  CHECK(r1.succeeded == 6);
  CHECK(r1.failed == 0);
  CHECK(r2.succeeded == 6);

  for (const std::string& arm : {"dynamic", "vanilla"}) {
    for (int trial = 0; trial < 3; ++trial) {
      fs::path rel =
          fs::path(arm) / ("trial_" + std::to_string(trial) + ".csv");
      std::string a = slurp(fs::path(solo.output_dir) / rel);
      std::string b = slurp(fs::path(pooled.output_dir) / rel);
      CHECK(a == b);
      CHECK(a.rfind("trial,episode,env_steps,return,moving_avg\n", 0) == 0);
      CHECK(a.size() > 40);  // at least one data row
    }
    std::string agg = slurp(fs::path(solo.output_dir) / arm / "aggregate.csv");
    CHECK(agg == slurp(fs::path(pooled.output_dir) / arm / "aggregate.csv"));
  }

  // Config digest only depends on the settings that shape the run.
  CHECK(r1.config_digest != r2.config_digest);  // output_dir differs
  harness::RunResult r3 = harness::run_experiment(solo);
  CHECK(r3.config_digest == r1.config_digest);

  std::string svg = slurp(fs::path(solo.output_dir) / "curves.svg");
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("<polyline") != std::string::npos);
  CHECK(svg.find("#1f77b4") != std::string::npos);  // dynamic arm color
  CHECK(svg.find("#9467bd") != std::string::npos);  // vanilla arm color
  CHECK(fs::exists(fs::path(solo.output_dir) / "qvalues_dynamic.dot"));
  CHECK(fs::exists(fs::path(solo.output_dir) / "automaton.dot"));
  CHECK(fs::exists(fs::path(solo.output_dir) / "config.json"));

  // The emitted config reloads to an equivalent experiment.
  harness::ExperimentConfig reloaded = harness::load_config(
      (fs::path(solo.output_dir) / "config.json").string());
  CHECK(harness::to_json(reloaded) == harness::to_json(solo));

  fs::remove_all(solo.output_dir);
  fs::remove_all(pooled.output_dir);
}
