#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <autodistill/distill/distill.hpp>
#include <autodistill/envs/env.hpp>
#include <autodistill/ltlf/dfa.hpp>
#include <autodistill/rl/teacher.hpp>

namespace autodistill::harness {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Thrown when fewer than half of the trials succeed.
struct PartialFailureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Declarative description of a multi-trial, multi-arm experiment.
/// Round-trips losslessly through JSON (save_config / load_config).
struct ExperimentConfig {
  // Student environment.
  envs::EnvKind env_kind = envs::EnvKind::dungeon_quest;
  bool continuous = false;
  double width = 10.0;
  double height = 10.0;
  std::uint64_t env_seed = 1000;
  bool env_seed_per_trial = false;  // layout seed = env_seed (+ trial)
  int episode_cap = 0;              // 0 = environment default

  // Teacher, used by the dynamic and static arms.
  std::string teacher_agent = "tabular";  // tabular | dqn
  double teacher_width = 7.0;
  double teacher_height = 7.0;
  std::uint64_t teacher_env_seed = 1;
  distill::TeacherConfig teacher;
  distill::StaticMode static_mode = distill::StaticMode::value_iteration;

  // Student agent and experiment arms.
  std::string agent = "tabular";  // tabular | dqn | td3
  std::vector<std::string> arms = {"dynamic", "static", "crm", "product",
                                   "vanilla"};
  int trials = 20;
  std::vector<std::uint64_t> seeds;  // empty: trial i uses 100 + i
  distill::StudentConfig student;

  std::string output_dir = "out";
  int workers = 1;

  /// Throws ConfigError on invalid settings (no trials, duplicate seeds,
  /// unknown arm/agent names, td3 on a grid environment, ...).
  void validate() const;

  std::uint64_t trial_seed(int trial) const;
  std::uint64_t layout_seed(int trial) const;
};

std::string to_json(const ExperimentConfig& c);
ExperimentConfig config_from_json(const std::string& text);
void save_config(const ExperimentConfig& c, const std::string& path);
ExperimentConfig load_config(const std::string& path);

struct TrialOutcome {
  int trial = 0;
  bool ok = false;
  std::string error;
  distill::StudentResult result;
};

struct ArmResult {
  std::string arm;
  std::vector<TrialOutcome> trials;
};

struct RunResult {
  std::vector<ArmResult> arms;
  std::string config_digest;
  double wall_clock = 0.0;
  int succeeded = 0;
  int failed = 0;
};

/// One aggregate row per episode index; statistics over the trials that
/// reached that episode. Quantiles use linear interpolation (type 7).
struct AggregateRow {
  int episode = 0;
  int n = 0;
  double mean_env_steps = 0.0;
  double mean_return = 0.0;
  double median_return = 0.0;
  double q25_return = 0.0;
  double q75_return = 0.0;
  double mean_moving_avg = 0.0;
};

std::vector<AggregateRow> aggregate(const ArmResult& arm);

/// CSV with header `trial,episode,env_steps,return,moving_avg`; floats
/// are serialized with 17 significant digits.
std::string per_trial_csv(int trial,
                          const std::vector<distill::EpisodeRecord>& episodes);
std::string aggregate_csv(const std::vector<AggregateRow>& rows);

/// Self-contained polyline chart: one smoothed curve per arm,
/// x = environment steps, y = window-100 moving-average return.
std::string learning_curve_svg(const RunResult& result);

/// DOT rendering of the automaton with each feasible (state, label)
/// transition annotated by the distilled Q^avg and visit count; transitions
/// without a table entry are dashed.
std::string report_qvalues(const rl::TeacherTable& table, const ltlf::Dfa& d);

/// Two-color overlay of a dynamic (red) and a static (blue) table:
/// every feasible transition carries both annotations.
std::string report_qvalues_overlay(const rl::TeacherTable& dynamic_table,
                                   const rl::TeacherTable& static_table,
                                   const ltlf::Dfa& d);

/// Runs all arms and trials (share-nothing, bounded worker pool), writes
/// per-trial CSVs, aggregate CSVs, an SVG learning-curve plot, and DOT
/// automata under config.output_dir. Deterministic for a given config,
/// independent of the worker count. Throws ConfigError (validation) or
/// PartialFailureError (< 50% of trials succeeded).
RunResult run_experiment(const ExperimentConfig& config);

}  // namespace autodistill::harness
