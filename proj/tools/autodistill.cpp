// autodistill: command-line front end for the automaton-distillation library.
//
// Subcommands:
//   compile         LTL_f formula -> minimized DFA (DOT + stats JSON)
//   train-teacher   train a teacher agent on a grid environment
//   distill         teacher replay (or abstract MDP) -> transition Q-table
//   train-student   train one student run, emit its learning curve as CSV
//   run-experiment  multi-arm, multi-trial experiment from a JSON config
//   report-qvalues  annotate an objective automaton with distilled Q-values
//
// Exit codes: 0 success, 1 validation error, 2 runtime error,
// 3 partial failure below the 50% trial-success threshold.

#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <autodistill/distill/distill.hpp>
#include <autodistill/envs/env.hpp>
#include <autodistill/harness/harness.hpp>
#include <autodistill/ltlf/dfa.hpp>
#include <autodistill/ltlf/parser.hpp>
#include <autodistill/rl/teacher.hpp>

namespace distill = autodistill::distill;
namespace envs = autodistill::envs;
namespace harness = autodistill::harness;
namespace ltlf = autodistill::ltlf;
namespace rl = autodistill::rl;

namespace {

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void spit(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << text;
}

std::vector<std::string> non_empty_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' '))
      line.pop_back();
    if (!line.empty() && line[0] != '#') lines.push_back(line);
  }
  return lines;
}

// A feasible-labels file lists one label per line as a comma-separated set
// of proposition names ("wood,factory"); the literal word "empty" (or an
// explicit "-") denotes the empty label.
std::vector<ltlf::Label> parse_feasible(const std::string& text,
                                        const ltlf::AtomSet& atoms) {
  std::vector<ltlf::Label> labels;
  for (const std::string& line : non_empty_lines(text)) {
    ltlf::Label sigma = 0;
    if (line != "empty" && line != "-") {
      std::istringstream in(line);
      std::string name;
      while (std::getline(in, name, ',')) {
        int idx = atoms.index(name);
        if (idx < 0)
          throw ValidationError("unknown proposition in feasible set: " + name);
        sigma |= ltlf::Label{1} << idx;
      }
    }
    labels.push_back(sigma);
  }
  return labels;
}

envs::EnvSpec make_spec(const std::string& kind, bool continuous, double width,
                        double height, std::uint64_t seed, int episode_cap) {
  envs::EnvSpec spec;
  spec.kind = envs::env_kind_from_string(kind);
  spec.geometry = continuous ? envs::Geometry::cont(width, height)
                             : envs::Geometry::grid(static_cast<int>(width),
                                                    static_cast<int>(height));
  spec.seed = seed;
  spec.max_steps = episode_cap;
  return spec;
}

int cmd_compile(const std::string& formula_path, const std::string& ap_path,
                const std::string& feasible_path, const std::string& dot_out,
                const std::string& stats_out) {
  ltlf::AtomSet atoms(non_empty_lines(slurp(ap_path)));
  ltlf::FormulaRef f = ltlf::parse(slurp(formula_path), atoms);
  ltlf::CompileOptions options;
  if (!feasible_path.empty())
    options.feasible = parse_feasible(slurp(feasible_path), atoms);
  ltlf::Dfa d = ltlf::compile(f, atoms, options);

  if (!dot_out.empty()) spit(dot_out, ltlf::to_dot(d));
  std::ostringstream stats;
  stats << "{\n"
        << "  \"states\": " << d.num_states() << ",\n"
        << "  \"live_states\": " << d.live_state_count() << ",\n"
        << "  \"transitions_guards\": " << d.edge_count() << ",\n"
        << "  \"transitions_label_pairs\": " << d.pair_count() << ",\n"
        << "  \"live_transitions_guards\": " << d.live_edge_count() << ",\n"
        << "  \"accepting_states\": " << d.accepting_count() << "\n"
        << "}\n";
  if (!stats_out.empty())
    spit(stats_out, stats.str());
  else
    std::cout << stats.str();
  std::cerr << "compiled: " << d.num_states() << " states, " << d.edge_count()
            << " guard transitions (" << d.pair_count() << " label pairs), "
            << d.accepting_count() << " accepting\n";
  return 0;
}

int cmd_train_teacher(const std::string& env_kind, double width, double height,
                      std::uint64_t env_seed, int episode_cap,
                      const std::string& agent,
                      const distill::TeacherConfig& cfg,
                      const std::string& out_dir) {
  envs::EnvSpec spec =
      make_spec(env_kind, false, width, height, env_seed, episode_cap);
  auto env = envs::make_env(spec);
  if (agent == "tabular") {
    distill::TabularTeacher teacher = distill::train_teacher_tabular(*env, cfg);
    teacher.save_dir(out_dir);
  } else if (agent == "dqn") {
    distill::NeuralTeacher teacher = distill::train_teacher_dqn(*env, cfg);
    teacher.save_dir(out_dir);
  } else {
    throw ValidationError("unknown teacher agent: " + agent);
  }
  std::cerr << "teacher saved to " << out_dir << "\n";
  return 0;
}

int cmd_distill(const std::string& mode, const std::string& teacher_dir,
                const std::string& agent, const std::string& env_kind,
                double gamma, const std::string& static_mode,
                std::uint64_t seed, long long q_steps,
                const std::string& out_path) {
  rl::TeacherTable table;
  if (mode == "dynamic") {
    if (teacher_dir.empty())
      throw ValidationError("dynamic distillation needs --teacher <dir>");
    if (agent == "tabular")
      table = distill::distill_dynamic(distill::TabularTeacher::load_dir(teacher_dir));
    else if (agent == "dqn")
      table = distill::distill_dynamic(distill::NeuralTeacher::load_dir(teacher_dir));
    else
      throw ValidationError("unknown teacher agent: " + agent);
  } else if (mode == "static") {
    auto dfa = envs::objective_dfa(envs::env_kind_from_string(env_kind));
    distill::StaticMode sm;
    if (static_mode == "value_iteration")
      sm = distill::StaticMode::value_iteration;
    else if (static_mode == "q_learning")
      sm = distill::StaticMode::q_learning;
    else
      throw ValidationError("unknown static mode: " + static_mode);
    table = distill::distill_static(*dfa, distill::accept_reward(*dfa), gamma,
                                    sm, seed, q_steps);
  } else {
    throw ValidationError("unknown distillation mode: " + mode);
  }
  table.save_file(out_path);
  std::cerr << "distilled " << table.size() << " transition entries to "
            << out_path << "\n";
  return 0;
}

int cmd_train_student(const std::string& env_kind, bool continuous,
                      double width, double height, std::uint64_t env_seed,
                      int episode_cap, const std::string& agent,
                      const std::string& baseline,
                      const std::string& table_path,
                      const distill::StudentConfig& cfg_in, int trial,
                      const std::string& csv_out) {
  distill::StudentConfig cfg = cfg_in;
  cfg.baseline = distill::baseline_from_string(baseline);
  std::optional<rl::TeacherTable> table;
  if (!table_path.empty()) {
    if (cfg.baseline != distill::Baseline::none)
      throw ValidationError(
          "teacher tables apply to the distillation arm only (baseline none)");
    table = rl::TeacherTable::load_file(table_path);
  }

  envs::EnvSpec spec =
      make_spec(env_kind, continuous, width, height, env_seed, episode_cap);
  auto env = envs::make_env(spec);
  const rl::TeacherTable* t = table ? &*table : nullptr;
  distill::StudentResult result;
  if (agent == "tabular")
    result = distill::train_student_tabular(*env, t, cfg);
  else if (agent == "dqn")
    result = distill::train_student_dqn(*env, t, cfg);
  else if (agent == "td3")
    result = distill::train_student_td3(*env, t, cfg);
  else
    throw ValidationError("unknown student agent: " + agent);

  std::string csv = harness::per_trial_csv(trial, result.episodes);
  if (csv_out.empty())
    std::cout << csv;
  else
    spit(csv_out, csv);
  std::cerr << "student finished: " << result.episodes.size() << " episodes, "
            << result.total_steps << " env steps\n";
  return 0;
}

int cmd_run_experiment(const std::string& config_path, int workers_override) {
  harness::ExperimentConfig cfg = harness::load_config(config_path);
  if (workers_override > 0) cfg.workers = workers_override;
  harness::RunResult result = harness::run_experiment(cfg);
  std::cerr << "experiment " << result.config_digest << ": "
            << result.succeeded << " trials ok, " << result.failed
            << " failed, " << result.wall_clock << "s; outputs in "
            << cfg.output_dir << "\n";
  return 0;
}

int cmd_report_qvalues(const std::string& env_kind,
                       const std::string& table_path,
                       const std::string& static_path,
                       const std::string& dot_out) {
  auto dfa = envs::objective_dfa(envs::env_kind_from_string(env_kind));
  rl::TeacherTable table = rl::TeacherTable::load_file(table_path);
  std::string dot;
  if (static_path.empty()) {
    dot = harness::report_qvalues(table, *dfa);
  } else {
    rl::TeacherTable stat = rl::TeacherTable::load_file(static_path);
    dot = harness::report_qvalues_overlay(table, stat, *dfa);
  }
  if (dot_out.empty())
    std::cout << dot;
  else
    spit(dot_out, dot);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Automaton distillation: compile LTL_f objectives to DFAs and "
               "transfer teacher Q-values to student agents"};
  app.require_subcommand(1);

  // --- compile ---
  std::string formula_path, ap_path, feasible_path, dot_out, stats_out;
  CLI::App* compile = app.add_subcommand(
      "compile", "Compile an LTL_f formula into a minimized DFA");
  compile->add_option("--formula", formula_path, "Formula file")->required();
  compile->add_option("--ap", ap_path,
                      "Proposition names, one per line")->required();
  compile->add_option("--feasible", feasible_path,
                      "Feasible labels, one comma-separated set per line");
  compile->add_option("--dot", dot_out, "DOT output path");
  compile->add_option("--stats", stats_out, "Stats JSON output path (default stdout)");

  // Shared environment options.
  std::string env_kind = "dungeon_quest";
  bool continuous = false;
  double width = 10, height = 10;
  std::uint64_t env_seed = 1000;
  int episode_cap = 0;
  auto add_env_opts = [&](CLI::App* cmd, bool allow_continuous) {
    cmd->add_option("--env", env_kind,
                    "dungeon_quest | blind_craftsman | diamond_mine");
    cmd->add_option("--width", width, "Environment width");
    cmd->add_option("--height", height, "Environment height");
    cmd->add_option("--env-seed", env_seed, "Layout seed");
    cmd->add_option("--episode-cap", episode_cap,
                    "Max steps per episode (0 = environment default)");
    if (allow_continuous)
      cmd->add_flag("--continuous", continuous, "Continuous dynamics");
  };

  // --- train-teacher ---
  distill::TeacherConfig tcfg;
  std::string teacher_agent = "tabular", teacher_out = "teacher";
  CLI::App* train_teacher = app.add_subcommand(
      "train-teacher", "Train a teacher agent and save it with its replay");
  add_env_opts(train_teacher, false);
  train_teacher->add_option("--agent", teacher_agent, "tabular | dqn");
  train_teacher->add_option("--steps", tcfg.steps, "Training steps");
  train_teacher->add_option("--gamma", tcfg.gamma, "Discount factor");
  train_teacher->add_option("--alpha", tcfg.alpha, "Tabular step size");
  train_teacher->add_option("--seed", tcfg.seed, "Agent seed");
  train_teacher->add_option("--out", teacher_out, "Output directory")
      ->required();

  // --- distill ---
  std::string mode = "dynamic", teacher_dir, static_mode = "value_iteration",
              table_out = "table.txt";
  double static_gamma = 0.99;
  long long static_steps = 200000;
  std::uint64_t static_seed = 0;
  CLI::App* dist = app.add_subcommand(
      "distill", "Produce a transition Q-table (dynamic or static)");
  dist->add_option("--mode", mode, "dynamic | static");
  dist->add_option("--teacher", teacher_dir, "Teacher directory (dynamic)");
  dist->add_option("--agent", teacher_agent, "Teacher agent kind (dynamic)");
  dist->add_option("--env", env_kind, "Environment kind (static)");
  dist->add_option("--gamma", static_gamma, "Abstract-MDP discount (static)");
  dist->add_option("--static-mode", static_mode,
                   "value_iteration | q_learning");
  dist->add_option("--seed", static_seed, "Q-learning seed (static)");
  dist->add_option("--steps", static_steps, "Q-learning steps (static)");
  dist->add_option("--out", table_out, "Table output file")->required();

  // --- train-student ---
  distill::StudentConfig scfg;
  std::string student_agent = "tabular", baseline = "none", table_path,
              csv_out;
  int trial = 0;
  CLI::App* train_student = app.add_subcommand(
      "train-student", "Train one student run and emit its learning curve");
  add_env_opts(train_student, true);
  train_student->add_option("--agent", student_agent, "tabular | dqn | td3");
  train_student->add_option("--baseline", baseline,
                            "none | vanilla | product | crm");
  train_student->add_option("--table", table_path,
                            "Teacher table file (distillation arm)");
  train_student->add_option("--steps", scfg.max_steps, "Training steps");
  train_student->add_option("--gamma", scfg.gamma, "Discount factor");
  train_student->add_option("--alpha", scfg.alpha, "Tabular step size");
  train_student->add_option("--rho", scfg.rho, "Annealing base");
  train_student->add_option("--epsilon-fraction", scfg.epsilon_fraction,
                            "Fraction of steps spent decaying epsilon");
  train_student->add_option("--seed", scfg.seed, "Agent seed");
  train_student->add_option("--trial", trial, "Trial index for the CSV");
  train_student->add_option("--csv", csv_out, "CSV output path (default stdout)");

  // --- run-experiment ---
  std::string config_path;
  int workers_override = 0;
  CLI::App* run = app.add_subcommand(
      "run-experiment", "Run a multi-arm, multi-trial experiment");
  run->add_option("--config", config_path, "Experiment config JSON")
      ->required();
  run->add_option("--workers", workers_override,
                  "Override the worker-pool size");

  // --- report-qvalues ---
  std::string qtable_path, static_table_path, qdot_out;
  CLI::App* report = app.add_subcommand(
      "report-qvalues", "Annotate an objective automaton with Q-values");
  report->add_option("--env", env_kind,
                     "dungeon_quest | blind_craftsman | diamond_mine");
  report->add_option("--table", qtable_path, "Teacher table file")->required();
  report->add_option("--static-table", static_table_path,
                     "Second table for a two-color overlay");
  report->add_option("--dot", qdot_out, "DOT output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;  // bad usage is a validation error
  }

  try {
    if (*compile)
      return cmd_compile(formula_path, ap_path, feasible_path, dot_out,
                         stats_out);
    if (*train_teacher)
      return cmd_train_teacher(env_kind, width, height, env_seed, episode_cap,
                               teacher_agent, tcfg, teacher_out);
    if (*dist)
      return cmd_distill(mode, teacher_dir, teacher_agent, env_kind,
                         static_gamma, static_mode, static_seed, static_steps,
                         table_out);
    if (*train_student)
      return cmd_train_student(env_kind, continuous, width, height, env_seed,
                               episode_cap, student_agent, baseline,
                               table_path, scfg, trial, csv_out);
    if (*run) return cmd_run_experiment(config_path, workers_override);
    if (*report)
      return cmd_report_qvalues(env_kind, qtable_path, static_table_path,
                                qdot_out);
  } catch (const harness::PartialFailureError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const harness::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const ltlf::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
