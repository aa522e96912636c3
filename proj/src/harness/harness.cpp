#include <autodistill/harness/harness.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace autodistill::harness {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

json student_to_json(const distill::StudentConfig& s) {
  return json{{"max_steps", s.max_steps},
              {"gamma", s.gamma},
              {"alpha", s.alpha},
              {"rho", s.rho},
              {"epsilon_start", s.epsilon_start},
              {"epsilon_end", s.epsilon_end},
              {"epsilon_fraction", s.epsilon_fraction},
              {"buffer_capacity", s.buffer_capacity},
              {"batch", s.batch},
              {"hidden", s.hidden},
              {"warmup", s.warmup},
              {"target_sync_period", s.target_sync_period},
              {"crm_step_reward", s.crm_step_reward},
              {"crm_accept_reward", s.crm_accept_reward},
              {"convergence_window", s.convergence_window}};
}

distill::StudentConfig student_from_json(const json& j) {
  distill::StudentConfig s;
  j.at("max_steps").get_to(s.max_steps);
  j.at("gamma").get_to(s.gamma);
  j.at("alpha").get_to(s.alpha);
  j.at("rho").get_to(s.rho);
  j.at("epsilon_start").get_to(s.epsilon_start);
  j.at("epsilon_end").get_to(s.epsilon_end);
  j.at("epsilon_fraction").get_to(s.epsilon_fraction);
  j.at("buffer_capacity").get_to(s.buffer_capacity);
  j.at("batch").get_to(s.batch);
  j.at("hidden").get_to(s.hidden);
  j.at("warmup").get_to(s.warmup);
  j.at("target_sync_period").get_to(s.target_sync_period);
  j.at("crm_step_reward").get_to(s.crm_step_reward);
  j.at("crm_accept_reward").get_to(s.crm_accept_reward);
  j.at("convergence_window").get_to(s.convergence_window);
  return s;
}

json teacher_to_json(const distill::TeacherConfig& t) {
  return json{{"steps", t.steps},
              {"gamma", t.gamma},
              {"alpha", t.alpha},
              {"epsilon_start", t.epsilon_start},
              {"epsilon_end", t.epsilon_end},
              {"epsilon_fraction", t.epsilon_fraction},
              {"buffer_capacity", t.buffer_capacity},
              {"batch", t.batch},
              {"hidden", t.hidden},
              {"warmup", t.warmup},
              {"target_sync_period", t.target_sync_period},
              {"seed", t.seed}};
}

distill::TeacherConfig teacher_from_json(const json& j) {
  distill::TeacherConfig t;
  j.at("steps").get_to(t.steps);
  j.at("gamma").get_to(t.gamma);
  j.at("alpha").get_to(t.alpha);
  j.at("epsilon_start").get_to(t.epsilon_start);
  j.at("epsilon_end").get_to(t.epsilon_end);
  j.at("epsilon_fraction").get_to(t.epsilon_fraction);
  j.at("buffer_capacity").get_to(t.buffer_capacity);
  j.at("batch").get_to(t.batch);
  j.at("hidden").get_to(t.hidden);
  j.at("warmup").get_to(t.warmup);
  j.at("target_sync_period").get_to(t.target_sync_period);
  j.at("seed").get_to(t.seed);
  return t;
}

// FNV-1a over the canonical JSON dump.
std::string digest(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

double quantile(std::vector<double> v, double p) {
  std::sort(v.begin(), v.end());
  if (v.empty()) return 0.0;
  double pos = p * (static_cast<double>(v.size()) - 1.0);
  std::size_t lo = static_cast<std::size_t>(pos);
  std::size_t hi = std::min(lo + 1, v.size() - 1);
  double frac = pos - static_cast<double>(lo);
  return v[lo] + frac * (v[hi] - v[lo]);
}

struct ArmPlan {
  std::string name;
  distill::Baseline baseline = distill::Baseline::none;
  const rl::TeacherTable* table = nullptr;  // dynamic/static only
};

}  // namespace

void ExperimentConfig::validate() const {
  if (trials < 1) throw ConfigError("experiment needs at least one trial");
  if (workers < 1) throw ConfigError("worker pool must have at least one worker");
  if (width < (continuous ? 1.0 : 5.0) || height < (continuous ? 1.0 : 5.0))
    throw ConfigError("student environment too small");
  if (agent != "tabular" && agent != "dqn" && agent != "td3")
    throw ConfigError("unknown student agent: " + agent);
  if (teacher_agent != "tabular" && teacher_agent != "dqn")
    throw ConfigError("unknown teacher agent: " + teacher_agent);
  if (agent == "td3" && !continuous)
    throw ConfigError("td3 requires a continuous student environment");
  if (arms.empty()) throw ConfigError("experiment needs at least one arm");
  for (const std::string& a : arms) {
    if (a != "dynamic" && a != "static" && a != "crm" && a != "product" &&
        a != "vanilla")
      throw ConfigError("unknown arm: " + a);
  }
  if (!seeds.empty()) {
    if (static_cast<int>(seeds.size()) != trials)
      throw ConfigError("seed list must match the trial count");
    std::set<std::uint64_t> distinct(seeds.begin(), seeds.end());
    if (static_cast<int>(distinct.size()) != trials)
      throw ConfigError("trial seeds must be distinct");
  }
  if (episode_cap < 0) throw ConfigError("episode cap must be non-negative");
}

std::uint64_t ExperimentConfig::trial_seed(int trial) const {
  if (!seeds.empty()) return seeds.at(static_cast<std::size_t>(trial));
  return 100 + static_cast<std::uint64_t>(trial);
}

std::uint64_t ExperimentConfig::layout_seed(int trial) const {
  return env_seed + (env_seed_per_trial ? static_cast<std::uint64_t>(trial) : 0);
}

std::string to_json(const ExperimentConfig& c) {
  json j{{"env_kind", envs::to_string(c.env_kind)},
         {"continuous", c.continuous},
         {"width", c.width},
         {"height", c.height},
         {"env_seed", c.env_seed},
         {"env_seed_per_trial", c.env_seed_per_trial},
         {"episode_cap", c.episode_cap},
         {"teacher_agent", c.teacher_agent},
         {"teacher_width", c.teacher_width},
         {"teacher_height", c.teacher_height},
         {"teacher_env_seed", c.teacher_env_seed},
         {"teacher", teacher_to_json(c.teacher)},
         {"static_mode", c.static_mode == distill::StaticMode::value_iteration
                             ? "value_iteration"
                             : "q_learning"},
         {"agent", c.agent},
         {"arms", c.arms},
         {"trials", c.trials},
         {"seeds", c.seeds},
         {"student", student_to_json(c.student)},
         {"output_dir", c.output_dir},
         {"workers", c.workers}};
  return j.dump(2) + "\n";
}

ExperimentConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  ExperimentConfig c;
  try {
    c.env_kind = envs::env_kind_from_string(j.at("env_kind").get<std::string>());
    j.at("continuous").get_to(c.continuous);
    j.at("width").get_to(c.width);
    j.at("height").get_to(c.height);
    j.at("env_seed").get_to(c.env_seed);
    j.at("env_seed_per_trial").get_to(c.env_seed_per_trial);
    j.at("episode_cap").get_to(c.episode_cap);
    j.at("teacher_agent").get_to(c.teacher_agent);
    j.at("teacher_width").get_to(c.teacher_width);
    j.at("teacher_height").get_to(c.teacher_height);
    j.at("teacher_env_seed").get_to(c.teacher_env_seed);
    c.teacher = teacher_from_json(j.at("teacher"));
    std::string mode = j.at("static_mode").get<std::string>();
    if (mode == "value_iteration")
      c.static_mode = distill::StaticMode::value_iteration;
    else if (mode == "q_learning")
      c.static_mode = distill::StaticMode::q_learning;
    else
      throw ConfigError("unknown static_mode: " + mode);
    j.at("agent").get_to(c.agent);
    j.at("arms").get_to(c.arms);
    j.at("trials").get_to(c.trials);
    j.at("seeds").get_to(c.seeds);
    c.student = student_from_json(j.at("student"));
    j.at("output_dir").get_to(c.output_dir);
    j.at("workers").get_to(c.workers);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field error: ") + e.what());
  }
  return c;
}

void save_config(const ExperimentConfig& c, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write config: " + path);
  out << to_json(c);
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return config_from_json(buf.str());
}

std::vector<AggregateRow> aggregate(const ArmResult& arm) {
  std::size_t longest = 0;
  for (const TrialOutcome& t : arm.trials)
    if (t.ok) longest = std::max(longest, t.result.episodes.size());
  std::vector<AggregateRow> rows;
  rows.reserve(longest);
  for (std::size_t i = 0; i < longest; ++i) {
    AggregateRow row;
    row.episode = static_cast<int>(i) + 1;
    std::vector<double> returns;
    double steps = 0.0, ma = 0.0;
    for (const TrialOutcome& t : arm.trials) {
      if (!t.ok || i >= t.result.episodes.size()) continue;
      const distill::EpisodeRecord& e = t.result.episodes[i];
      returns.push_back(e.ret);
      steps += static_cast<double>(e.env_steps);
      ma += e.moving_avg;
    }
    row.n = static_cast<int>(returns.size());
    if (row.n == 0) continue;
    row.mean_env_steps = steps / row.n;
    double sum = 0.0;
    for (double r : returns) sum += r;
    row.mean_return = sum / row.n;
    row.median_return = quantile(returns, 0.5);
    row.q25_return = quantile(returns, 0.25);
    row.q75_return = quantile(returns, 0.75);
    row.mean_moving_avg = ma / row.n;
    rows.push_back(row);
  }
  return rows;
}

std::string per_trial_csv(int trial,
                          const std::vector<distill::EpisodeRecord>& episodes) {
  std::string out = "trial,episode,env_steps,return,moving_avg\n";
  for (const distill::EpisodeRecord& e : episodes) {
    out += std::to_string(trial);
    out += ',';
    out += std::to_string(e.episode);
    out += ',';
    out += std::to_string(e.env_steps);
    out += ',';
    out += fmt17(e.ret);
    out += ',';
    out += fmt17(e.moving_avg);
    out += '\n';
  }
  return out;
}

std::string aggregate_csv(const std::vector<AggregateRow>& rows) {
  std::string out =
      "episode,n,mean_env_steps,mean_return,median_return,q25_return,"
      "q75_return,mean_moving_avg\n";
  for (const AggregateRow& r : rows) {
    out += std::to_string(r.episode);
    out += ',';
    out += std::to_string(r.n);
    out += ',';
    out += fmt17(r.mean_env_steps);
    out += ',';
    out += fmt17(r.mean_return);
    out += ',';
    out += fmt17(r.median_return);
    out += ',';
    out += fmt17(r.q25_return);
    out += ',';
    out += fmt17(r.q75_return);
    out += ',';
    out += fmt17(r.mean_moving_avg);
    out += '\n';
  }
  return out;
}

namespace {

// Fixed per-arm legend colors: dynamic blue, static orange, crm green,
// product red, vanilla purple.
const char* arm_color(const std::string& arm) {
  if (arm == "dynamic") return "#1f77b4";
  if (arm == "static") return "#ff7f0e";
  if (arm == "crm") return "#2ca02c";
  if (arm == "product") return "#d62728";
  return "#9467bd";
}

}  // namespace

std::string learning_curve_svg(const RunResult& result) {
  const double w = 860, h = 560, ml = 70, mr = 180, mt = 30, mb = 50;
  double xmax = 1, ymin = 0, ymax = 1;
  bool any = false;
  std::vector<std::pair<std::string, std::vector<AggregateRow>>> curves;
  for (const ArmResult& arm : result.arms) {
    auto rows = aggregate(arm);
    for (const AggregateRow& r : rows) {
      xmax = std::max(xmax, r.mean_env_steps);
      ymin = any ? std::min(ymin, r.mean_moving_avg) : r.mean_moving_avg;
      ymax = any ? std::max(ymax, r.mean_moving_avg) : r.mean_moving_avg;
      any = true;
    }
    curves.emplace_back(arm.arm, std::move(rows));
  }
  if (ymax <= ymin) ymax = ymin + 1;
  auto px = [&](double x) { return ml + (x / xmax) * (w - ml - mr); };
  auto py = [&](double y) {
    return h - mb - ((y - ymin) / (ymax - ymin)) * (h - mt - mb);
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w
      << "\" height=\"" << h << "\" viewBox=\"0 0 " << w << " " << h
      << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<line x1=\"" << ml << "\" y1=\"" << (h - mb) << "\" x2=\""
      << (w - mr) << "\" y2=\"" << (h - mb)
      << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  svg << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml
      << "\" y2=\"" << (h - mb)
      << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  svg << "<text x=\"" << (ml + (w - ml - mr) / 2) << "\" y=\"" << (h - 12)
      << "\" text-anchor=\"middle\" font-size=\"14\">environment steps"
      << "</text>\n";
  svg << "<text x=\"18\" y=\"" << (mt + (h - mt - mb) / 2)
      << "\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 "
         "18 "
      << (mt + (h - mt - mb) / 2)
      << ")\">moving-average return</text>\n";
  for (int tick = 0; tick <= 4; ++tick) {
    double yv = ymin + (ymax - ymin) * tick / 4.0;
    double xv = xmax * tick / 4.0;
    svg << "<text x=\"" << (ml - 6) << "\" y=\"" << (py(yv) + 4)
        << "\" text-anchor=\"end\" font-size=\"11\">" << fmt17(std::round(yv))
        << "</text>\n";
    svg << "<text x=\"" << px(xv) << "\" y=\"" << (h - mb + 16)
        << "\" text-anchor=\"middle\" font-size=\"11\">"
        << static_cast<long long>(std::llround(xv)) << "</text>\n";
  }
  int li = 0;
  for (const auto& [name, rows] : curves) {
    if (!rows.empty()) {
      svg << "<polyline fill=\"none\" stroke=\"" << arm_color(name)
          << "\" stroke-width=\"1.5\" points=\"";
      for (const AggregateRow& r : rows)
        svg << px(r.mean_env_steps) << ',' << py(r.mean_moving_avg) << ' ';
      svg << "\"/>\n";
    }
    double ly = mt + 18 + 22 * li++;
    svg << "<line x1=\"" << (w - mr + 12) << "\" y1=\"" << ly << "\" x2=\""
        << (w - mr + 42) << "\" y2=\"" << ly << "\" stroke=\""
        << arm_color(name) << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << (w - mr + 48) << "\" y=\"" << (ly + 4)
        << "\" font-size=\"13\">" << name << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

namespace {

std::string q_annotation(const rl::TeacherTable& table, int omega,
                         ltlf::Label sigma) {
  auto q = table.q(omega, sigma);
  if (!q) return "";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "Q=%.3g eta=%lld", *q,
                static_cast<long long>(table.eta(omega, sigma)));
  return buf;
}

std::string qvalues_dot(const rl::TeacherTable* dynamic_table,
                        const rl::TeacherTable* static_table,
                        const ltlf::Dfa& d) {
  std::ostringstream out;
  out << "digraph qvalues {\n  rankdir=LR;\n  node [shape=circle];\n";
  for (int s = 0; s < d.num_states(); ++s) {
    out << "  q" << s << " [label=\"" << s << "\""
        << (d.accepting(s) ? ", shape=doublecircle" : "")
        << (s == d.initial() ? ", style=bold" : "") << "];\n";
  }
  for (int s = 0; s < d.num_states(); ++s) {
    for (ltlf::Label sigma : d.feasible_labels()) {
      int target = d.step(s, sigma);
      std::string dyn =
          dynamic_table ? q_annotation(*dynamic_table, s, sigma) : "";
      std::string stat =
          static_table ? q_annotation(*static_table, s, sigma) : "";
      bool observed = !dyn.empty() || !stat.empty();
      out << "  q" << s << " -> q" << target << " [label=<"
          << d.atoms().label_to_string(sigma);
      if (!dyn.empty())
        out << "<br/><font color=\"red\">" << dyn << "</font>";
      if (!stat.empty())
        out << "<br/><font color=\"blue\">" << stat << "</font>";
      out << ">" << (observed ? "" : ", style=dashed, color=gray") << "];\n";
    }
  }
  out << "}\n";
  return out.str();
}

}  // namespace

std::string report_qvalues(const rl::TeacherTable& table, const ltlf::Dfa& d) {
  return qvalues_dot(&table, nullptr, d);
}

std::string report_qvalues_overlay(const rl::TeacherTable& dynamic_table,
                                   const rl::TeacherTable& static_table,
                                   const ltlf::Dfa& d) {
  return qvalues_dot(&dynamic_table, &static_table, d);
}

namespace {

distill::StudentResult run_trial(const ExperimentConfig& cfg,
                                 const ArmPlan& plan, int trial) {
  envs::EnvSpec spec;
  spec.kind = cfg.env_kind;
  spec.geometry = cfg.continuous
                      ? envs::Geometry::cont(cfg.width, cfg.height)
                      : envs::Geometry::grid(static_cast<int>(cfg.width),
                                             static_cast<int>(cfg.height));
  spec.seed = cfg.layout_seed(trial);
  spec.max_steps = cfg.episode_cap;
  auto env = envs::make_env(spec);

  distill::StudentConfig sc = cfg.student;
  sc.baseline = plan.baseline;
  sc.seed = cfg.trial_seed(trial);
  if (cfg.agent == "tabular")
    return distill::train_student_tabular(*env, plan.table, sc);
  if (cfg.agent == "dqn")
    return distill::train_student_dqn(*env, plan.table, sc);
  return distill::train_student_td3(*env, plan.table, sc);
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  auto t0 = std::chrono::steady_clock::now();

  bool needs_dynamic = false, needs_static = false;
  for (const std::string& a : config.arms) {
    needs_dynamic |= a == "dynamic";
    needs_static |= a == "static";
  }

  // Shared immutable inputs: objective automaton and teacher tables.
  auto dfa = envs::objective_dfa(config.env_kind);
  rl::TeacherTable dynamic_table, static_table;
  if (needs_dynamic) {
    envs::EnvSpec tspec;
    tspec.kind = config.env_kind;
    tspec.geometry = envs::Geometry::grid(
        static_cast<int>(config.teacher_width),
        static_cast<int>(config.teacher_height));
    tspec.seed = config.teacher_env_seed;
    auto tenv = envs::make_env(tspec);
    if (config.teacher_agent == "tabular") {
      auto teacher = distill::train_teacher_tabular(*tenv, config.teacher);
      dynamic_table = distill::distill_dynamic(teacher);
    } else {
      auto teacher = distill::train_teacher_dqn(*tenv, config.teacher);
      dynamic_table = distill::distill_dynamic(teacher);
    }
  }
  if (needs_static) {
    static_table = distill::distill_static(
        *dfa, distill::accept_reward(*dfa), config.student.gamma,
        config.static_mode, config.teacher.seed, config.teacher.steps);
  }

  std::vector<ArmPlan> plans;
  for (const std::string& a : config.arms) {
    ArmPlan p;
    p.name = a;
    if (a == "dynamic") {
      p.baseline = distill::Baseline::none;
      p.table = &dynamic_table;
    } else if (a == "static") {
      p.baseline = distill::Baseline::none;
      p.table = &static_table;
    } else {
      p.baseline = distill::baseline_from_string(a);
    }
    plans.push_back(p);
  }

  // Flat work queue over (arm, trial); each job is share-nothing.
  RunResult result;
  result.config_digest = digest(to_json(config));
  result.arms.resize(plans.size());
  for (std::size_t a = 0; a < plans.size(); ++a) {
    result.arms[a].arm = plans[a].name;
    result.arms[a].trials.resize(static_cast<std::size_t>(config.trials));
  }
  const int total_jobs = static_cast<int>(plans.size()) * config.trials;
  std::atomic<int> next_job{0};
  auto worker = [&] {
    while (true) {
      int job = next_job.fetch_add(1);
      if (job >= total_jobs) return;
      int a = job / config.trials;
      int trial = job % config.trials;
      TrialOutcome& out =
          result.arms[static_cast<std::size_t>(a)]
              .trials[static_cast<std::size_t>(trial)];
      out.trial = trial;
      try {
        out.result = run_trial(config, plans[static_cast<std::size_t>(a)],
                               trial);
        out.ok = true;
      } catch (const std::exception& e) {
        out.ok = false;
        out.error = e.what();
      }
    }
  };
  int pool = std::min(config.workers, total_jobs);
  std::vector<std::thread> threads;
  threads.reserve(static_cast<std::size_t>(pool));
  for (int i = 0; i < pool; ++i) threads.emplace_back(worker);
  for (std::thread& t : threads) t.join();

  for (const ArmResult& arm : result.arms)
    for (const TrialOutcome& t : arm.trials) (t.ok ? result.succeeded
                                                   : result.failed)++;
  result.wall_clock =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();

  if (result.succeeded * 2 < total_jobs) {
    std::string detail;
    for (const ArmResult& arm : result.arms)
      for (const TrialOutcome& t : arm.trials)
        if (!t.ok)
          detail += "\n  " + arm.arm + "/trial " + std::to_string(t.trial) +
                    ": " + t.error;
    throw PartialFailureError("fewer than half of the trials succeeded:" +
                              detail);
  }

  // Emit artifacts.
  fs::path root(config.output_dir);
  fs::create_directories(root);
  write_file(root / "config.json", to_json(config));
  write_file(root / "automaton.dot", ltlf::to_dot(*dfa));
  if (needs_dynamic)
    write_file(root / "qvalues_dynamic.dot", report_qvalues(dynamic_table, *dfa));
  if (needs_static)
    write_file(root / "qvalues_static.dot", report_qvalues(static_table, *dfa));
  if (needs_dynamic && needs_static)
    write_file(root / "qvalues_overlay.dot",
               report_qvalues_overlay(dynamic_table, static_table, *dfa));
  for (const ArmResult& arm : result.arms) {
    fs::path dir = root / arm.arm;
    fs::create_directories(dir);
    for (const TrialOutcome& t : arm.trials) {
      if (t.ok)
        write_file(dir / ("trial_" + std::to_string(t.trial) + ".csv"),
                   per_trial_csv(t.trial, t.result.episodes));
      else
        write_file(dir / ("trial_" + std::to_string(t.trial) + ".error"),
                   t.error + "\n");
    }
    write_file(dir / "aggregate.csv", aggregate_csv(aggregate(arm)));
  }
  write_file(root / "curves.svg", learning_curve_svg(result));
  return result;
}

}  // namespace autodistill::harness
