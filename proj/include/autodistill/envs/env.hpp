#ifndef AUTODISTILL_ENVS_ENV_HPP
#define AUTODISTILL_ENVS_ENV_HPP

#include <Eigen/Core>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "autodistill/ltlf/dfa.hpp"

namespace autodistill::envs {

using ltlf::Dfa;
using ltlf::Label;

enum class EnvKind { blind_craftsman, dungeon_quest, diamond_mine };

std::string to_string(EnvKind kind);
EnvKind env_kind_from_string(const std::string& s);

struct Geometry {
  bool continuous = false;
  int width = 7;    // grid cells
  int height = 7;
  double width_cm = 7.0;  // continuous extent
  double height_cm = 7.0;

  static Geometry grid(int w, int h) { return Geometry{false, w, h, 0, 0}; }
  static Geometry cont(double w, double h) {
    return Geometry{true, 0, 0, w, h};
  }
};

struct EnvSpec {
  EnvKind kind = EnvKind::blind_craftsman;
  Geometry geometry;
  bool obstacles = false;
  std::uint64_t seed = 0;
  int max_steps = 0;  // 0 = default: 200 grid, 500 continuous
};

/// Objective specification shared by all instances of an environment kind:
/// atom set, LTL_f formula, and the labels the environment can emit.
struct Objective {
  ltlf::AtomSet atoms;
  std::string formula;
  std::vector<Label> feasible;
};

const Objective& objective(EnvKind kind);

/// Compiled objective automaton for an environment kind (minimized, with
/// the environment's feasible label set).
std::shared_ptr<const Dfa> objective_dfa(EnvKind kind);

struct StepResult {
  double reward = 0.0;
  bool done = false;
  bool completed = false;     // objective automaton reached acceptance
  int items = 0;              // items collected this step (+1 reward each)
  bool boundary_clamped = false;  // continuous only, extra -0.1
  Label label = 0;
  int omega = 0;
};

/// Episode interface over an NMRDP with its labeling function and objective
/// automaton tracked internally. One instance is owned by one trial.
class Env {
 public:
  virtual ~Env() = default;

  const EnvSpec& spec() const { return spec_; }
  const Dfa& dfa() const { return *dfa_; }
  std::shared_ptr<const Dfa> dfa_ptr() const { return dfa_; }
  int max_steps() const { return max_steps_; }

  /// Restores the seed-determined layout and initial state; applies the
  /// initial label to the automaton.
  virtual void reset() = 0;

  virtual int num_actions() const = 0;  // 0 for continuous action spaces
  virtual StepResult step(int action);
  virtual StepResult step(const Eigen::Vector2d& action);

  /// Compact product-free state index for tabular agents (grid only).
  virtual std::uint64_t state_id() const = 0;
  virtual Eigen::VectorXd features() const = 0;
  virtual int feature_dim() const = 0;

  int omega() const { return omega_; }
  bool done() const { return done_; }
  int steps() const { return steps_; }

 protected:
  Env(EnvSpec spec, std::shared_ptr<const Dfa> dfa, int max_steps)
      : spec_(spec), dfa_(std::move(dfa)), max_steps_(max_steps) {}

  EnvSpec spec_;
  std::shared_ptr<const Dfa> dfa_;
  int max_steps_;
  int omega_ = 0;
  bool done_ = false;
  int steps_ = 0;
};

struct GenerationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::unique_ptr<Env> make_env(const EnvSpec& spec);

/// Line record for replay/trace dumps:
/// step,state_digest,action,reward,label,omega
std::string trace_record(int step, std::uint64_t state_digest,
                         const std::string& action, double reward,
                         Label label, int omega);

}  // namespace autodistill::envs

#endif
