#include "autodistill/envs/env.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <random>
#include <set>

#include "autodistill/ltlf/parser.hpp"

namespace autodistill::envs {

std::string to_string(EnvKind kind) {
  switch (kind) {
    case EnvKind::blind_craftsman: return "blind_craftsman";
    case EnvKind::dungeon_quest: return "dungeon_quest";
    case EnvKind::diamond_mine: return "diamond_mine";
  }
  return "?";
}

EnvKind env_kind_from_string(const std::string& s) {
  if (s == "blind_craftsman") return EnvKind::blind_craftsman;
  if (s == "dungeon_quest") return EnvKind::dungeon_quest;
  if (s == "diamond_mine") return EnvKind::diamond_mine;
  throw std::invalid_argument("unknown environment kind '" + s + "'");
}

namespace {

Objective make_objective(EnvKind kind) {
  switch (kind) {
    case EnvKind::blind_craftsman: {
      ltlf::AtomSet atoms({"wood", "factory", "tools_ge_3", "home"});
      // At most one event per step; tools_ge_3 is level-triggered.
      std::vector<Label> feasible;
      for (Label event : {Label{0}, Label{1} << 0, Label{1} << 1, Label{1} << 3})
        for (Label tools : {Label{0}, Label{1} << 2})
          feasible.push_back(event | tools);
      return Objective{std::move(atoms),
                       "G(!wood | F factory) & F(tools_ge_3 & home)",
                       std::move(feasible)};
    }
    case EnvKind::dungeon_quest: {
      ltlf::AtomSet atoms({"key", "shield", "sword", "dragon"});
      std::vector<Label> feasible{0, 1, 2, 4, 8};
      return Objective{std::move(atoms),
                       "F dragon & (key R !sword) & (sword R !dragon) & "
                       "(shield R !dragon)",
                       std::move(feasible)};
    }
    case EnvKind::diamond_mine: {
      std::vector<std::string> names{"wood", "diamond"};
      for (int g = 1; g <= 10; ++g) names.push_back("gold_" + std::to_string(g));
      names.push_back("home");
      ltlf::AtomSet atoms(std::move(names));
      std::vector<Label> feasible{0};
      for (int b = 0; b < 13; ++b) feasible.push_back(Label{1} << b);
      std::string phi =
          "F home & (!F gold_1 | !F wood) & (wood R !diamond)";
      for (int g = 1; g <= 9; ++g)
        phi += " & (gold_" + std::to_string(g) + " R !gold_" +
               std::to_string(g + 1) + ")";
      phi += " & ((diamond | gold_10) R !home)";
      return Objective{std::move(atoms), std::move(phi), std::move(feasible)};
    }
  }
  throw std::logic_error("make_objective: bad kind");
}

}  // namespace

const Objective& objective(EnvKind kind) {
  static const Objective bc = make_objective(EnvKind::blind_craftsman);
  static const Objective dq = make_objective(EnvKind::dungeon_quest);
  static const Objective dm = make_objective(EnvKind::diamond_mine);
  switch (kind) {
    case EnvKind::blind_craftsman: return bc;
    case EnvKind::dungeon_quest: return dq;
    case EnvKind::diamond_mine: return dm;
  }
  throw std::logic_error("objective: bad kind");
}

std::shared_ptr<const Dfa> objective_dfa(EnvKind kind) {
  static std::mutex mu;
  static std::map<EnvKind, std::shared_ptr<const Dfa>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(kind);
  if (it != cache.end()) return it->second;
  const Objective& obj = objective(kind);
  ltlf::CompileOptions opt;
  opt.feasible = obj.feasible;
  auto dfa = std::make_shared<const Dfa>(
      ltlf::compile(ltlf::parse(obj.formula, obj.atoms), obj.atoms, opt));
  cache.emplace(kind, dfa);
  return dfa;
}

StepResult Env::step(int) {
  throw std::logic_error("discrete actions unsupported by this environment");
}
StepResult Env::step(const Eigen::Vector2d&) {
  throw std::logic_error(
      "continuous actions unsupported by this environment");
}

std::string trace_record(int step, std::uint64_t state_digest,
                         const std::string& action, double reward,
                         Label label, int omega) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%.17g", reward);
  return std::to_string(step) + "," + std::to_string(state_digest) + "," +
         action + "," + buf + "," + std::to_string(label) + "," +
         std::to_string(omega);
}

// ---------------------------------------------------------------------------
// Grid environments
// ---------------------------------------------------------------------------

namespace {

constexpr double kStepPenalty = -0.1;
constexpr int kWoodCap = 2;
constexpr int kToolGoal = 3;
constexpr int kIronGoal = 30;
constexpr int kGoldGoal = 10;

struct Inventory {
  int wood = 0;
  int tools = 0;
  bool key = false, sword = false, shield = false;
  bool dm_wood = false, pickaxe = false, diamond = false;
  int iron = 0, gold = 0;
};

}  // namespace

class GridEnv final : public Env {
 public:
  GridEnv(const EnvSpec& spec, std::shared_ptr<const Dfa> dfa, int max_steps)
      : Env(spec, std::move(dfa), max_steps),
        width_(spec.geometry.width),
        height_(spec.geometry.height) {
    generate_layout();
    reset();
  }

  void reset() override {
    inv_ = Inventory{};
    agent_ = start_;
    steps_ = 0;
    done_ = false;
    wood_tiles_ = wood_layout_;
    gold_tiles_ = gold_layout_;
    key_present_ = chest_present_ = shield_present_ = true;
    dm_wood_present_ = diamond_present_ = true;
    omega_ = dfa_->step(dfa_->initial(), initial_label());
  }

  int num_actions() const override { return 4; }

  StepResult step(int action) override {
    if (done_) throw std::logic_error("step after episode end; reset first");
    if (action < 0 || action >= 4)
      throw std::invalid_argument("grid action out of range");
    static const int dx[4] = {1, -1, 0, 0};
    static const int dy[4] = {0, 0, 1, -1};
    int nx = agent_ % width_ + dx[action];
    int ny = agent_ / width_ + dy[action];
    int next = agent_;
    if (nx >= 0 && nx < width_ && ny >= 0 && ny < height_) {
      int cell = ny * width_ + nx;
      if (!obstacles_.count(cell)) next = cell;
    }
    const bool moved = next != agent_;
    agent_ = next;

    StepResult r;
    r.reward = kStepPenalty;
    interact(moved, r);

    r.reward += r.items;
    ++steps_;
    omega_ = dfa_->step(omega_, r.label);
    r.omega = omega_;
    if (dfa_->accepting(omega_)) {
      r.completed = true;
      r.reward += 100.0;
      done_ = true;
    } else if (steps_ >= max_steps_) {
      done_ = true;
    }
    r.done = done_;
    return r;
  }

  std::uint64_t state_id() const override {
    std::uint64_t id = agent_;
    switch (spec_.kind) {
      case EnvKind::blind_craftsman:
        return (id * 3 + inv_.wood) * 4 + std::min(inv_.tools, kToolGoal);
      case EnvKind::dungeon_quest:
        return id * 8 + (inv_.key ? 1 : 0) + (inv_.sword ? 2 : 0) +
               (inv_.shield ? 4 : 0);
      case EnvKind::diamond_mine:
        id = id * 2 + (inv_.dm_wood ? 1 : 0);
        id = id * 2 + (inv_.pickaxe ? 1 : 0);
        id = id * 2 + (inv_.diamond ? 1 : 0);
        id = id * 11 + inv_.gold;
        id = id * 31 + std::min(inv_.iron, kIronGoal);
        return id;
    }
    return id;
  }

  int feature_dim() const override {
    switch (spec_.kind) {
      case EnvKind::blind_craftsman:
        return 8 + 2 * static_cast<int>(wood_layout_.size());
      case EnvKind::dungeon_quest: return 13;
      case EnvKind::diamond_mine:
        return 13 + 2 * static_cast<int>(gold_layout_.size()) +
               2 * static_cast<int>(iron_tiles_.size());
    }
    return 0;
  }

  Eigen::VectorXd features() const override {
    Eigen::VectorXd f(feature_dim());
    int i = 0;
    auto put_cell = [&](int cell) {
      f[i++] = (cell % width_) / double(width_ - 1);
      f[i++] = (cell / width_) / double(height_ - 1);
    };
    put_cell(agent_);
    switch (spec_.kind) {
      case EnvKind::blind_craftsman:
        put_cell(factory_);
        put_cell(home_);
        for (int c : wood_layout_) put_cell(c);
        f[i++] = inv_.wood / double(kWoodCap);
        f[i++] = std::min(inv_.tools, kToolGoal) / double(kToolGoal);
        break;
      case EnvKind::dungeon_quest:
        put_cell(key_);
        put_cell(chest_);
        put_cell(shield_);
        put_cell(dragon_);
        f[i++] = inv_.key ? 1.0 : 0.0;
        f[i++] = inv_.sword ? 1.0 : 0.0;
        f[i++] = inv_.shield ? 1.0 : 0.0;
        break;
      case EnvKind::diamond_mine:
        put_cell(dm_wood_);
        put_cell(diamond_);
        put_cell(home_);
        for (int c : gold_layout_) put_cell(c);
        for (int c : iron_tiles_) put_cell(c);
        f[i++] = inv_.dm_wood ? 1.0 : 0.0;
        f[i++] = inv_.pickaxe ? 1.0 : 0.0;
        f[i++] = inv_.diamond ? 1.0 : 0.0;
        f[i++] = inv_.gold / double(kGoldGoal);
        f[i++] = std::min(inv_.iron, kIronGoal) / double(kIronGoal);
        break;
    }
    return f;
  }

 private:
  Label atom(const char* name) const {
    return Label{1} << dfa_->atoms().index(name);
  }

  Label initial_label() const { return 0; }

  void interact(bool moved, StepResult& r) {
    switch (spec_.kind) {
      case EnvKind::blind_craftsman: {
        if (moved && wood_tiles_.count(agent_) && inv_.wood < kWoodCap) {
          ++inv_.wood;
          ++r.items;
          r.label |= atom("wood");
        }
        if (moved && agent_ == factory_ && inv_.wood > 0) {
          inv_.tools += inv_.wood;
          r.items += inv_.wood;
          inv_.wood = 0;
          r.label |= atom("factory");
        }
        if (moved && agent_ == home_) r.label |= atom("home");
        if (inv_.tools >= kToolGoal) r.label |= atom("tools_ge_3");
        break;
      }
      case EnvKind::dungeon_quest: {
        if (!moved) break;
        if (agent_ == key_ && key_present_) {
          key_present_ = false;
          inv_.key = true;
          ++r.items;
          r.label |= atom("key");
        } else if (agent_ == shield_ && shield_present_) {
          shield_present_ = false;
          inv_.shield = true;
          ++r.items;
          r.label |= atom("shield");
        } else if (agent_ == chest_ && chest_present_ && inv_.key) {
          chest_present_ = false;
          inv_.sword = true;
          ++r.items;
          r.label |= atom("sword");
        } else if (agent_ == dragon_ && inv_.sword && inv_.shield) {
          r.label |= atom("dragon");
        }
        break;
      }
      case EnvKind::diamond_mine: {
        if (!moved) break;
        const bool gold_path = inv_.gold > 0;
        const bool diamond_path = inv_.dm_wood || inv_.diamond;
        if (agent_ == dm_wood_ && dm_wood_present_ && !gold_path) {
          dm_wood_present_ = false;
          inv_.dm_wood = true;
          ++r.items;
          r.label |= atom("wood");
        } else if (gold_tiles_.count(agent_) && !diamond_path &&
                   inv_.gold < kGoldGoal) {
          gold_tiles_.erase(agent_);
          ++inv_.gold;
          ++r.items;
          r.label |= atom(("gold_" + std::to_string(inv_.gold)).c_str());
        } else if (iron_tiles_.count(agent_) && !gold_path &&
                   inv_.iron < kIronGoal && !inv_.diamond) {
          ++inv_.iron;
          ++r.items;
        } else if (agent_ == diamond_ && diamond_present_ && inv_.pickaxe &&
                   !gold_path) {
          diamond_present_ = false;
          inv_.diamond = true;
          ++r.items;
          r.label |= atom("diamond");
        } else if (agent_ == home_ &&
                   (inv_.diamond || inv_.gold >= kGoldGoal)) {
          r.label |= atom("home");
        }
        if (inv_.dm_wood && inv_.iron >= kIronGoal && !inv_.pickaxe)
          inv_.pickaxe = true;  // crafted automatically
        break;
      }
    }
  }

  void generate_layout() {
    if (width_ < 5 || height_ < 5)
      throw GenerationError("grid dimensions must be at least 5x5");
    std::mt19937_64 rng(spec_.seed * 0x9e3779b97f4a7c15ULL + 1);
    for (int attempt = 0; attempt < 50; ++attempt) {
      if (try_layout(rng)) return;
    }
    throw GenerationError("could not generate a connected layout");
  }

  bool try_layout(std::mt19937_64& rng) {
    const int n = width_ * height_;
    std::vector<int> cells(n);
    for (int i = 0; i < n; ++i) cells[i] = i;
    std::shuffle(cells.begin(), cells.end(), rng);
    std::size_t next = 0;
    auto take = [&]() { return cells.at(next++); };

    obstacles_.clear();
    if (spec_.obstacles) {
      int count = static_cast<int>(n * 0.15);
      for (int i = 0; i < count; ++i) obstacles_.insert(take());
    }

    wood_layout_.clear();
    gold_layout_.clear();
    iron_tiles_.clear();
    switch (spec_.kind) {
      case EnvKind::blind_craftsman: {
        int woods = (n >= 100) ? 8 : 5;
        for (int i = 0; i < woods; ++i) wood_layout_.insert(take());
        factory_ = take();
        home_ = take();
        break;
      }
      case EnvKind::dungeon_quest:
        key_ = take();
        chest_ = take();
        shield_ = take();
        dragon_ = take();
        break;
      case EnvKind::diamond_mine:
        dm_wood_ = take();
        diamond_ = take();
        home_ = take();
        for (int i = 0; i < kGoldGoal; ++i) gold_layout_.insert(take());
        for (int i = 0; i < 4; ++i) iron_tiles_.insert(take());
        break;
    }
    start_ = take();

    // Everything must be reachable from the start cell.
    std::vector<bool> seen(n, false);
    std::vector<int> queue{start_};
    seen[start_] = true;
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
      int c = queue[qi];
      int x = c % width_, y = c / width_;
      const int dx[4] = {1, -1, 0, 0}, dy[4] = {0, 0, 1, -1};
      for (int k = 0; k < 4; ++k) {
        int nx2 = x + dx[k], ny2 = y + dy[k];
        if (nx2 < 0 || nx2 >= width_ || ny2 < 0 || ny2 >= height_) continue;
        int nc = ny2 * width_ + nx2;
        if (seen[nc] || obstacles_.count(nc)) continue;
        seen[nc] = true;
        queue.push_back(nc);
      }
    }
    for (std::size_t i = 0; i < next; ++i)
      if (!obstacles_.count(cells[i]) && !seen[cells[i]]) return false;
    return true;
  }

  int width_, height_;
  std::set<int> obstacles_;
  int start_ = 0, agent_ = 0;
  // Blind Craftsman
  std::set<int> wood_layout_, wood_tiles_;
  int factory_ = -1, home_ = -1;
  // Dungeon Quest
  int key_ = -1, chest_ = -1, shield_ = -1, dragon_ = -1;
  bool key_present_ = true, chest_present_ = true, shield_present_ = true;
  // Diamond Mine
  int dm_wood_ = -1, diamond_ = -1;
  std::set<int> gold_layout_, gold_tiles_, iron_tiles_;
  bool dm_wood_present_ = true, diamond_present_ = true;

  Inventory inv_;
};

// ---------------------------------------------------------------------------
// Continuous environment
// ---------------------------------------------------------------------------

class ContinuousEnv final : public Env {
 public:
  static constexpr double kActionCap = 0.5;   // cm per axis per step
  static constexpr double kRadius = 0.4;      // interaction distance

  ContinuousEnv(const EnvSpec& spec, std::shared_ptr<const Dfa> dfa,
                int max_steps)
      : Env(spec, std::move(dfa), max_steps),
        w_(spec.geometry.width_cm),
        h_(spec.geometry.height_cm) {
    if (w_ <= 0 || h_ <= 0)
      throw GenerationError("continuous dimensions must be positive");
    generate_layout();
    reset();
  }

  void reset() override {
    inv_ = Inventory{};
    agent_ = start_;
    steps_ = 0;
    done_ = false;
    present_.assign(objects_.size(), true);
    inside_.assign(objects_.size(), false);
    omega_ = dfa_->step(dfa_->initial(), 0);
  }

  int num_actions() const override { return 0; }

  StepResult step(const Eigen::Vector2d& action) override {
    if (done_) throw std::logic_error("step after episode end; reset first");
    Eigen::Vector2d a = action.cwiseMax(-kActionCap).cwiseMin(kActionCap);
    Eigen::Vector2d target = agent_ + a;
    StepResult r;
    r.reward = kStepPenalty;
    if (target.x() < 0 || target.x() > w_ || target.y() < 0 ||
        target.y() > h_) {
      r.boundary_clamped = true;
      r.reward += kStepPenalty;  // extra -0.1 for leaving the arena
      target.x() = std::clamp(target.x(), 0.0, w_);
      target.y() = std::clamp(target.y(), 0.0, h_);
    }
    agent_ = target;

    // Entering an object's radius triggers at most one interaction per
    // step (the nearest eligible object).
    int chosen = -1;
    double best = kRadius;
    for (std::size_t i = 0; i < objects_.size(); ++i) {
      double dist = (agent_ - objects_[i].pos).norm();
      bool in = dist < kRadius;
      bool entered = in && !inside_[i];
      inside_[i] = in;
      if (entered && present_[i] && eligible(objects_[i].type) &&
          dist <= best) {
        best = dist;
        chosen = static_cast<int>(i);
      }
    }
    if (chosen >= 0) apply(objects_[chosen], chosen, r);
    if (spec_.kind == EnvKind::blind_craftsman && inv_.tools >= kToolGoal)
      r.label |= atom("tools_ge_3");
    if (spec_.kind == EnvKind::diamond_mine && inv_.dm_wood &&
        inv_.iron >= kIronGoal && !inv_.pickaxe)
      inv_.pickaxe = true;

    r.reward += r.items;
    ++steps_;
    omega_ = dfa_->step(omega_, r.label);
    r.omega = omega_;
    if (dfa_->accepting(omega_)) {
      r.completed = true;
      r.reward += 100.0;
      done_ = true;
    } else if (steps_ >= max_steps_) {
      done_ = true;
    }
    r.done = done_;
    return r;
  }

  std::uint64_t state_id() const override {
    // Quantized digest for trace dumps; not meant for tabular learning.
    std::uint64_t qx = static_cast<std::uint64_t>(agent_.x() * 100);
    std::uint64_t qy = static_cast<std::uint64_t>(agent_.y() * 100);
    return (qx << 32) ^ qy ^ (std::uint64_t(inv_.wood) << 20) ^
           (std::uint64_t(inv_.tools) << 24) ^ (std::uint64_t(inv_.gold) << 28);
  }

  int feature_dim() const override {
    return 2 + 2 * static_cast<int>(objects_.size()) + inventory_dim();
  }

  Eigen::VectorXd features() const override {
    Eigen::VectorXd f(feature_dim());
    int i = 0;
    f[i++] = agent_.x() / w_;
    f[i++] = agent_.y() / h_;
    for (const auto& o : objects_) {
      f[i++] = o.pos.x() / w_;
      f[i++] = o.pos.y() / h_;
    }
    switch (spec_.kind) {
      case EnvKind::blind_craftsman:
        f[i++] = inv_.wood / double(kWoodCap);
        f[i++] = std::min(inv_.tools, kToolGoal) / double(kToolGoal);
        break;
      case EnvKind::dungeon_quest:
        f[i++] = inv_.key ? 1.0 : 0.0;
        f[i++] = inv_.sword ? 1.0 : 0.0;
        f[i++] = inv_.shield ? 1.0 : 0.0;
        break;
      case EnvKind::diamond_mine:
        f[i++] = inv_.dm_wood ? 1.0 : 0.0;
        f[i++] = inv_.pickaxe ? 1.0 : 0.0;
        f[i++] = inv_.diamond ? 1.0 : 0.0;
        f[i++] = inv_.gold / double(kGoldGoal);
        f[i++] = std::min(inv_.iron, kIronGoal) / double(kIronGoal);
        break;
    }
    return f;
  }

 private:
  enum class Obj { Wood, Factory, Home, Key, Chest, Shield, Dragon,
                   Diamond, Gold, Iron };
  struct Object {
    Obj type;
    Eigen::Vector2d pos;
  };

  int inventory_dim() const {
    switch (spec_.kind) {
      case EnvKind::blind_craftsman: return 2;
      case EnvKind::dungeon_quest: return 3;
      case EnvKind::diamond_mine: return 5;
    }
    return 0;
  }

  Label atom(const char* name) const {
    return Label{1} << dfa_->atoms().index(name);
  }

  bool eligible(Obj type) const {
    switch (type) {
      case Obj::Wood:
        return spec_.kind == EnvKind::blind_craftsman
                   ? inv_.wood < kWoodCap
                   : (!inv_.dm_wood && inv_.gold == 0);
      case Obj::Factory: return inv_.wood > 0;
      case Obj::Home:
        return spec_.kind != EnvKind::diamond_mine ||
               (inv_.diamond || inv_.gold >= kGoldGoal);
      case Obj::Key: return !inv_.key;
      case Obj::Chest: return inv_.key && !inv_.sword;
      case Obj::Shield: return !inv_.shield;
      case Obj::Dragon: return inv_.sword && inv_.shield;
      case Obj::Diamond:
        return inv_.pickaxe && !inv_.diamond && inv_.gold == 0;
      case Obj::Gold:
        return !inv_.dm_wood && !inv_.diamond && inv_.gold < kGoldGoal;
      case Obj::Iron:
        return inv_.gold == 0 && inv_.iron < kIronGoal && !inv_.diamond;
    }
    return false;
  }

  void apply(const Object& o, int index, StepResult& r) {
    switch (o.type) {
      case Obj::Wood:
        if (spec_.kind == EnvKind::blind_craftsman) {
          ++inv_.wood;  // wood respawns; object stays present
        } else {
          inv_.dm_wood = true;
          present_[index] = false;
        }
        ++r.items;
        r.label |= atom("wood");
        break;
      case Obj::Factory:
        inv_.tools += inv_.wood;
        r.items += inv_.wood;
        inv_.wood = 0;
        r.label |= atom("factory");
        break;
      case Obj::Home:
        r.label |= atom("home");
        break;
      case Obj::Key:
        inv_.key = true;
        present_[index] = false;
        ++r.items;
        r.label |= atom("key");
        break;
      case Obj::Chest:
        inv_.sword = true;
        ++r.items;
        r.label |= atom("sword");
        break;
      case Obj::Shield:
        inv_.shield = true;
        present_[index] = false;
        ++r.items;
        r.label |= atom("shield");
        break;
      case Obj::Dragon:
        r.label |= atom("dragon");
        break;
      case Obj::Diamond:
        inv_.diamond = true;
        present_[index] = false;
        ++r.items;
        r.label |= atom("diamond");
        break;
      case Obj::Gold:
        ++inv_.gold;
        present_[index] = false;
        ++r.items;
        r.label |= atom(("gold_" + std::to_string(inv_.gold)).c_str());
        break;
      case Obj::Iron:
        ++inv_.iron;
        ++r.items;
        break;
    }
  }

  void generate_layout() {
    std::mt19937_64 rng(spec_.seed * 0x9e3779b97f4a7c15ULL + 2);
    std::uniform_real_distribution<double> ux(kRadius, w_ - kRadius);
    std::uniform_real_distribution<double> uy(kRadius, h_ - kRadius);
    if (w_ <= 2 * kRadius || h_ <= 2 * kRadius)
      throw GenerationError("continuous arena too small for objects");

    std::vector<Obj> wanted;
    switch (spec_.kind) {
      case EnvKind::blind_craftsman:
        for (int i = 0; i < 5; ++i) wanted.push_back(Obj::Wood);
        wanted.push_back(Obj::Factory);
        wanted.push_back(Obj::Home);
        break;
      case EnvKind::dungeon_quest:
        wanted = {Obj::Key, Obj::Chest, Obj::Shield, Obj::Dragon};
        break;
      case EnvKind::diamond_mine:
        wanted = {Obj::Wood, Obj::Diamond, Obj::Home};
        for (int i = 0; i < kGoldGoal; ++i) wanted.push_back(Obj::Gold);
        for (int i = 0; i < 4; ++i) wanted.push_back(Obj::Iron);
        break;
    }

    for (int attempt = 0; attempt < 200; ++attempt) {
      objects_.clear();
      bool ok = true;
      for (Obj t : wanted) {
        Eigen::Vector2d p;
        bool placed = false;
        for (int k = 0; k < 100 && !placed; ++k) {
          p = {ux(rng), uy(rng)};
          placed = true;
          for (const auto& o : objects_)
            if ((o.pos - p).norm() < 2 * kRadius + 0.1) {
              placed = false;
              break;
            }
        }
        if (!placed) {
          ok = false;
          break;
        }
        objects_.push_back(Object{t, p});
      }
      if (!ok) continue;
      bool start_ok = false;
      for (int k = 0; k < 100 && !start_ok; ++k) {
        start_ = {ux(rng), uy(rng)};
        start_ok = true;
        for (const auto& o : objects_)
          if ((o.pos - start_).norm() < kRadius + 0.1) start_ok = false;
      }
      if (start_ok) return;
    }
    throw GenerationError("could not place continuous objects");
  }

  double w_, h_;
  Eigen::Vector2d start_{0, 0}, agent_{0, 0};
  std::vector<Object> objects_;
  std::vector<bool> present_;
  std::vector<bool> inside_;
  Inventory inv_;
};

std::unique_ptr<Env> make_env(const EnvSpec& spec) {
  auto dfa = objective_dfa(spec.kind);
  if (spec.geometry.continuous) {
    int steps = spec.max_steps > 0 ? spec.max_steps : 500;
    return std::make_unique<ContinuousEnv>(spec, std::move(dfa), steps);
  }
  int steps = spec.max_steps > 0 ? spec.max_steps : 200;
  return std::make_unique<GridEnv>(spec, std::move(dfa), steps);
}

}  // namespace autodistill::envs
