#include <autodistill/rl/teacher.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace autodistill::rl {

void TransitionStats::add(int omega, Label sigma, double q) {
  Entry& e = map_[transition_key(omega, sigma)];
  e.omega = omega;
  e.sigma = sigma;
  ++e.eta;
  e.q_sum += q;
}

long long TransitionStats::eta(int omega, Label sigma) const {
  auto it = map_.find(transition_key(omega, sigma));
  return it == map_.end() ? 0 : it->second.eta;
}

std::optional<double> TransitionStats::q_avg(int omega, Label sigma) const {
  auto it = map_.find(transition_key(omega, sigma));
  if (it == map_.end() || it->second.eta == 0) return std::nullopt;
  return it->second.q_sum / static_cast<double>(it->second.eta);
}

std::vector<TransitionStats::Entry> TransitionStats::entries() const {
  std::vector<Entry> out;
  out.reserve(map_.size());
  for (const auto& [k, e] : map_) out.push_back(e);
  std::sort(out.begin(), out.end(), [](const Entry& a, const Entry& b) {
    return a.omega != b.omega ? a.omega < b.omega : a.sigma < b.sigma;
  });
  return out;
}

std::string to_string(Provenance p) {
  return p == Provenance::dynamic_replay ? "dynamic" : "static";
}

Provenance provenance_from_string(const std::string& s) {
  if (s == "dynamic") return Provenance::dynamic_replay;
  if (s == "static") return Provenance::static_abstract;
  throw std::invalid_argument("unknown provenance: " + s);
}

TeacherTable TeacherTable::from_stats(const TransitionStats& stats,
                                      Provenance p) {
  TeacherTable t(p);
  for (const auto& e : stats.entries())
    t.set(e.omega, e.sigma, e.q_sum / static_cast<double>(e.eta), e.eta);
  return t;
}

void TeacherTable::set(int omega, Label sigma, double q_avg, long long eta) {
  if (!std::isfinite(q_avg))
    throw std::invalid_argument("teacher Q-value must be finite");
  map_[transition_key(omega, sigma)] = Cell{q_avg, eta};
}

std::optional<double> TeacherTable::q(int omega, Label sigma) const {
  auto it = map_.find(transition_key(omega, sigma));
  if (it == map_.end()) return std::nullopt;
  return it->second.q;
}

long long TeacherTable::eta(int omega, Label sigma) const {
  auto it = map_.find(transition_key(omega, sigma));
  return it == map_.end() ? 0 : it->second.eta;
}

std::vector<TransitionStats::Entry> TeacherTable::entries() const {
  std::vector<TransitionStats::Entry> out;
  out.reserve(map_.size());
  for (const auto& [k, c] : map_) {
    TransitionStats::Entry e;
    e.omega = static_cast<int>(k >> 32);
    e.sigma = static_cast<Label>(k & 0xffffffffu);
    e.eta = c.eta;
    e.q_sum = c.q;
    out.push_back(e);
  }
  std::sort(out.begin(), out.end(),
            [](const TransitionStats::Entry& a,
               const TransitionStats::Entry& b) {
              return a.omega != b.omega ? a.omega < b.omega : a.sigma < b.sigma;
            });
  return out;
}

void TeacherTable::save(std::ostream& out) const {
  out << "teacher-table v1\n";
  out << "provenance " << to_string(provenance_) << "\n";
  auto es = entries();
  out << "entries " << es.size() << "\n";
  char buf[64];
  for (const auto& e : es) {
    std::snprintf(buf, sizeof(buf), "%.17g", e.q_sum);
    out << e.omega << " " << e.sigma << " " << e.eta << " " << buf << "\n";
  }
}

void TeacherTable::save_file(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  save(out);
  if (!out) throw std::runtime_error("write failed: " + path);
}

TeacherTable TeacherTable::load(std::istream& in) {
  std::string header;
  std::getline(in, header);
  if (header != "teacher-table v1")
    throw std::runtime_error("unrecognized teacher table header: " + header);
  std::string word, prov;
  std::size_t n = 0;
  if (!(in >> word >> prov) || word != "provenance")
    throw std::runtime_error("malformed teacher table: missing provenance");
  TeacherTable t(provenance_from_string(prov));
  if (!(in >> word >> n) || word != "entries")
    throw std::runtime_error("malformed teacher table: missing entry count");
  for (std::size_t i = 0; i < n; ++i) {
    int omega;
    Label sigma;
    long long eta;
    double q;
    if (!(in >> omega >> sigma >> eta >> q))
      throw std::runtime_error("malformed teacher table entry");
    t.set(omega, sigma, q, eta);
  }
  return t;
}

TeacherTable TeacherTable::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  return load(in);
}

AnnealState::AnnealState(double rho) : rho_(rho) {
  if (!(rho > 0.0 && rho <= 1.0))
    throw std::invalid_argument("rho must be in (0, 1]");
}

void AnnealState::observe(int omega, Label sigma, long long times) {
  counts_[transition_key(omega, sigma)] += times;
}

long long AnnealState::eta(int omega, Label sigma) const {
  auto it = counts_.find(transition_key(omega, sigma));
  return it == counts_.end() ? 0 : it->second;
}

double AnnealState::beta(int omega, Label sigma) const {
  return std::pow(rho_, static_cast<double>(eta(omega, sigma)));
}

}  // namespace autodistill::rl
