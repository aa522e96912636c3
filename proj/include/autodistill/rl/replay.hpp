#pragma once

#include <cstddef>
#include <random>
#include <stdexcept>
#include <vector>

namespace autodistill::rl {

// Fixed-capacity ring buffer with priority-proportional sampling.
//
// New experiences enter with priority 1; callers update priorities to the
// squared TD error after each use. Sampling is always with replacement and
// draws index i with probability p_i / sum(p). A Fenwick tree over the
// priorities makes both sampling and priority updates O(log capacity).
template <class Exp>
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity)
      : capacity_(capacity), tree_(capacity + 1, 0.0) {
    if (capacity == 0) throw std::invalid_argument("replay capacity must be > 0");
    items_.reserve(capacity);
    priorities_.reserve(capacity);
  }

  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }

  // Appends with priority 1, overwriting the oldest slot once full.
  // Returns the slot index the experience landed in.
  std::size_t append(Exp e) {
    std::size_t slot;
    if (items_.size() < capacity_) {
      slot = items_.size();
      items_.push_back(std::move(e));
      priorities_.push_back(0.0);
    } else {
      slot = next_;
      next_ = (next_ + 1) % capacity_;
      items_[slot] = std::move(e);
    }
    set_priority(slot, 1.0);
    return slot;
  }

  const Exp& operator[](std::size_t i) const { return items_.at(i); }
  double priority(std::size_t i) const { return priorities_.at(i); }
  double total_priority() const { return prefix(items_.size()); }

  void set_priority(std::size_t i, double p) {
    if (p < 0.0) throw std::invalid_argument("priority must be >= 0");
    double delta = p - priorities_.at(i);
    priorities_[i] = p;
    for (std::size_t k = i + 1; k <= capacity_; k += k & (~k + 1))
      tree_[k] += delta;
  }

  // Draws m indices with replacement, each with probability proportional to
  // its priority. Throws if the buffer is empty or all priorities are zero.
  std::vector<std::size_t> sample(std::size_t m, std::mt19937_64& rng) const {
    double total = total_priority();
    if (items_.empty() || total <= 0.0)
      throw std::logic_error("cannot sample: no positive-priority entries");
    std::uniform_real_distribution<double> dist(0.0, total);
    std::vector<std::size_t> out;
    out.reserve(m);
    for (std::size_t k = 0; k < m; ++k) out.push_back(locate(dist(rng)));
    return out;
  }

 private:
  double prefix(std::size_t n) const {
    double s = 0.0;
    for (std::size_t k = n; k > 0; k -= k & (~k + 1)) s += tree_[k];
    return s;
  }

  // Smallest index whose cumulative priority exceeds u.
  std::size_t locate(double u) const {
    std::size_t pos = 0;
    std::size_t step = 1;
    while (step * 2 <= capacity_) step *= 2;
    for (; step > 0; step /= 2) {
      std::size_t nxt = pos + step;
      if (nxt <= capacity_ && tree_[nxt] <= u) {
        u -= tree_[nxt];
        pos = nxt;
      }
    }
    return pos < items_.size() ? pos : items_.size() - 1;
  }

  std::size_t capacity_;
  std::size_t next_ = 0;
  std::vector<Exp> items_;
  std::vector<double> priorities_;
  std::vector<double> tree_;  // 1-based Fenwick tree of priorities
};

}  // namespace autodistill::rl
