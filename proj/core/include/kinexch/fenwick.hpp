#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace kinexch {

/// Binary indexed tree over non-negative weights with prefix-sum search.
///
/// Positions are 0-based in the public interface. `find(x)` returns the
/// smallest position whose inclusive prefix sum exceeds `x`, which is the
/// inverse-CDF draw when x is uniform on [0, total()).
template <typename T>
class FenwickTree {
 public:
  FenwickTree() = default;

  explicit FenwickTree(std::span<const T> weights) { assign(weights); }

  void assign(std::span<const T> weights) {
    n_ = weights.size();
    tree_.assign(n_ + 1, T{});
    for (std::size_t i = 1; i <= n_; ++i) {
      tree_[i] += weights[i - 1];
      const std::size_t parent = i + (i & (~i + 1));
      if (parent <= n_) tree_[parent] += tree_[i];
    }
    top_ = 1;
    while ((top_ << 1) <= n_) top_ <<= 1;
  }

  std::size_t size() const noexcept { return n_; }

  void add(std::size_t pos, T delta) {
    for (std::size_t i = pos + 1; i <= n_; i += i & (~i + 1)) tree_[i] += delta;
  }

  /// Sum of weights [0, pos).
  T prefix(std::size_t pos) const {
    T sum{};
    for (std::size_t i = pos; i > 0; i -= i & (~i + 1)) sum += tree_[i];
    return sum;
  }

  T total() const { return prefix(n_); }

  /// Smallest position p with prefix(p + 1) > x. Returns size() when x >= total().
  std::size_t find(T x) const {
    std::size_t idx = 0;
    for (std::size_t step = top_; step != 0; step >>= 1) {
      const std::size_t next = idx + step;
      if (next <= n_ && !(x < tree_[next])) {
        idx = next;
        x -= tree_[next];
      }
    }
    return idx;
  }

 private:
  std::size_t n_ = 0;
  std::size_t top_ = 0;
  std::vector<T> tree_;
};

}  // namespace kinexch
