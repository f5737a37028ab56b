#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <vector>

#include "homog/core/error.hpp"

namespace homog {

/// A multi-index alpha = (alpha_1, ..., alpha_d) of nonnegative integers.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> entries) : entries_(std::move(entries)) {
    for (int e : entries_) {
      if (e < 0) throw DomainError("MultiIndex: negative entry");
    }
  }
  MultiIndex(std::initializer_list<int> entries) : MultiIndex(std::vector<int>(entries)) {}

  static MultiIndex zero(int d) { return MultiIndex(std::vector<int>(static_cast<std::size_t>(d), 0)); }
  static MultiIndex unit(int d, int j, int power = 1) {
    std::vector<int> e(static_cast<std::size_t>(d), 0);
    e.at(static_cast<std::size_t>(j)) = power;
    return MultiIndex(std::move(e));
  }

  int dim() const { return static_cast<int>(entries_.size()); }
  int order() const { return std::accumulate(entries_.begin(), entries_.end(), 0); }
  int operator[](int j) const { return entries_[static_cast<std::size_t>(j)]; }
  const std::vector<int>& entries() const { return entries_; }

  /// Componentwise partial order: beta <= alpha iff beta_j <= alpha_j for all j.
  bool le(const MultiIndex& other) const {
    if (other.dim() != dim()) return false;
    for (int j = 0; j < dim(); ++j) {
      if (entries_[j] > other.entries_[j]) return false;
    }
    return true;
  }

  MultiIndex operator+(const MultiIndex& other) const {
    require_dims(other.dim() == dim(), "MultiIndex: dimension mismatch in sum");
    std::vector<int> e(entries_);
    for (int j = 0; j < dim(); ++j) e[j] += other.entries_[j];
    return MultiIndex(std::move(e));
  }

  MultiIndex scaled(int s) const {
    std::vector<int> e(entries_);
    for (int& v : e) v *= s;
    return MultiIndex(std::move(e));
  }

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
  friend auto operator<=>(const MultiIndex&, const MultiIndex&) = default;

 private:
  std::vector<int> entries_;
};

/// All multi-indices of dimension d with |alpha| == order, in lexicographically descending order
/// (for d=2, order 2: (2,0), (1,1), (0,2)).
inline std::vector<MultiIndex> multi_indices_of_order(int d, int order) {
  std::vector<MultiIndex> out;
  if (d <= 0 || order < 0) return out;
  std::vector<int> cur(static_cast<std::size_t>(d), 0);
  auto rec = [&](auto&& self, int pos, int remaining) -> void {
    if (pos == d - 1) {
      cur[pos] = remaining;
      out.emplace_back(cur);
      return;
    }
    for (int v = remaining; v >= 0; --v) {
      cur[pos] = v;
      self(self, pos + 1, remaining - v);
    }
  };
  rec(rec, 0, order);
  return out;
}

/// All multi-indices with |alpha| <= order, grouped by increasing order.
inline std::vector<MultiIndex> multi_indices_up_to(int d, int order) {
  std::vector<MultiIndex> out;
  for (int o = 0; o <= order; ++o) {
    auto level = multi_indices_of_order(d, o);
    out.insert(out.end(), level.begin(), level.end());
  }
  return out;
}

}  // namespace homog
