#pragma once

// Exact Linear Ordering Problem on small preference matrices.
//
// Given M (k x k, entries in halves), find the order of the k groups that
// maximises the sum of m[earlier][later]. Two solvers share one contract:
// a subset dynamic program (k <= 24) and a k! enumeration (k <= 9) used as
// an oracle.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "concordance/error.hpp"
#include "concordance/half_count.hpp"
#include "concordance/ranking.hpp"

namespace concordance {

inline constexpr std::size_t kMaxDpGroups = 24;
inline constexpr std::size_t kMaxBruteForceGroups = 9;

/// m[r][s]: how often an element of group r precedes an element of group s.
/// Entries are held in halves; the diagonal is ignored.
class PreferenceMatrix {
 public:
  PreferenceMatrix() = default;
  explicit PreferenceMatrix(std::size_t k) : k_(k), halves_(k * k, 0) {}

  /// Whole-unit entries, row major. Diagonal values are ignored.
  static PreferenceMatrix from_units(const std::vector<std::vector<double>>& rows) {
    PreferenceMatrix m(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != rows.size()) fail(ErrorKind::structural, "preference matrix must be square");
      for (std::size_t s = 0; s < rows.size(); ++s) {
        if (r == s) continue;
        const double twice = rows[r][s] * 2.0;
        if (twice != static_cast<double>(static_cast<std::int64_t>(twice)) || twice < 0)
          fail(ErrorKind::structural, "preference entries must be nonnegative multiples of 1/2");
        m.set(r, s, HalfCount::from_halves(static_cast<std::int64_t>(twice)));
      }
    }
    return m;
  }

  std::size_t k() const { return k_; }

  HalfCount at(std::size_t r, std::size_t s) const { return HalfCount::from_halves(halves_[r * k_ + s]); }
  std::int64_t halves(std::size_t r, std::size_t s) const { return halves_[r * k_ + s]; }
  void set(std::size_t r, std::size_t s, HalfCount v) { halves_[r * k_ + s] = v.halves(); }
  void add_halves(std::size_t r, std::size_t s, std::int64_t h) { halves_[r * k_ + s] += h; }

  /// Sum of all off-diagonal entries.
  HalfCount total() const {
    std::int64_t sum = 0;
    for (std::size_t r = 0; r < k_; ++r)
      for (std::size_t s = 0; s < k_; ++s)
        if (r != s) sum += halves(r, s);
    return HalfCount::from_halves(sum);
  }

  PreferenceMatrix transposed() const {
    PreferenceMatrix t(k_);
    for (std::size_t r = 0; r < k_; ++r)
      for (std::size_t s = 0; s < k_; ++s) t.halves_[s * k_ + r] = halves_[r * k_ + s];
    return t;
  }

  /// Rows and columns moved so that old group g becomes new group relabel[g].
  PreferenceMatrix relabeled(const std::vector<GroupIndex>& relabel) const {
    PreferenceMatrix out(k_);
    for (std::size_t r = 0; r < k_; ++r)
      for (std::size_t s = 0; s < k_; ++s) out.halves_[relabel[r] * k_ + relabel[s]] = halves_[r * k_ + s];
    return out;
  }

  friend bool operator==(const PreferenceMatrix&, const PreferenceMatrix&) = default;

 private:
  std::size_t k_ = 0;
  std::vector<std::int64_t> halves_;
};

/// Objective of a given group order: sum of m[order[i]][order[j]] over i < j.
inline HalfCount order_value(const PreferenceMatrix& m, const std::vector<GroupIndex>& order) {
  std::int64_t sum = 0;
  for (std::size_t i = 0; i < order.size(); ++i)
    for (std::size_t j = i + 1; j < order.size(); ++j) sum += m.halves(order[i], order[j]);
  return HalfCount::from_halves(sum);
}

struct LopSolution {
  std::vector<GroupIndex> order;
  HalfCount value;
  bool optimal = true;
};

/// Subset DP with reusable scratch space.
///
/// suffix[S] is the best objective obtainable by ordering the groups outside S
/// after every group of S has been placed. Walking forward from the empty set
/// and always taking the smallest index that attains the optimum yields the
/// lexicographically smallest optimal order.
class LopSolver {
 public:
  LopSolution solve(const PreferenceMatrix& m) {
    const auto k = m.k();
    if (k == 0) fail(ErrorKind::structural, "LOP: empty matrix");
    if (k > kMaxDpGroups)
      fail(ErrorKind::capacity, "LOP: " + std::to_string(k) + " groups exceeds the subset-DP limit of " +
                                    std::to_string(kMaxDpGroups));
    fill(m);

    LopSolution out;
    out.value = HalfCount::from_halves(suffix_[0]);
    std::uint32_t placed = 0;
    for (std::size_t step = 0; step < k; ++step) {
      for (std::uint32_t j = 0; j < k; ++j) {
        if (placed & (1u << j)) continue;
        const auto next = placed | (1u << j);
        if (gain(m, placed, j) + suffix_[next] == suffix_[placed]) {
          out.order.push_back(j);
          placed = next;
          break;
        }
      }
    }
    return out;
  }

  /// Optimal objective only, in halves.
  std::int64_t value_halves(const PreferenceMatrix& m) {
    if (m.k() > kMaxDpGroups) fail(ErrorKind::capacity, "LOP: too many groups for subset DP");
    fill(m);
    return suffix_[0];
  }

 private:
  // Placing j directly after `placed` puts j ahead of every group still outside.
  static std::int64_t gain(const PreferenceMatrix& m, std::uint32_t placed, std::uint32_t j) {
    std::int64_t g = 0;
    for (std::uint32_t i = 0; i < m.k(); ++i)
      if (i != j && !(placed & (1u << i))) g += m.halves(j, i);
    return g;
  }

  void fill(const PreferenceMatrix& m) {
    const auto k = m.k();
    const std::uint32_t full = (1u << k) - 1;
    suffix_.assign(std::size_t{full} + 1, 0);
    for (std::uint32_t s = full; s-- > 0;) {
      std::int64_t best = INT64_MIN;
      for (std::uint32_t j = 0; j < k; ++j) {
        if (s & (1u << j)) continue;
        best = std::max(best, gain(m, s, j) + suffix_[s | (1u << j)]);
      }
      suffix_[s] = best;
    }
  }

  std::vector<std::int64_t> suffix_;
};

inline LopSolution lop_exact_dp(const PreferenceMatrix& m) { return LopSolver{}.solve(m); }

/// Every one of the k! orders with its objective, in lexicographic order.
inline std::vector<std::pair<std::vector<GroupIndex>, HalfCount>> lop_all_orders(const PreferenceMatrix& m) {
  if (m.k() > kMaxBruteForceGroups)
    fail(ErrorKind::capacity, "LOP brute force: " + std::to_string(m.k()) + " groups exceeds the limit of " +
                                  std::to_string(kMaxBruteForceGroups));
  std::vector<GroupIndex> order(m.k());
  std::iota(order.begin(), order.end(), GroupIndex{0});
  std::vector<std::pair<std::vector<GroupIndex>, HalfCount>> out;
  do {
    out.emplace_back(order, order_value(m, order));
  } while (std::next_permutation(order.begin(), order.end()));
  return out;
}

inline LopSolution lop_bruteforce(const PreferenceMatrix& m) {
  if (m.k() == 0) fail(ErrorKind::structural, "LOP: empty matrix");
  LopSolution best;
  bool first = true;
  for (auto& [order, value] : lop_all_orders(m)) {
    if (first || value > best.value) {
      best.order = order;
      best.value = value;
      first = false;
    }
  }
  return best;
}

}  // namespace concordance
