#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "concordance/error.hpp"

namespace concordance {

namespace detail {

// Merge sort that returns the number of inversions in `v`.
inline std::int64_t count_inversions(std::vector<std::size_t>& v, std::vector<std::size_t>& scratch, std::size_t lo,
                                     std::size_t hi) {
  if (hi - lo < 2) return 0;
  const auto mid = lo + (hi - lo) / 2;
  auto inv = count_inversions(v, scratch, lo, mid) + count_inversions(v, scratch, mid, hi);
  std::size_t i = lo, j = mid, out = lo;
  while (i < mid && j < hi) {
    if (v[j] < v[i]) {
      inv += static_cast<std::int64_t>(mid - i);
      scratch[out++] = v[j++];
    } else {
      scratch[out++] = v[i++];
    }
  }
  while (i < mid) scratch[out++] = v[i++];
  while (j < hi) scratch[out++] = v[j++];
  for (std::size_t t = lo; t < hi; ++t) v[t] = scratch[t];
  return inv;
}

}  // namespace detail

/// Number of item pairs ordered differently by the two permutations.
template <typename T>
std::int64_t kendall_distance(std::span<const T> p1, std::span<const T> p2) {
  if (p1.size() != p2.size()) fail(ErrorKind::structural, "kendall distance: permutations differ in length");
  std::unordered_map<T, std::size_t> position;
  position.reserve(p1.size());
  for (std::size_t i = 0; i < p1.size(); ++i) {
    if (!position.emplace(p1[i], i).second) fail(ErrorKind::structural, "kendall distance: repeated item");
  }
  std::vector<std::size_t> mapped;
  mapped.reserve(p2.size());
  std::vector<bool> seen(p1.size(), false);
  for (const auto& item : p2) {
    auto it = position.find(item);
    if (it == position.end() || seen[it->second])
      fail(ErrorKind::structural, "kendall distance: permutations hold different items");
    seen[it->second] = true;
    mapped.push_back(it->second);
  }
  std::vector<std::size_t> scratch(mapped.size());
  return detail::count_inversions(mapped, scratch, 0, mapped.size());
}

template <typename T>
std::int64_t kendall_distance(const std::vector<T>& p1, const std::vector<T>& p2) {
  return kendall_distance(std::span<const T>(p1), std::span<const T>(p2));
}

/// 1 - 2 d / (n(n-1)/2), in [-1, 1].
template <typename T>
double kendall_correlation(const std::vector<T>& p1, const std::vector<T>& p2) {
  const auto n = static_cast<double>(p1.size());
  if (p1.size() < 2) fail(ErrorKind::degenerate, "kendall correlation needs at least two items");
  const auto d = static_cast<double>(kendall_distance(p1, p2));
  return 1.0 - 2.0 * d / (n * (n - 1.0) / 2.0);
}

}  // namespace concordance
