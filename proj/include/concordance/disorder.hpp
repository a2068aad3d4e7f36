#pragma once

// The Concordance coefficient: disorder of an arrangement (Kendall-tau
// distance to the nearest arrangement listing every group consecutively),
// the maximum attainable disorder, and tau = 1 - disorder / max_disorder.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "concordance/combinatorics.hpp"
#include "concordance/error.hpp"
#include "concordance/half_count.hpp"
#include "concordance/lop.hpp"
#include "concordance/ranking.hpp"

namespace concordance {

/// Cross-group precedence counts. Pairs inside one tie-block credit 1/2 to
/// each direction; same-group pairs are never counted.
inline PreferenceMatrix preference_matrix(const Arrangement& arr, const GroupSizes& sizes) {
  arr.check_against(sizes);
  const auto k = sizes.k();
  PreferenceMatrix m(k);
  std::vector<std::int64_t> placed(k, 0);
  std::vector<std::int64_t> in_block(k, 0);

  for (std::size_t b = 0; b < arr.block_count(); ++b) {
    std::fill(in_block.begin(), in_block.end(), 0);
    for (auto g : arr.block(b)) ++in_block[g];
    for (std::size_t g = 0; g < k; ++g) {
      if (in_block[g] == 0) continue;
      for (std::size_t h = 0; h < k; ++h) {
        if (h == g) continue;
        m.add_halves(h, g, 2 * placed[h] * in_block[g]);
        m.add_halves(h, g, in_block[h] * in_block[g]);
      }
    }
    for (std::size_t g = 0; g < k; ++g) placed[g] += in_block[g];
  }
  return m;
}

/// Generalized pentagonal number: l(3l-1)/2 for b = 2l, l(3l+1)/2 for b = 2l+1.
constexpr std::int64_t pentagonal(std::int64_t b) {
  const auto l = b / 2;
  return b % 2 == 0 ? l * (3 * l - 1) / 2 : l * (3 * l + 1) / 2;
}

/// Number of groups with odd cardinality.
inline std::int64_t odd_group_count(const GroupSizes& sizes) {
  return std::count_if(sizes.values().begin(), sizes.values().end(), [](auto s) { return s % 2 != 0; });
}

/// sum_{r<s} n_r n_s - (GP_b + sum_{r<s} floor(n_r n_s / 2)).
inline std::int64_t max_disorder(const GroupSizes& sizes) {
  if (sizes.k() < 2) fail(ErrorKind::degenerate, "max disorder needs at least two groups");
  std::int64_t floors = 0;
  for (std::size_t r = 0; r < sizes.k(); ++r)
    for (std::size_t s = r + 1; s < sizes.k(); ++s) floors += sizes[r] * sizes[s] / 2;
  return sizes.total_cross_pairs() - (pentagonal(odd_group_count(sizes)) + floors);
}

struct DisorderResult {
  HalfCount disorder;
  std::int64_t max_disorder = 0;
  double tau = 1.0;
  std::vector<GroupIndex> closest_order;
  std::int64_t total_pairs = 0;
  HalfCount lop_value;
  bool degenerate = false;  // max_disorder == 0: tau fixed at 1, no test possible

  /// tau as the exact fraction (2 max - 2 disorder) / (2 max).
  std::pair<std::int64_t, std::int64_t> tau_fraction() const {
    if (degenerate) return {1, 1};
    return {2 * max_disorder - disorder.halves(), 2 * max_disorder};
  }
};

inline DisorderResult disorder(const Arrangement& arr, const GroupSizes& sizes) {
  if (sizes.k() < 2) fail(ErrorKind::degenerate, "disorder needs at least two groups");
  const auto m = preference_matrix(arr, sizes);
  auto lop = lop_exact_dp(m);

  DisorderResult out;
  out.total_pairs = sizes.total_cross_pairs();
  out.lop_value = lop.value;
  out.closest_order = std::move(lop.order);
  out.disorder = HalfCount::whole(out.total_pairs) - lop.value;
  out.max_disorder = max_disorder(sizes);
  if (out.max_disorder <= 0) {
    out.degenerate = true;
    out.tau = 1.0;
  } else {
    out.tau = 1.0 - out.disorder.value() / static_cast<double>(out.max_disorder);
  }
  return out;
}

/// Independent route: minimum over all k! group orders of the preference mass
/// that the order reverses.
inline HalfCount disorder_oracle(const Arrangement& arr, const GroupSizes& sizes) {
  if (sizes.k() > kMaxBruteForceGroups)
    fail(ErrorKind::capacity, "disorder oracle: too many groups for k! enumeration");
  const auto m = preference_matrix(arr, sizes);
  const auto total = m.total();
  std::optional<HalfCount> best;
  for (const auto& [order, kept] : lop_all_orders(m)) {
    const auto reversed = total - kept;
    if (!best || reversed < *best) best = reversed;
  }
  return *best;
}

inline constexpr std::uint64_t kMaxDisorderBruteForceLimit = 10'000'000;

/// Largest disorder over every distinct arrangement of the multiset.
inline HalfCount max_disorder_bruteforce(const GroupSizes& sizes) {
  if (sizes.k() < 2) fail(ErrorKind::degenerate, "max disorder needs at least two groups");
  if (multinomial(sizes) > kMaxDisorderBruteForceLimit)
    fail(ErrorKind::capacity, "max disorder brute force: " + to_string(multinomial(sizes)) +
                                  " arrangements exceeds the limit of " + std::to_string(kMaxDisorderBruteForceLimit));
  std::vector<GroupIndex> labels;
  for (std::size_t g = 0; g < sizes.k(); ++g) labels.insert(labels.end(), sizes[g], static_cast<GroupIndex>(g));

  LopSolver solver;
  const auto total = HalfCount::whole(sizes.total_cross_pairs());
  HalfCount best;
  do {
    const auto m = preference_matrix(Arrangement(labels), sizes);
    best = std::max(best, total - HalfCount::from_halves(solver.value_halves(m)));
  } while (std::next_permutation(labels.begin(), labels.end()));
  return best;
}

}  // namespace concordance
