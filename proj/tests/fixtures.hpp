#pragma once

// Worked-example data and independent brute-force oracles shared by the unit
// and acceptance suites. Nothing here calls the library's LOP solvers or
// enumerator; oracles work from raw label sequences.

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "concordance/ranking.hpp"

namespace concordance::testing {

/// Recovery hours per treatment, untied version.
inline std::vector<Record> hours_untied() {
  std::vector<Record> r;
  for (double v : {12, 13, 15, 20, 23, 28, 30, 32, 40, 48}) r.push_back({"A", v});
  for (double v : {29, 31, 49, 52, 54}) r.push_back({"B", v});
  for (double v : {24, 26, 44}) r.push_back({"C", v});
  return r;
}

/// Same experiment with three cross-group ties (24, 29, 49).
inline std::vector<Record> hours_tied() {
  std::vector<Record> r;
  for (double v : {12, 13, 15, 20, 24, 29, 30, 32, 40, 49}) r.push_back({"A", v});
  for (double v : {29, 31, 49, 52, 54}) r.push_back({"B", v});
  for (double v : {24, 26, 44}) r.push_back({"C", v});
  return r;
}

inline constexpr const char* kUntiedSequence = "a a a a a c c a b a b a a c a b b b";
inline constexpr const char* kTiedSequence = "a a a a (a c) c (a b) a b a a c (a b) b b";

/// "abac" -> {0, 1, 0, 2}
inline std::vector<GroupIndex> letters(const std::string& s) {
  std::vector<GroupIndex> out;
  for (char c : s)
    if (c != ' ') out.push_back(static_cast<GroupIndex>(c - 'a'));
  return out;
}

struct Table4Row {
  const char* arrangement;
  int disorder;
  double tau;
  double kw;
};

/// All 90 arrangements of sizes (2,2,2) with disorder, tau (4 d.p.) and KW (2 d.p.).
inline const std::vector<Table4Row>& table4() {
  static const std::vector<Table4Row> rows = {
#include "table4_rows.inc"
  };
  return rows;
}

// ---------------------------------------------------------------- oracles --

/// Every distinct arrangement of the label multiset, via std::next_permutation.
inline std::vector<std::vector<GroupIndex>> all_arrangements(const std::vector<std::int64_t>& sizes) {
  std::vector<GroupIndex> labels;
  for (std::size_t g = 0; g < sizes.size(); ++g) labels.insert(labels.end(), sizes[g], static_cast<GroupIndex>(g));
  std::vector<std::vector<GroupIndex>> out;
  do {
    out.push_back(labels);
  } while (std::next_permutation(labels.begin(), labels.end()));
  return out;
}

/// Pairwise precedence counts in halves, by direct O(n^2) pair inspection.
/// `block_of[i]` identifies the tie-block of position i.
inline std::vector<std::vector<std::int64_t>> naive_preference_halves(const std::vector<GroupIndex>& labels,
                                                                      const std::vector<std::size_t>& block_of,
                                                                      std::size_t k) {
  std::vector<std::vector<std::int64_t>> m(k, std::vector<std::int64_t>(k, 0));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    for (std::size_t j = i + 1; j < labels.size(); ++j) {
      if (labels[i] == labels[j]) continue;
      if (block_of[i] == block_of[j]) {
        m[labels[i]][labels[j]] += 1;
        m[labels[j]][labels[i]] += 1;
      } else {
        m[labels[i]][labels[j]] += 2;
      }
    }
  }
  return m;
}

inline std::vector<std::vector<std::int64_t>> naive_preference_halves(const std::vector<GroupIndex>& labels,
                                                                      std::size_t k) {
  std::vector<std::size_t> block_of(labels.size());
  std::iota(block_of.begin(), block_of.end(), std::size_t{0});
  return naive_preference_halves(labels, block_of, k);
}

/// Disorder in halves: try every group order, count the preference mass it reverses.
inline std::int64_t naive_disorder_halves(const std::vector<std::vector<std::int64_t>>& m) {
  const auto k = m.size();
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::int64_t best = INT64_MAX;
  do {
    std::int64_t reversed = 0;
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = i + 1; j < k; ++j) reversed += m[order[j]][order[i]];
    best = std::min(best, reversed);
  } while (std::next_permutation(order.begin(), order.end()));
  return best;
}

/// KW from ranks 1..n of an untied label sequence.
inline double naive_kw(const std::vector<GroupIndex>& labels, std::size_t k) {
  const double n = static_cast<double>(labels.size());
  std::vector<double> sums(k, 0.0), counts(k, 0.0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    sums[labels[i]] += static_cast<double>(i + 1);
    counts[labels[i]] += 1.0;
  }
  // Between-group sum of squares of mean ranks, scaled.
  const double mean = (n + 1.0) / 2.0;
  double ss = 0.0;
  for (std::size_t g = 0; g < k; ++g) ss += counts[g] * (sums[g] / counts[g] - mean) * (sums[g] / counts[g] - mean);
  return 12.0 / (n * (n + 1.0)) * ss;
}

inline std::uint64_t factorial_ratio(const std::vector<std::int64_t>& sizes) {
  // n! / prod n_i! via repeated binomials in 64-bit (test sizes are small).
  std::uint64_t result = 1, running = 0;
  for (auto s : sizes)
    for (std::int64_t j = 1; j <= s; ++j) {
      ++running;
      result = result * running / static_cast<std::uint64_t>(j);
    }
  return result;
}

}  // namespace concordance::testing
