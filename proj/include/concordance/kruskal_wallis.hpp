#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "concordance/error.hpp"
#include "concordance/ranking.hpp"

namespace concordance {

struct KwResult {
  double kw = 0.0;
  std::optional<double> kw_tie_corrected;  // present iff the arrangement has ties
  std::vector<double> rank_sums;
  std::vector<double> mean_ranks;
  std::vector<std::int64_t> tie_counts;  // sizes of tie-blocks longer than one
};

/// KW = 12 / (n(n+1)) * sum R_i^2 / n_i - 3(n+1), n = total observations.
inline double kw_from_rank_sums(const std::vector<double>& rank_sums, const GroupSizes& sizes) {
  const auto n = static_cast<double>(sizes.n());
  double sum = 0.0;
  for (std::size_t i = 0; i < sizes.k(); ++i) sum += rank_sums[i] * rank_sums[i] / static_cast<double>(sizes[i]);
  return 12.0 / (n * (n + 1.0)) * sum - 3.0 * (n + 1.0);
}

/// Divides by 1 - sum(t^3 - t) / (n^3 - n).
inline double tie_correction(double kw, const std::vector<std::int64_t>& tie_counts, std::int64_t n) {
  if (n < 2) fail(ErrorKind::degenerate, "tie correction needs at least two observations");
  double numerator = 0.0;
  for (auto t : tie_counts) {
    const auto td = static_cast<double>(t);
    numerator += td * td * td - td;
  }
  if (numerator == 0.0) return kw;
  const auto nd = static_cast<double>(n);
  const double denominator = 1.0 - numerator / (nd * nd * nd - nd);
  if (denominator <= 0.0) fail(ErrorKind::degenerate, "tie correction: every observation is tied");
  return kw / denominator;
}

inline KwResult kruskal_wallis(const Arrangement& arr, const GroupSizes& sizes) {
  if (sizes.k() < 2) fail(ErrorKind::degenerate, "Kruskal-Wallis needs at least two groups");
  arr.check_against(sizes);

  KwResult out;
  out.rank_sums = midranks(arr).group_sums(arr, sizes);
  for (std::size_t i = 0; i < sizes.k(); ++i) out.mean_ranks.push_back(out.rank_sums[i] / static_cast<double>(sizes[i]));
  out.kw = kw_from_rank_sums(out.rank_sums, sizes);
  // Tiny negative values come from rounding when all rank sums sit at their means.
  if (out.kw < 0.0 && out.kw > -1e-12) out.kw = 0.0;

  for (std::size_t b = 0; b < arr.block_count(); ++b) {
    const auto len = arr.block(b).size();
    if (len > 1) out.tie_counts.push_back(static_cast<std::int64_t>(len));
  }
  if (!out.tie_counts.empty()) out.kw_tie_corrected = tie_correction(out.kw, out.tie_counts, sizes.n());
  return out;
}

}  // namespace concordance
