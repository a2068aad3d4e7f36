#pragma once

// Exact null distributions of the disorder and Kruskal-Wallis statistics.
//
// Every distinct arrangement of the label multiset is visited once by a
// recursive descent over the remaining per-group counts. The preference
// matrix and the rank sums are updated incrementally as labels are placed,
// so a leaf costs one LOP solve (inlined for k <= 3). Work is split by the
// labels in the first two positions; each worker owns whole prefix classes
// and a private histogram, and histograms are merged by integer addition,
// which makes the result independent of the worker count.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "concordance/combinatorics.hpp"
#include "concordance/disorder.hpp"
#include "concordance/error.hpp"
#include "concordance/half_count.hpp"
#include "concordance/lop.hpp"
#include "concordance/ranking.hpp"

namespace concordance {

enum class Statistic { disorder, tau, kw };

inline const char* to_string(Statistic s) {
  switch (s) {
    case Statistic::disorder: return "disorder";
    case Statistic::tau: return "tau";
    case Statistic::kw: return "kw";
  }
  return "?";
}

inline constexpr std::uint64_t kDefaultBudget = 1'000'000'000;

/// Worker count from CONCORDANCE_WORKERS, else the hardware concurrency.
inline unsigned default_workers() {
  if (const char* env = std::getenv("CONCORDANCE_WORKERS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

struct EnumerationOptions {
  std::uint64_t budget = kDefaultBudget;
  unsigned workers = 0;  // 0: default_workers()
};

/// Exact integer signature of the KW statistic for tie-free data:
/// sum_i R_i^2 * (L / n_i) with L = lcm(n_1, ..., n_k). KW is increasing in it.
class KwSignature {
 public:
  explicit KwSignature(const GroupSizes& sizes) : n_(sizes.n()) {
    std::int64_t lcm = 1;
    for (auto s : sizes.values()) {
      lcm = std::lcm(lcm, s);
      if (lcm > (std::int64_t{1} << 40)) fail(ErrorKind::capacity, "KW signature: lcm of group sizes too large");
    }
    lcm_ = lcm;
    long double bound = 0;
    const long double max_sum = static_cast<long double>(n_) * static_cast<long double>(n_ + 1) / 2.0L;
    for (auto s : sizes.values()) {
      weights_.push_back(lcm_ / s);
      bound += max_sum * max_sum * static_cast<long double>(lcm_ / s);
    }
    if (bound > 9.0e18L) fail(ErrorKind::capacity, "KW signature would overflow 64-bit integers for these sizes");
  }

  std::int64_t lcm() const { return lcm_; }
  std::int64_t weight(std::size_t g) const { return weights_[g]; }

  template <typename RankSums>
  std::int64_t key(const RankSums& rank_sums) const {
    std::int64_t key = 0;
    for (std::size_t g = 0; g < weights_.size(); ++g) {
      const auto r = static_cast<std::int64_t>(rank_sums[g]);
      key += r * r * weights_[g];
    }
    return key;
  }

  double kw(std::int64_t key) const {
    const auto n = static_cast<long double>(n_);
    const long double v = 12.0L / (n * (n + 1.0L)) * static_cast<long double>(key) / static_cast<long double>(lcm_) -
                          3.0L * (n + 1.0L);
    return static_cast<double>(std::fabs(v) < 1e-12L ? 0.0L : v);
  }

  /// Smallest key whose KW value is >= observed (up to rounding of the input).
  long double key_threshold(double observed) const {
    const auto n = static_cast<long double>(n_);
    const long double key = (static_cast<long double>(observed) + 3.0L * (n + 1.0L)) * n * (n + 1.0L) / 12.0L *
                            static_cast<long double>(lcm_);
    return key - 1e-9L * std::max(1.0L, std::fabs(key));
  }

 private:
  std::int64_t n_;
  std::int64_t lcm_ = 1;
  std::vector<std::int64_t> weights_;
};

/// Probability mass function stored as exact counts.
struct ExactDistribution {
  struct Atom {
    std::int64_t key = 0;  // halves of disorder, or KW signature
    double value = 0.0;    // disorder or KW
    BigInt count;
  };

  GroupSizes sizes;
  Statistic statistic = Statistic::disorder;
  std::vector<Atom> atoms;  // ascending by value
  BigInt total;
  std::int64_t max_disorder = 0;  // disorder distributions only
  std::int64_t kw_lcm = 1;        // kw distributions only

  double probability(std::size_t i) const { return ratio(atoms[i].count, total); }

  /// tau for a disorder atom.
  double tau(std::size_t i) const {
    return 1.0 - atoms[i].value / static_cast<double>(max_disorder);
  }

  BigInt count_sum() const {
    BigInt s = 0;
    for (const auto& a : atoms) s += a.count;
    return s;
  }

  static double ratio(const BigInt& num, const BigInt& den) {
    return static_cast<double>(num.convert_to<long double>() / den.convert_to<long double>());
  }
};

namespace detail {

// Fully unrolled LOP value for k <= 3, in whole units.
inline std::int64_t small_lop(const std::int64_t* m, std::size_t k) {
  if (k == 2) return std::max(m[1], m[2]);
  const auto ab = m[1], ac = m[2], ba = m[3], bc = m[5], ca = m[6], cb = m[7];
  return std::max({ab + ac + bc, ac + ab + cb, ba + bc + ac, bc + ba + ca, ca + cb + ab, cb + ca + ba});
}

struct Histograms {
  std::vector<std::uint64_t> disorder;  // indexed by disorder in whole units
  std::unordered_map<std::int64_t, std::uint64_t> kw;

  void merge(const Histograms& other) {
    if (disorder.size() < other.disorder.size()) disorder.resize(other.disorder.size(), 0);
    for (std::size_t i = 0; i < other.disorder.size(); ++i) disorder[i] += other.disorder[i];
    for (const auto& [key, count] : other.kw) kw[key] += count;
  }
};

// Per-worker enumeration state.
class Walker {
 public:
  Walker(const GroupSizes& sizes, bool want_disorder, bool want_kw, const KwSignature* signature)
      : k_(sizes.k()),
        n_(static_cast<std::size_t>(sizes.n())),
        total_pairs_(sizes.total_cross_pairs()),
        want_disorder_(want_disorder),
        want_kw_(want_kw),
        signature_(signature),
        remaining_(sizes.values()),
        placed_(k_, 0),
        rank_sums_(k_, 0),
        units_(k_ * k_, 0),
        matrix_(k_) {
    if (want_disorder_) hist_.disorder.assign(static_cast<std::size_t>(total_pairs_) + 1, 0);
  }

  /// Visits every arrangement that starts with `prefix`.
  void run_prefix(const std::vector<GroupIndex>& prefix) {
    for (auto g : prefix) place(g);
    descend(prefix.size());
    for (auto it = prefix.rbegin(); it != prefix.rend(); ++it) unplace(*it);
  }

  const Histograms& histograms() const { return hist_; }

 private:
  void place(GroupIndex g) {
    for (std::size_t h = 0; h < k_; ++h) units_[h * k_ + g] += placed_[h];
    rank_sums_[g] += static_cast<std::int64_t>(depth_) + 1;
    ++placed_[g];
    --remaining_[g];
    ++depth_;
  }

  void unplace(GroupIndex g) {
    --depth_;
    ++remaining_[g];
    --placed_[g];
    rank_sums_[g] -= static_cast<std::int64_t>(depth_) + 1;
    for (std::size_t h = 0; h < k_; ++h) units_[h * k_ + g] -= placed_[h];
  }

  void descend(std::size_t pos) {
    if (pos == n_) {
      leaf();
      return;
    }
    for (GroupIndex g = 0; g < k_; ++g) {
      if (remaining_[g] == 0) continue;
      place(g);
      descend(pos + 1);
      unplace(g);
    }
  }

  void leaf() {
    if (want_disorder_) {
      std::int64_t kept;
      if (k_ <= 3) {
        kept = small_lop(units_.data(), k_);
      } else {
        for (std::size_t r = 0; r < k_; ++r)
          for (std::size_t s = 0; s < k_; ++s)
            if (r != s) matrix_.set(r, s, HalfCount::whole(units_[r * k_ + s]));
        kept = solver_.value_halves(matrix_) / 2;
      }
      ++hist_.disorder[static_cast<std::size_t>(total_pairs_ - kept)];
    }
    if (want_kw_) ++hist_.kw[signature_->key(rank_sums_)];
  }

  std::size_t k_;
  std::size_t n_;
  std::int64_t total_pairs_;
  bool want_disorder_;
  bool want_kw_;
  const KwSignature* signature_;
  std::vector<std::int64_t> remaining_;
  std::vector<std::int64_t> placed_;
  std::vector<std::int64_t> rank_sums_;
  std::vector<std::int64_t> units_;  // untied null: whole-unit preference counts
  std::size_t depth_ = 0;
  PreferenceMatrix matrix_;
  LopSolver solver_;
  Histograms hist_;
};

inline std::vector<std::vector<GroupIndex>> prefix_classes(const GroupSizes& sizes) {
  std::vector<std::vector<GroupIndex>> out;
  const auto depth = std::min<std::int64_t>(2, sizes.n());
  std::vector<std::int64_t> left = sizes.values();
  std::vector<GroupIndex> prefix;
  auto rec = [&](auto&& self) -> void {
    if (static_cast<std::int64_t>(prefix.size()) == depth) {
      out.push_back(prefix);
      return;
    }
    for (GroupIndex g = 0; g < sizes.k(); ++g) {
      if (left[g] == 0) continue;
      --left[g];
      prefix.push_back(g);
      self(self);
      prefix.pop_back();
      ++left[g];
    }
  };
  rec(rec);
  return out;
}

inline void check_budget(const GroupSizes& sizes, std::uint64_t budget) {
  const auto count = multinomial(sizes);
  if (count > budget)
    fail(ErrorKind::capacity, "exact enumeration of sizes (" + sizes.to_string() + ") needs " + to_string(count) +
                                  " arrangements, above the budget of " + std::to_string(budget) +
                                  "; use the Monte Carlo method instead");
}

inline Histograms enumerate(const GroupSizes& sizes, bool want_disorder, bool want_kw, const KwSignature* signature,
                            const EnumerationOptions& options) {
  const auto classes = prefix_classes(sizes);
  const unsigned workers =
      std::max(1u, std::min<unsigned>(options.workers ? options.workers : default_workers(),
                                      static_cast<unsigned>(classes.size())));

  std::vector<Walker> walkers;
  walkers.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) walkers.emplace_back(sizes, want_disorder, want_kw, signature);

  std::atomic<std::size_t> next{0};
  auto work = [&](Walker& walker) {
    for (auto i = next.fetch_add(1); i < classes.size(); i = next.fetch_add(1)) walker.run_prefix(classes[i]);
  };
  if (workers == 1) {
    work(walkers[0]);
  } else {
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) threads.emplace_back(work, std::ref(walkers[w]));
    for (auto& t : threads) t.join();
  }

  Histograms merged = walkers[0].histograms();
  for (unsigned w = 1; w < workers; ++w) merged.merge(walkers[w].histograms());
  return merged;
}

inline ExactDistribution disorder_distribution_from(const GroupSizes& sizes, const Histograms& h) {
  ExactDistribution out;
  out.sizes = sizes;
  out.statistic = Statistic::disorder;
  out.max_disorder = max_disorder(sizes);
  for (std::size_t d = 0; d < h.disorder.size(); ++d) {
    if (h.disorder[d] == 0) continue;
    out.atoms.push_back({static_cast<std::int64_t>(2 * d), static_cast<double>(d), BigInt(h.disorder[d])});
  }
  out.total = out.count_sum();
  return out;
}

inline ExactDistribution kw_distribution_from(const GroupSizes& sizes, const Histograms& h,
                                              const KwSignature& signature) {
  ExactDistribution out;
  out.sizes = sizes;
  out.statistic = Statistic::kw;
  out.kw_lcm = signature.lcm();
  std::vector<std::pair<std::int64_t, std::uint64_t>> sorted(h.kw.begin(), h.kw.end());
  std::sort(sorted.begin(), sorted.end());
  for (const auto& [key, count] : sorted) out.atoms.push_back({key, signature.kw(key), BigInt(count)});
  out.total = out.count_sum();
  return out;
}

inline void check_enumerable(const GroupSizes& sizes, Statistic statistic, std::uint64_t budget) {
  if (sizes.k() < 2) fail(ErrorKind::degenerate, "exact distribution needs at least two groups");
  if (statistic != Statistic::kw && max_disorder(sizes) <= 0)
    fail(ErrorKind::degenerate, "maximum disorder is 0 for sizes (" + sizes.to_string() + "); tau is undefined");
  check_budget(sizes, budget);
}

}  // namespace detail

/// Exact pmf of `statistic` (tau shares the disorder support) over all
/// n! / prod n_i! arrangements.
inline ExactDistribution enumerate_distribution(const GroupSizes& sizes, Statistic statistic,
                                                const EnumerationOptions& options = {}) {
  detail::check_enumerable(sizes, statistic, options.budget);
  if (statistic == Statistic::kw) {
    const KwSignature signature(sizes);
    return detail::kw_distribution_from(sizes, detail::enumerate(sizes, false, true, &signature, options), signature);
  }
  return detail::disorder_distribution_from(sizes, detail::enumerate(sizes, true, false, nullptr, options));
}

/// Both distributions from a single pass.
inline std::pair<ExactDistribution, ExactDistribution> enumerate_disorder_and_kw(const GroupSizes& sizes,
                                                                                  const EnumerationOptions& options = {}) {
  detail::check_enumerable(sizes, Statistic::disorder, options.budget);
  const KwSignature signature(sizes);
  const auto h = detail::enumerate(sizes, true, true, &signature, options);
  return {detail::disorder_distribution_from(sizes, h), detail::kw_distribution_from(sizes, h, signature)};
}

enum class Tail { disorder_at_most, kw_at_least };
enum class Method { exact, montecarlo };

inline const char* to_string(Method m) { return m == Method::exact ? "exact" : "montecarlo"; }
inline const char* to_string(Tail t) { return t == Tail::disorder_at_most ? "disorder<=observed" : "kw>=observed"; }

struct PValueResult {
  double statistic_value = 0.0;
  double p_value = 1.0;
  BigInt count;  // arrangements in the tail (exact method)
  BigInt total;
  Tail direction = Tail::disorder_at_most;
  Method method = Method::exact;
};

/// P(D <= observed). Half-integer observations (ties) use the same threshold.
inline PValueResult exact_pvalue(const ExactDistribution& dist, HalfCount observed) {
  if (dist.statistic == Statistic::kw) fail(ErrorKind::configuration, "exact_pvalue needs a disorder distribution");
  PValueResult out;
  out.statistic_value = observed.value();
  out.total = dist.total;
  out.count = 0;
  for (const auto& atom : dist.atoms)
    if (atom.key <= observed.halves()) out.count += atom.count;
  out.p_value = ExactDistribution::ratio(out.count, out.total);
  return out;
}

inline PValueResult exact_pvalue(const GroupSizes& sizes, HalfCount observed, const EnumerationOptions& options = {}) {
  return exact_pvalue(enumerate_distribution(sizes, Statistic::disorder, options), observed);
}

/// P(KW >= observed) for an observation given by its exact signature.
inline PValueResult exact_kw_pvalue_for_key(const ExactDistribution& dist, std::int64_t observed_key,
                                            double observed_value) {
  if (dist.statistic != Statistic::kw) fail(ErrorKind::configuration, "exact_kw_pvalue needs a KW distribution");
  PValueResult out;
  out.statistic_value = observed_value;
  out.direction = Tail::kw_at_least;
  out.total = dist.total;
  out.count = 0;
  for (const auto& atom : dist.atoms)
    if (atom.key >= observed_key) out.count += atom.count;
  out.p_value = ExactDistribution::ratio(out.count, out.total);
  return out;
}

/// P(KW >= observed) for a real observation; values within rounding of an
/// atom count as attaining it.
inline PValueResult exact_kw_pvalue(const ExactDistribution& dist, double observed) {
  if (dist.statistic != Statistic::kw) fail(ErrorKind::configuration, "exact_kw_pvalue needs a KW distribution");
  const KwSignature signature(dist.sizes);
  const auto threshold = signature.key_threshold(observed);
  PValueResult out;
  out.statistic_value = observed;
  out.direction = Tail::kw_at_least;
  out.total = dist.total;
  out.count = 0;
  for (const auto& atom : dist.atoms)
    if (static_cast<long double>(atom.key) >= threshold) out.count += atom.count;
  out.p_value = ExactDistribution::ratio(out.count, out.total);
  return out;
}

inline PValueResult exact_kw_pvalue(const GroupSizes& sizes, double observed, const EnumerationOptions& options = {}) {
  return exact_kw_pvalue(enumerate_distribution(sizes, Statistic::kw, options), observed);
}

struct CriticalValue {
  double alpha = 0.0;
  std::optional<HalfCount> disorder;  // empty: no disorder meets the bound
  BigInt count;
  BigInt total;
  double attained_p = 0.0;
};

/// For each alpha, the largest disorder d with P(D <= d) <= alpha
/// (conservative: the attained p never exceeds alpha).
inline std::vector<CriticalValue> critical_values(const ExactDistribution& dist, const std::vector<double>& alphas) {
  if (dist.statistic == Statistic::kw) fail(ErrorKind::configuration, "critical values are tabulated for disorder");
  const auto total = dist.total.convert_to<long double>();
  std::vector<CriticalValue> out;
  for (auto alpha : alphas) {
    if (!(alpha > 0.0 && alpha < 1.0)) fail(ErrorKind::configuration, "significance level must lie in (0, 1)");
    CriticalValue row;
    row.alpha = alpha;
    row.total = dist.total;
    row.count = 0;
    BigInt cumulative = 0;
    const long double bound = static_cast<long double>(alpha) * total * (1.0L + 1e-12L);
    for (const auto& atom : dist.atoms) {
      cumulative += atom.count;
      if (cumulative.convert_to<long double>() > bound) break;
      row.disorder = HalfCount::from_halves(atom.key);
      row.count = cumulative;
    }
    row.attained_p = row.disorder ? ExactDistribution::ratio(row.count, row.total) : 0.0;
    out.push_back(row);
  }
  return out;
}

}  // namespace concordance
