#pragma once

// Sampling estimates for sizes beyond the exact budget. Sample i draws its
// shuffle from Philox stream (seed, i), so estimates depend only on
// (seed, samples, data) and not on how samples are split across workers.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <thread>
#include <vector>

#include <boost/math/special_functions/beta.hpp>

#include "concordance/disorder.hpp"
#include "concordance/error.hpp"
#include "concordance/exact_distribution.hpp"
#include "concordance/kruskal_wallis.hpp"
#include "concordance/lop.hpp"
#include "concordance/philox.hpp"
#include "concordance/ranking.hpp"

namespace concordance {

inline constexpr std::uint64_t kMinPValueSamples = 100;
inline constexpr std::uint64_t kMinDistributionSamples = 1000;

struct McOptions {
  std::uint64_t samples = 100'000;
  std::uint64_t seed = 0;
  unsigned workers = 0;  // 0: default_workers()
};

struct Interval {
  double low = 0.0;
  double high = 1.0;
};

/// Exact (Clopper-Pearson) binomial interval for `successes` out of `trials`.
inline Interval clopper_pearson(std::uint64_t successes, std::uint64_t trials, double confidence) {
  const double tail = (1.0 - confidence) / 2.0;
  const auto x = static_cast<double>(successes);
  const auto n = static_cast<double>(trials);
  Interval out;
  out.low = successes == 0 ? 0.0 : boost::math::ibeta_inv(x, n - x + 1.0, tail);
  out.high = successes == trials ? 1.0 : boost::math::ibeta_inv(x + 1.0, n - x, 1.0 - tail);
  return out;
}

struct McEstimate {
  double observed = 0.0;
  double p_hat = 1.0;
  double ci_low = 0.0;
  double ci_high = 1.0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  std::uint64_t exceed_count = 0;  // samples at least as extreme as the observation
  Tail direction = Tail::disorder_at_most;
};

namespace detail {

// Shuffles labels in place with the stream of one sample.
inline void shuffle_labels(std::vector<GroupIndex>& labels, std::uint64_t seed, std::uint64_t sample) {
  PhiloxStream rng(seed, sample);
  for (std::size_t i = labels.size(); i > 1; --i) {
    const auto j = rng.below(static_cast<std::uint32_t>(i));
    std::swap(labels[i - 1], labels[j]);
  }
}

// Disorder (in halves) and KW of labels laid over fixed tie-block lengths.
class SampleScorer {
 public:
  SampleScorer(const GroupSizes& sizes, std::vector<std::size_t> block_lengths)
      : sizes_(sizes),
        k_(sizes.k()),
        lengths_(std::move(block_lengths)),
        matrix_(k_),
        placed_(k_),
        in_block_(k_),
        rank_sums_(k_) {}

  std::int64_t disorder_halves(const std::vector<GroupIndex>& labels) {
    for (std::size_t r = 0; r < k_; ++r)
      for (std::size_t s = 0; s < k_; ++s) matrix_.set(r, s, HalfCount{});
    std::fill(placed_.begin(), placed_.end(), 0);
    std::size_t pos = 0;
    for (auto len : lengths_) {
      std::fill(in_block_.begin(), in_block_.end(), 0);
      for (std::size_t i = 0; i < len; ++i) ++in_block_[labels[pos + i]];
      for (std::size_t g = 0; g < k_; ++g) {
        if (in_block_[g] == 0) continue;
        for (std::size_t h = 0; h < k_; ++h)
          if (h != g) matrix_.add_halves(h, g, (2 * placed_[h] + in_block_[h]) * in_block_[g]);
      }
      for (std::size_t g = 0; g < k_; ++g) placed_[g] += in_block_[g];
      pos += len;
    }
    return 2 * sizes_.total_cross_pairs() - solver_.value_halves(matrix_);
  }

  double kw(const std::vector<GroupIndex>& labels) {
    std::fill(rank_sums_.begin(), rank_sums_.end(), 0.0);
    std::size_t pos = 0;
    for (auto len : lengths_) {
      const double rank = static_cast<double>(2 * pos + len + 1) / 2.0;
      for (std::size_t i = 0; i < len; ++i) rank_sums_[labels[pos + i]] += rank;
      pos += len;
    }
    return kw_from_rank_sums(rank_sums_, sizes_);
  }

 private:
  GroupSizes sizes_;
  std::size_t k_;
  std::vector<std::size_t> lengths_;
  PreferenceMatrix matrix_;
  LopSolver solver_;
  std::vector<std::int64_t> placed_;
  std::vector<std::int64_t> in_block_;
  std::vector<double> rank_sums_;
};

// Runs body(worker, first, last) over contiguous sample ranges.
template <typename Body>
void for_sample_ranges(std::uint64_t samples, unsigned workers, Body&& body) {
  workers = std::max(1u, std::min<unsigned>(workers ? workers : default_workers(),
                                            static_cast<unsigned>(std::min<std::uint64_t>(samples, 1u << 16))));
  if (workers == 1) {
    body(0u, std::uint64_t{0}, samples);
    return;
  }
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    const auto first = samples * w / workers;
    const auto last = samples * (w + 1) / workers;
    threads.emplace_back([&body, w, first, last] { body(w, first, last); });
  }
  for (auto& t : threads) t.join();
}

inline std::vector<GroupIndex> base_labels(const GroupSizes& sizes) {
  std::vector<GroupIndex> labels;
  labels.reserve(static_cast<std::size_t>(sizes.n()));
  for (std::size_t g = 0; g < sizes.k(); ++g) labels.insert(labels.end(), sizes[g], static_cast<GroupIndex>(g));
  return labels;
}

}  // namespace detail

/// Add-one Monte Carlo p-value. Labels are permuted over the observed
/// tie-block structure (the tie-conditioned null), so untied data gives the
/// ordinary permutation null.
inline McEstimate mc_pvalue(const Arrangement& arr, const GroupSizes& sizes, Statistic statistic,
                            const McOptions& options) {
  if (options.samples < kMinPValueSamples)
    fail(ErrorKind::configuration, "Monte Carlo p-values need at least " + std::to_string(kMinPValueSamples) + " samples");
  if (sizes.k() < 2) fail(ErrorKind::degenerate, "Monte Carlo p-value needs at least two groups");
  arr.check_against(sizes);

  const auto lengths = arr.block_lengths();
  detail::SampleScorer observed_scorer(sizes, lengths);
  const bool use_kw = statistic == Statistic::kw;
  const auto observed_halves = use_kw ? 0 : observed_scorer.disorder_halves(arr.labels());
  const double observed_kw = use_kw ? observed_scorer.kw(arr.labels()) : 0.0;
  const double kw_slack = 1e-9 * std::max(1.0, std::fabs(observed_kw));

  const unsigned workers = options.workers ? options.workers : default_workers();
  std::vector<std::uint64_t> tallies(std::max(1u, workers), 0);
  detail::for_sample_ranges(options.samples, workers, [&](unsigned w, std::uint64_t first, std::uint64_t last) {
    detail::SampleScorer scorer(sizes, lengths);
    std::vector<GroupIndex> labels;
    std::uint64_t tally = 0;
    for (auto i = first; i < last; ++i) {
      labels = arr.labels();
      detail::shuffle_labels(labels, options.seed, i);
      if (use_kw) {
        if (scorer.kw(labels) >= observed_kw - kw_slack) ++tally;
      } else if (scorer.disorder_halves(labels) <= observed_halves) {
        ++tally;
      }
    }
    tallies[w] = tally;
  });

  McEstimate out;
  out.samples = options.samples;
  out.seed = options.seed;
  out.direction = use_kw ? Tail::kw_at_least : Tail::disorder_at_most;
  out.observed = use_kw ? observed_kw : static_cast<double>(observed_halves) / 2.0;
  out.exceed_count = std::accumulate(tallies.begin(), tallies.end(), std::uint64_t{0});
  out.p_hat = static_cast<double>(out.exceed_count + 1) / static_cast<double>(out.samples + 1);
  const auto ci = clopper_pearson(out.exceed_count + 1, out.samples + 1, 0.95);
  out.ci_low = ci.low;
  out.ci_high = ci.high;
  return out;
}

/// Largest KW over the k! arrangements that list every group consecutively.
inline double max_kw(const GroupSizes& sizes) {
  if (sizes.k() > kMaxBruteForceGroups) fail(ErrorKind::capacity, "max KW: too many groups for k! enumeration");
  std::vector<GroupIndex> order(sizes.k());
  std::iota(order.begin(), order.end(), GroupIndex{0});
  double best = 0.0;
  do {
    std::vector<double> sums(sizes.k());
    std::int64_t start = 0;
    for (auto g : order) {
      const auto size = sizes[g];
      sums[g] = static_cast<double>(size * start + size * (size + 1) / 2);
      start += size;
    }
    best = std::max(best, kw_from_rank_sums(sums, sizes));
  } while (std::next_permutation(order.begin(), order.end()));
  return best;
}

struct McHistogram {
  struct Bin {
    double value = 0.0;
    std::uint64_t count = 0;
    double frequency = 0.0;
  };
  GroupSizes sizes;
  Statistic statistic = Statistic::disorder;
  std::vector<Bin> bins;  // ascending by value
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  bool kw_normalized = false;
  double kw_scale = 1.0;  // divisor applied to KW values when normalized
};

/// Empirical pmf of the statistic under uniformly shuffled tie-free labels.
/// tau is reported as 1 - disorder / max_disorder.
inline McHistogram mc_distribution(const GroupSizes& sizes, Statistic statistic, const McOptions& options,
                                   bool normalize_kw = false) {
  if (options.samples < kMinDistributionSamples)
    fail(ErrorKind::configuration,
         "Monte Carlo distributions need at least " + std::to_string(kMinDistributionSamples) + " samples");
  if (sizes.k() < 2) fail(ErrorKind::degenerate, "distribution needs at least two groups");
  const bool use_kw = statistic == Statistic::kw;
  const std::int64_t max_dis = use_kw ? 0 : max_disorder(sizes);
  if (statistic == Statistic::tau && max_dis <= 0)
    fail(ErrorKind::degenerate, "maximum disorder is 0 for sizes (" + sizes.to_string() + "); tau is undefined");
  std::optional<KwSignature> signature;
  if (use_kw) signature.emplace(sizes);

  const auto base = detail::base_labels(sizes);
  const std::vector<std::size_t> lengths(base.size(), 1);
  const unsigned workers = options.workers ? options.workers : default_workers();
  std::vector<std::map<std::int64_t, std::uint64_t>> partial(std::max(1u, workers));
  detail::for_sample_ranges(options.samples, workers, [&](unsigned w, std::uint64_t first, std::uint64_t last) {
    detail::SampleScorer scorer(sizes, lengths);
    std::vector<std::int64_t> rank_sums(sizes.k());
    std::vector<GroupIndex> labels;
    auto& hist = partial[w];
    for (auto i = first; i < last; ++i) {
      labels = base;
      detail::shuffle_labels(labels, options.seed, i);
      if (use_kw) {
        std::fill(rank_sums.begin(), rank_sums.end(), 0);
        for (std::size_t p = 0; p < labels.size(); ++p) rank_sums[labels[p]] += static_cast<std::int64_t>(p) + 1;
        ++hist[signature->key(rank_sums)];
      } else {
        ++hist[scorer.disorder_halves(labels)];
      }
    }
  });
  std::map<std::int64_t, std::uint64_t> merged;
  for (const auto& h : partial)
    for (const auto& [key, count] : h) merged[key] += count;

  McHistogram out;
  out.sizes = sizes;
  out.statistic = statistic;
  out.samples = options.samples;
  out.seed = options.seed;
  if (use_kw && normalize_kw) {
    out.kw_normalized = true;
    out.kw_scale = max_kw(sizes);
  }
  for (const auto& [key, count] : merged) {
    McHistogram::Bin bin;
    bin.count = count;
    bin.frequency = static_cast<double>(count) / static_cast<double>(options.samples);
    if (use_kw) {
      bin.value = signature->kw(key) / out.kw_scale;
    } else if (statistic == Statistic::tau) {
      bin.value = 1.0 - static_cast<double>(key) / 2.0 / static_cast<double>(max_dis);
    } else {
      bin.value = static_cast<double>(key) / 2.0;
    }
    out.bins.push_back(bin);
  }
  std::sort(out.bins.begin(), out.bins.end(), [](const auto& a, const auto& b) { return a.value < b.value; });
  return out;
}

}  // namespace concordance
