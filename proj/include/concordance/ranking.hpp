#pragma once

// Domain types shared by every statistic: group sizes, arrangements of group
// labels (optionally with tie-blocks) and midrank assignments.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "concordance/error.hpp"

namespace concordance {

using GroupIndex = std::uint32_t;

/// The multiset (n_1, ..., n_k) of group cardinalities.
class GroupSizes {
 public:
  GroupSizes() = default;

  explicit GroupSizes(std::vector<std::int64_t> sizes) : sizes_(std::move(sizes)) {
    if (sizes_.empty()) fail(ErrorKind::structural, "group sizes: at least one group is required");
    for (auto s : sizes_) {
      if (s < 1) fail(ErrorKind::structural, "group sizes: every group needs at least one element");
    }
  }

  std::size_t k() const { return sizes_.size(); }
  std::int64_t n() const { return std::accumulate(sizes_.begin(), sizes_.end(), std::int64_t{0}); }
  std::int64_t operator[](std::size_t i) const { return sizes_[i]; }
  const std::vector<std::int64_t>& values() const { return sizes_; }

  /// Sum over r < s of n_r * n_s.
  std::int64_t total_cross_pairs() const {
    std::int64_t n = 0, sum_sq = 0;
    for (auto s : sizes_) {
      n += s;
      sum_sq += s * s;
    }
    return (n * n - sum_sq) / 2;
  }

  /// Sizes sorted descending; distributions depend only on this multiset.
  GroupSizes canonical() const {
    auto copy = sizes_;
    std::sort(copy.begin(), copy.end(), std::greater<>());
    return GroupSizes(std::move(copy));
  }

  std::string to_string() const {
    std::string out;
    for (std::size_t i = 0; i < sizes_.size(); ++i) {
      if (i) out += ',';
      out += std::to_string(sizes_[i]);
    }
    return out;
  }

  friend bool operator==(const GroupSizes&, const GroupSizes&) = default;

 private:
  std::vector<std::int64_t> sizes_;
};

/// Observed ordering of group labels. Consecutive observations may be grouped
/// into tie-blocks; a block of size one is an untied observation.
class Arrangement {
 public:
  Arrangement() = default;

  /// Untied arrangement, one block per label.
  explicit Arrangement(std::vector<GroupIndex> labels) : labels_(std::move(labels)) {
    block_starts_.resize(labels_.size());
    std::iota(block_starts_.begin(), block_starts_.end(), std::size_t{0});
  }

  explicit Arrangement(const std::vector<std::vector<GroupIndex>>& blocks) {
    for (const auto& block : blocks) {
      if (block.empty()) fail(ErrorKind::structural, "arrangement: empty tie-block");
      block_starts_.push_back(labels_.size());
      labels_.insert(labels_.end(), block.begin(), block.end());
    }
  }

  /// Flat labels with tie structure given by block lengths.
  static Arrangement from_blocks(std::vector<GroupIndex> labels, std::span<const std::size_t> block_lengths) {
    Arrangement out;
    std::size_t pos = 0;
    for (auto len : block_lengths) {
      if (len == 0) fail(ErrorKind::structural, "arrangement: empty tie-block");
      out.block_starts_.push_back(pos);
      pos += len;
    }
    if (pos != labels.size()) fail(ErrorKind::structural, "arrangement: block lengths do not cover the labels");
    out.labels_ = std::move(labels);
    return out;
  }

  std::size_t size() const { return labels_.size(); }
  std::size_t block_count() const { return block_starts_.size(); }
  const std::vector<GroupIndex>& labels() const { return labels_; }

  std::span<const GroupIndex> block(std::size_t b) const {
    const auto begin = block_starts_[b];
    const auto end = b + 1 < block_starts_.size() ? block_starts_[b + 1] : labels_.size();
    return {labels_.data() + begin, end - begin};
  }
  std::size_t block_start(std::size_t b) const { return block_starts_[b]; }

  std::vector<std::size_t> block_lengths() const {
    std::vector<std::size_t> out;
    out.reserve(block_count());
    for (std::size_t b = 0; b < block_count(); ++b) out.push_back(block(b).size());
    return out;
  }

  bool has_ties() const { return block_starts_.size() != labels_.size(); }

  /// Sizes implied by label counts; every index below the maximum must occur.
  GroupSizes implied_sizes() const {
    if (labels_.empty()) fail(ErrorKind::empty_input, "arrangement: no observations");
    const auto k = *std::max_element(labels_.begin(), labels_.end()) + 1;
    std::vector<std::int64_t> counts(k, 0);
    for (auto g : labels_) ++counts[g];
    return GroupSizes(std::move(counts));
  }

  /// Throws unless the label counts match `sizes` exactly.
  void check_against(const GroupSizes& sizes) const {
    std::vector<std::int64_t> counts(sizes.k(), 0);
    for (auto g : labels_) {
      if (g >= sizes.k()) fail(ErrorKind::structural, "arrangement: group index out of range");
      ++counts[g];
    }
    if (counts != sizes.values()) fail(ErrorKind::structural, "arrangement: label counts do not match group sizes");
  }

  /// Same arrangement read right to left.
  Arrangement reversed() const {
    auto lengths = block_lengths();
    std::reverse(lengths.begin(), lengths.end());
    std::vector<GroupIndex> labels(labels_.rbegin(), labels_.rend());
    return from_blocks(std::move(labels), lengths);
  }

  /// Labels remapped through `relabel[old] = new`.
  Arrangement relabeled(std::span<const GroupIndex> relabel) const {
    std::vector<GroupIndex> labels;
    labels.reserve(labels_.size());
    for (auto g : labels_) labels.push_back(relabel[g]);
    return from_blocks(std::move(labels), block_lengths());
  }

  friend bool operator==(const Arrangement&, const Arrangement&) = default;

 private:
  std::vector<GroupIndex> labels_;
  std::vector<std::size_t> block_starts_;
};

/// Per-observation ranks in arrangement order (midranks under ties).
struct RankAssignment {
  std::vector<double> ranks;

  std::vector<double> group_sums(const Arrangement& arr, const GroupSizes& sizes) const {
    std::vector<double> sums(sizes.k(), 0.0);
    for (std::size_t i = 0; i < ranks.size(); ++i) sums[arr.labels()[i]] += ranks[i];
    return sums;
  }
};

inline RankAssignment midranks(const Arrangement& arr) {
  RankAssignment out;
  out.ranks.resize(arr.size());
  for (std::size_t b = 0; b < arr.block_count(); ++b) {
    const auto first = arr.block_start(b) + 1;
    const auto last = first + arr.block(b).size() - 1;
    const double rank = static_cast<double>(first + last) / 2.0;
    for (std::size_t i = first - 1; i < last; ++i) out.ranks[i] = rank;
  }
  return out;
}

struct Record {
  std::string group;
  double value = 0.0;
};

/// Arrangement plus the group names behind each index.
struct LabeledSample {
  std::vector<std::string> group_names;
  GroupSizes sizes;
  Arrangement arrangement;
};

/// Sorts observations by value; equal values become one tie-block. Groups are
/// indexed by first appearance in `records`.
inline LabeledSample arrangement_from_data(std::span<const Record> records) {
  if (records.empty()) fail(ErrorKind::empty_input, "no records");

  LabeledSample out;
  std::map<std::string, GroupIndex> index_of;
  std::vector<std::pair<double, GroupIndex>> observations;
  observations.reserve(records.size());
  for (const auto& r : records) {
    if (std::isnan(r.value)) fail(ErrorKind::parse, "value for group '" + r.group + "' is not a number");
    auto [it, inserted] = index_of.try_emplace(r.group, static_cast<GroupIndex>(out.group_names.size()));
    if (inserted) out.group_names.push_back(r.group);
    observations.emplace_back(r.value, it->second);
  }
  std::sort(observations.begin(), observations.end());

  std::vector<GroupIndex> labels;
  std::vector<std::size_t> lengths;
  labels.reserve(observations.size());
  for (std::size_t i = 0; i < observations.size();) {
    std::size_t j = i;
    while (j < observations.size() && observations[j].first == observations[i].first) {
      labels.push_back(observations[j].second);
      ++j;
    }
    lengths.push_back(j - i);
    i = j;
  }

  std::vector<std::int64_t> counts(out.group_names.size(), 0);
  for (auto g : labels) ++counts[g];
  out.sizes = GroupSizes(std::move(counts));
  out.arrangement = Arrangement::from_blocks(std::move(labels), lengths);
  return out;
}

}  // namespace concordance
