#pragma once

// On-disk cache of exact distributions.
//
// One text file per (statistic, sizes sorted descending, format version):
//
//   concordance-distribution 1
//   statistic disorder|kw
//   sizes 10,5,3
//   total 2450448
//   atoms 48
//   <key> <count>        one line per atom, ascending key
//
// Keys are disorder in halves or the KW rank-sum signature; values are
// recomputed from keys on load. Distributions do not depend on group order,
// so a file serves every permutation of its sizes.

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include "concordance/exact_distribution.hpp"

namespace concordance::io {

inline constexpr int kCacheFormatVersion = 1;

class DistributionCache {
 public:
  explicit DistributionCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

  std::filesystem::path path_for(const GroupSizes& sizes, Statistic statistic) const {
    auto name = std::string(to_string(stored(statistic))) + "-" + sizes.canonical().to_string() + "-v" +
                std::to_string(kCacheFormatVersion) + ".txt";
    for (auto& c : name)
      if (c == ',') c = '_';
    return dir_ / name;
  }

  std::optional<ExactDistribution> load(const GroupSizes& sizes, Statistic statistic) const {
    std::ifstream in(path_for(sizes, statistic));
    if (!in) return std::nullopt;
    try {
      return parse(in, sizes, stored(statistic));
    } catch (const Error&) {
      return std::nullopt;  // unreadable or stale entry: recompute
    }
  }

  void store(const ExactDistribution& dist) const {
    std::filesystem::create_directories(dir_);
    const auto target = path_for(dist.sizes, dist.statistic);
    auto tmp = target;
    tmp += ".tmp";
    {
      std::ofstream out(tmp, std::ios::trunc);
      if (!out) fail(ErrorKind::configuration, "cannot write cache file " + tmp.string());
      write(out, dist);
    }
    std::filesystem::rename(tmp, target);
  }

  static void write(std::ostream& out, const ExactDistribution& dist) {
    out << "concordance-distribution " << kCacheFormatVersion << '\n'
        << "statistic " << to_string(stored(dist.statistic)) << '\n'
        << "sizes " << dist.sizes.canonical().to_string() << '\n'
        << "total " << dist.total.str() << '\n'
        << "atoms " << dist.atoms.size() << '\n';
    for (const auto& a : dist.atoms) out << a.key << ' ' << a.count.str() << '\n';
  }

  /// Reads a cache file written for any permutation of `sizes`.
  static ExactDistribution parse(std::istream& in, const GroupSizes& sizes, Statistic statistic) {
    auto expect = [&](const std::string& word) {
      std::string got;
      if (!(in >> got) || got != word) fail(ErrorKind::parse, "cache: expected '" + word + "'");
    };
    int version = 0;
    expect("concordance-distribution");
    if (!(in >> version) || version != kCacheFormatVersion) fail(ErrorKind::parse, "cache: unsupported version");
    std::string text;
    expect("statistic");
    if (!(in >> text) || text != to_string(statistic)) fail(ErrorKind::parse, "cache: statistic mismatch");
    expect("sizes");
    if (!(in >> text) || text != sizes.canonical().to_string()) fail(ErrorKind::parse, "cache: sizes mismatch");

    ExactDistribution dist;
    dist.sizes = sizes;
    dist.statistic = statistic;
    expect("total");
    if (!(in >> text)) fail(ErrorKind::parse, "cache: missing total");
    dist.total = BigInt(text);
    std::size_t atoms = 0;
    expect("atoms");
    if (!(in >> atoms)) fail(ErrorKind::parse, "cache: missing atom count");

    std::optional<KwSignature> signature;
    if (statistic == Statistic::kw) {
      signature.emplace(sizes);
      dist.kw_lcm = signature->lcm();
    } else {
      dist.max_disorder = max_disorder(sizes);
    }
    for (std::size_t i = 0; i < atoms; ++i) {
      ExactDistribution::Atom atom;
      if (!(in >> atom.key >> text)) fail(ErrorKind::parse, "cache: truncated atom list");
      atom.count = BigInt(text);
      atom.value = signature ? signature->kw(atom.key) : static_cast<double>(atom.key) / 2.0;
      dist.atoms.push_back(std::move(atom));
    }
    if (dist.count_sum() != dist.total) fail(ErrorKind::parse, "cache: counts do not sum to total");
    return dist;
  }

 private:
  static Statistic stored(Statistic s) { return s == Statistic::tau ? Statistic::disorder : s; }

  std::filesystem::path dir_;
};

/// Cached lookup, falling back to enumeration (and storing the result).
inline ExactDistribution cached_distribution(const std::optional<DistributionCache>& cache, const GroupSizes& sizes,
                                             Statistic statistic, const EnumerationOptions& options) {
  if (cache) {
    if (auto hit = cache->load(sizes, statistic)) return *std::move(hit);
  }
  auto dist = enumerate_distribution(sizes, statistic, options);
  if (cache) cache->store(dist);
  return dist;
}

}  // namespace concordance::io
