#pragma once

// The `test` command's result record: construction from a labelled sample,
// JSON serialization (schema in docs/report.schema.json) and text rendering.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <numeric>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "concordance/disorder.hpp"
#include "concordance/exact_distribution.hpp"
#include "concordance/io/cache.hpp"
#include "concordance/kruskal_wallis.hpp"
#include "concordance/monte_carlo.hpp"
#include "concordance/ranking.hpp"

namespace concordance::io {

/// Exact rational with a decimal rendering for readers.
struct Fraction {
  BigInt num = 0;
  BigInt den = 1;

  double decimal() const { return ExactDistribution::ratio(num, den); }
  friend bool operator==(const Fraction&, const Fraction&) = default;
};

enum class PValueMethod { exact, montecarlo, none };

inline const char* to_string(PValueMethod m) {
  switch (m) {
    case PValueMethod::exact: return "exact";
    case PValueMethod::montecarlo: return "montecarlo";
    case PValueMethod::none: return "none";
  }
  return "?";
}

struct PValueSection {
  Method method = Method::exact;
  Tail direction = Tail::disorder_at_most;
  Fraction p;  // exact: tail count / total; montecarlo: (exceed + 1) / (samples + 1)
  std::optional<double> ci_low;
  std::optional<double> ci_high;
  std::optional<std::uint64_t> samples;
  std::optional<std::uint64_t> seed;

  friend bool operator==(const PValueSection&, const PValueSection&) = default;
};

struct ConcordanceSection {
  Fraction disorder;  // denominator 1 or 2
  std::int64_t max_disorder = 0;
  Fraction tau;
  std::vector<std::string> closest_order;
  std::int64_t total_pairs = 0;
  Fraction lop_value;
  bool degenerate = false;
  std::optional<PValueSection> p_value;

  friend bool operator==(const ConcordanceSection&, const ConcordanceSection&) = default;
};

struct KwSection {
  double kw = 0.0;
  std::optional<double> kw_tie_corrected;
  std::vector<double> rank_sums;
  std::vector<double> mean_ranks;
  std::vector<std::int64_t> tie_counts;
  std::optional<PValueSection> p_value;

  friend bool operator==(const KwSection&, const KwSection&) = default;
};

struct TestReport {
  std::vector<std::string> groups;
  std::vector<std::int64_t> sizes;
  std::int64_t n = 0;
  std::int64_t tie_blocks = 0;
  ConcordanceSection concordance;
  std::optional<KwSection> kruskal_wallis;
  std::vector<std::string> warnings;
  std::vector<std::string> notes;
  double seconds = 0.0;

  friend bool operator==(const TestReport&, const TestReport&) = default;
};

struct TestOptions {
  PValueMethod pvalue = PValueMethod::exact;
  bool kruskal_wallis = true;
  EnumerationOptions enumeration;
  McOptions montecarlo;
  std::optional<DistributionCache> cache;
};

namespace detail {

inline Fraction half_fraction(HalfCount h) {
  if (h.is_integer()) return {BigInt(h.halves() / 2), BigInt(1)};
  return {BigInt(h.halves()), BigInt(2)};
}

inline Fraction reduced(std::int64_t num, std::int64_t den) {
  const auto g = std::gcd(num, den);
  return {BigInt(num / g), BigInt(den / g)};
}

inline PValueSection from_exact(const PValueResult& r) {
  PValueSection s;
  s.method = Method::exact;
  s.direction = r.direction;
  s.p = {r.count, r.total};
  return s;
}

inline PValueSection from_mc(const McEstimate& e) {
  PValueSection s;
  s.method = Method::montecarlo;
  s.direction = e.direction;
  s.p = {BigInt(e.exceed_count + 1), BigInt(e.samples + 1)};
  s.ci_low = e.ci_low;
  s.ci_high = e.ci_high;
  s.samples = e.samples;
  s.seed = e.seed;
  return s;
}

}  // namespace detail

inline TestReport build_report(const LabeledSample& sample, const TestOptions& options) {
  const auto started = std::chrono::steady_clock::now();
  const auto& sizes = sample.sizes;
  const auto& arr = sample.arrangement;
  if (sizes.k() < 2) fail(ErrorKind::degenerate, "the test needs at least two groups");

  TestReport report;
  report.groups = sample.group_names;
  report.sizes = sizes.values();
  report.n = sizes.n();
  for (std::size_t b = 0; b < arr.block_count(); ++b)
    if (arr.block(b).size() > 1) ++report.tie_blocks;

  const auto dr = disorder(arr, sizes);
  auto& conc = report.concordance;
  conc.disorder = detail::half_fraction(dr.disorder);
  conc.max_disorder = dr.max_disorder;
  conc.total_pairs = dr.total_pairs;
  conc.lop_value = detail::half_fraction(dr.lop_value);
  conc.degenerate = dr.degenerate;
  const auto [tau_num, tau_den] = dr.tau_fraction();
  conc.tau = detail::reduced(tau_num, tau_den);
  for (auto g : dr.closest_order) conc.closest_order.push_back(sample.group_names[g]);

  report.notes.push_back(
      "tau = 1 - disorder / max_disorder with max_disorder = sum n_r n_s - GP_b - sum floor(n_r n_s / 2); "
      "the raw disorder is reported for other normalizations");
  if (std::any_of(sizes.values().begin(), sizes.values().end(), [](auto s) { return s == 1; }))
    report.warnings.push_back(
        "a group has a single observation: the maximum-disorder formula can exceed the attainable maximum");
  if (dr.degenerate) report.warnings.push_back("maximum disorder is 0: tau fixed at 1 and no p-value computed");

  const bool ties = arr.has_ties();
  std::optional<KwResult> kw;
  if (options.kruskal_wallis) {
    kw = kruskal_wallis(arr, sizes);
    KwSection section;
    section.kw = kw->kw;
    section.kw_tie_corrected = kw->kw_tie_corrected;
    section.rank_sums = kw->rank_sums;
    section.mean_ranks = kw->mean_ranks;
    section.tie_counts = kw->tie_counts;
    report.kruskal_wallis = std::move(section);
    if (ties) {
      // The squared-numerator variant is shown so readers comparing against
      // published figures can tell which convention they hold.
      double squared = 0.0;
      for (auto t : kw->tie_counts) squared += static_cast<double>(t * t - t);
      const auto nd = static_cast<double>(sample.sizes.n());
      char buf[48];
      std::snprintf(buf, sizeof buf, "%.4f", kw->kw / (1.0 - squared / (nd * nd * nd - nd)));
      report.notes.push_back(
          "KW tie correction divides by 1 - sum(t^3 - t) / (n^3 - n); the squared-numerator variant "
          "1 - sum(t^2 - t) / (n^3 - n) would give " + std::string(buf));
    }
  }

  if (options.pvalue == PValueMethod::exact && !dr.degenerate) {
    const auto dist = cached_distribution(options.cache, sizes, Statistic::disorder, options.enumeration);
    conc.p_value = detail::from_exact(exact_pvalue(dist, dr.disorder));
    if (ties)
      report.warnings.push_back(
          "ties present: the exact disorder p-value uses the tie-free null distribution (approximation); "
          "--pvalue montecarlo gives the tie-conditioned null");
    if (kw) {
      if (ties) {
        report.warnings.push_back("ties present: exact KW p-value not computed (tie-free null only)");
      } else {
        const auto kw_dist = cached_distribution(options.cache, sizes, Statistic::kw, options.enumeration);
        const KwSignature signature(sizes);
        report.kruskal_wallis->p_value =
            detail::from_exact(exact_kw_pvalue_for_key(kw_dist, signature.key(kw->rank_sums), kw->kw));
      }
    }
  } else if (options.pvalue == PValueMethod::montecarlo && !dr.degenerate) {
    conc.p_value = detail::from_mc(mc_pvalue(arr, sizes, Statistic::disorder, options.montecarlo));
    if (kw) report.kruskal_wallis->p_value = detail::from_mc(mc_pvalue(arr, sizes, Statistic::kw, options.montecarlo));
  }

  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return report;
}

// ---------------------------------------------------------------- JSON ----

inline nlohmann::json to_json(const Fraction& f) {
  return {{"num", f.num.str()}, {"den", f.den.str()}, {"decimal", f.decimal()}};
}

inline Fraction fraction_from_json(const nlohmann::json& j) {
  return {BigInt(j.at("num").get<std::string>()), BigInt(j.at("den").get<std::string>())};
}

inline nlohmann::json to_json(const PValueSection& p) {
  nlohmann::json j = {{"method", to_string(p.method)}, {"direction", to_string(p.direction)}, {"p", to_json(p.p)}};
  if (p.ci_low) j["ci_low"] = *p.ci_low;
  if (p.ci_high) j["ci_high"] = *p.ci_high;
  if (p.samples) j["samples"] = *p.samples;
  if (p.seed) j["seed"] = *p.seed;
  return j;
}

inline PValueSection pvalue_from_json(const nlohmann::json& j) {
  PValueSection p;
  p.method = j.at("method") == "exact" ? Method::exact : Method::montecarlo;
  p.direction = j.at("direction") == to_string(Tail::disorder_at_most) ? Tail::disorder_at_most : Tail::kw_at_least;
  p.p = fraction_from_json(j.at("p"));
  if (j.contains("ci_low")) p.ci_low = j["ci_low"].get<double>();
  if (j.contains("ci_high")) p.ci_high = j["ci_high"].get<double>();
  if (j.contains("samples")) p.samples = j["samples"].get<std::uint64_t>();
  if (j.contains("seed")) p.seed = j["seed"].get<std::uint64_t>();
  return p;
}

inline nlohmann::json to_json(const TestReport& r) {
  const auto& c = r.concordance;
  nlohmann::json conc = {{"disorder", to_json(c.disorder)},
                         {"max_disorder", c.max_disorder},
                         {"tau", to_json(c.tau)},
                         {"closest_order", c.closest_order},
                         {"total_pairs", c.total_pairs},
                         {"lop_value", to_json(c.lop_value)},
                         {"degenerate", c.degenerate}};
  if (c.p_value) conc["p_value"] = to_json(*c.p_value);

  nlohmann::json j = {{"format", "concordance-report"},
                      {"version", 1},
                      {"input", {{"groups", r.groups}, {"sizes", r.sizes}, {"n", r.n}, {"tie_blocks", r.tie_blocks}}},
                      {"concordance", conc},
                      {"warnings", r.warnings},
                      {"notes", r.notes},
                      {"seconds", r.seconds}};
  if (r.kruskal_wallis) {
    const auto& k = *r.kruskal_wallis;
    nlohmann::json kw = {{"kw", k.kw},
                         {"rank_sums", k.rank_sums},
                         {"mean_ranks", k.mean_ranks},
                         {"tie_counts", k.tie_counts}};
    if (k.kw_tie_corrected) kw["kw_tie_corrected"] = *k.kw_tie_corrected;
    if (k.p_value) kw["p_value"] = to_json(*k.p_value);
    j["kruskal_wallis"] = kw;
  }
  return j;
}

inline TestReport report_from_json(const nlohmann::json& j) {
  TestReport r;
  const auto& in = j.at("input");
  r.groups = in.at("groups").get<std::vector<std::string>>();
  r.sizes = in.at("sizes").get<std::vector<std::int64_t>>();
  r.n = in.at("n").get<std::int64_t>();
  r.tie_blocks = in.at("tie_blocks").get<std::int64_t>();

  const auto& c = j.at("concordance");
  auto& conc = r.concordance;
  conc.disorder = fraction_from_json(c.at("disorder"));
  conc.max_disorder = c.at("max_disorder").get<std::int64_t>();
  conc.tau = fraction_from_json(c.at("tau"));
  conc.closest_order = c.at("closest_order").get<std::vector<std::string>>();
  conc.total_pairs = c.at("total_pairs").get<std::int64_t>();
  conc.lop_value = fraction_from_json(c.at("lop_value"));
  conc.degenerate = c.at("degenerate").get<bool>();
  if (c.contains("p_value")) conc.p_value = pvalue_from_json(c["p_value"]);

  if (j.contains("kruskal_wallis")) {
    const auto& k = j["kruskal_wallis"];
    KwSection s;
    s.kw = k.at("kw").get<double>();
    if (k.contains("kw_tie_corrected")) s.kw_tie_corrected = k["kw_tie_corrected"].get<double>();
    s.rank_sums = k.at("rank_sums").get<std::vector<double>>();
    s.mean_ranks = k.at("mean_ranks").get<std::vector<double>>();
    s.tie_counts = k.at("tie_counts").get<std::vector<std::int64_t>>();
    if (k.contains("p_value")) s.p_value = pvalue_from_json(k["p_value"]);
    r.kruskal_wallis = std::move(s);
  }
  r.warnings = j.at("warnings").get<std::vector<std::string>>();
  r.notes = j.at("notes").get<std::vector<std::string>>();
  r.seconds = j.at("seconds").get<double>();
  return r;
}

// ---------------------------------------------------------------- text ----

inline std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

/// Shortest decimal that reads back as `v` for the values reports carry
/// (rank sums, means): up to 4 decimals, trailing zeros dropped.
inline std::string compact(double v) {
  auto s = fixed(v, 4);
  while (!s.empty() && s.back() == '0') s.pop_back();
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s;
}

inline std::string describe(const PValueSection& p, const std::string& observed) {
  const bool disorder_tail = p.direction == Tail::disorder_at_most;
  std::string out = fixed(p.p.decimal(), 7) + " (" + to_string(p.method) + ", P(" +
                    (disorder_tail ? "disorder <= " : "KW >= ") + observed + ")";
  if (p.method == Method::exact) {
    out += ", " + p.p.num.str() + "/" + p.p.den.str();
  } else {
    out += ", 95% CI [" + fixed(*p.ci_low, 7) + ", " + fixed(*p.ci_high, 7) + "], " + std::to_string(*p.samples) +
           " samples, seed " + std::to_string(*p.seed);
  }
  return out + ")";
}

inline void render_text(std::ostream& out, const TestReport& r) {
  const auto& c = r.concordance;
  out << "Concordance test\n  groups         ";
  for (std::size_t i = 0; i < r.groups.size(); ++i)
    out << (i ? ", " : "") << r.groups[i] << " (" << r.sizes[i] << ")";
  out << "\n  observations   " << r.n << "\n  tie blocks     " << r.tie_blocks << "\n";

  const auto disorder_text = compact(c.disorder.decimal());
  out << "Concordance coefficient\n"
      << "  disorder       " << disorder_text << "\n"
      << "  max disorder   " << c.max_disorder << "\n"
      << "  tau            " << fixed(c.tau.decimal(), 4) << (c.degenerate ? " (degenerate)" : "") << "\n"
      << "  closest order  ";
  for (std::size_t i = 0; i < c.closest_order.size(); ++i) out << (i ? " " : "") << c.closest_order[i];
  out << "\n  LOP value      " << compact(c.lop_value.decimal()) << " of " << c.total_pairs << " pairs\n";
  if (c.p_value) out << "  p-value        " << describe(*c.p_value, disorder_text) << "\n";

  if (r.kruskal_wallis) {
    const auto& k = *r.kruskal_wallis;
    out << "Kruskal-Wallis\n  rank sums      ";
    for (std::size_t i = 0; i < r.groups.size(); ++i) out << (i ? ", " : "") << r.groups[i] << " " << compact(k.rank_sums[i]);
    out << "\n  mean ranks     ";
    for (std::size_t i = 0; i < r.groups.size(); ++i)
      out << (i ? ", " : "") << r.groups[i] << " " << fixed(k.mean_ranks[i], 2);
    out << "\n  KW             " << fixed(k.kw, 4) << "\n";
    if (k.kw_tie_corrected) out << "  tie-corrected  " << fixed(*k.kw_tie_corrected, 4) << "\n";
    if (k.p_value) out << "  p-value        " << describe(*k.p_value, fixed(k.kw, 4)) << "\n";
  }
  if (!r.warnings.empty()) {
    out << "Warnings\n";
    for (const auto& w : r.warnings) out << "  - " << w << "\n";
  }
  if (!r.notes.empty()) {
    out << "Notes\n";
    for (const auto& n : r.notes) out << "  - " << n << "\n";
  }
}

/// Flat key,value rows.
inline void render_csv(std::ostream& out, const TestReport& r) {
  const auto& c = r.concordance;
  out << "key,value\n";
  out << "n," << r.n << "\n";
  out << "tie_blocks," << r.tie_blocks << "\n";
  out << "disorder," << compact(c.disorder.decimal()) << "\n";
  out << "max_disorder," << c.max_disorder << "\n";
  out << "tau," << fixed(c.tau.decimal(), 4) << "\n";
  out << "closest_order,";
  for (std::size_t i = 0; i < c.closest_order.size(); ++i) out << (i ? " " : "") << c.closest_order[i];
  out << "\n";
  if (c.p_value) {
    out << "disorder_p_value," << fixed(c.p_value->p.decimal(), 7) << "\n";
    out << "disorder_p_method," << to_string(c.p_value->method) << "\n";
  }
  if (r.kruskal_wallis) {
    out << "kw," << fixed(r.kruskal_wallis->kw, 4) << "\n";
    if (r.kruskal_wallis->kw_tie_corrected) out << "kw_tie_corrected," << fixed(*r.kruskal_wallis->kw_tie_corrected, 4) << "\n";
    if (r.kruskal_wallis->p_value) out << "kw_p_value," << fixed(r.kruskal_wallis->p_value->p.decimal(), 7) << "\n";
  }
}

}  // namespace concordance::io
