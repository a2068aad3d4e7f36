#pragma once

// Command-line front end: `test`, `dist`, `tables` and `compare`.
// run_cli() is the whole program minus main(), so it can be driven in-process.

#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "concordance/exact_distribution.hpp"
#include "concordance/io/cache.hpp"
#include "concordance/io/input.hpp"
#include "concordance/io/report.hpp"
#include "concordance/monte_carlo.hpp"

namespace concordance::io {

enum ExitCode : int { kExitOk = 0, kExitInput = 2, kExitCapacity = 3, kExitDegenerate = 4 };

inline int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::capacity: return kExitCapacity;
    case ErrorKind::degenerate: return kExitDegenerate;
    default: return kExitInput;
  }
}

enum class OutputFormat { text, csv, json };

struct CommonOptions {
  OutputFormat format = OutputFormat::text;
  std::uint64_t budget = kDefaultBudget;
  std::string cache_dir;
  std::uint64_t samples = 100'000;
  std::uint64_t seed = 0;
  PValueMethod pvalue = PValueMethod::exact;

  std::optional<DistributionCache> cache() const {
    if (cache_dir.empty()) return std::nullopt;
    return DistributionCache(cache_dir);
  }
  EnumerationOptions enumeration() const { return {budget, 0}; }
  McOptions montecarlo() const { return {samples, seed, 0}; }
};

// ------------------------------------------------------------------ test --

struct TestCommand {
  std::string input;
  bool pre_ranked = false;
  bool no_kw = false;
};

inline int run_test(const TestCommand& cmd, const CommonOptions& common, std::ostream& out) {
  LabeledSample sample;
  if (cmd.input == "-") {
    sample = cmd.pre_ranked ? read_pre_ranked(std::cin) : arrangement_from_data(read_csv(std::cin));
  } else {
    std::ifstream in(cmd.input);
    if (!in) fail(ErrorKind::parse, "cannot open input file '" + cmd.input + "'");
    sample = cmd.pre_ranked ? read_pre_ranked(in) : arrangement_from_data(read_csv(in));
  }

  TestOptions options;
  options.pvalue = common.pvalue;
  options.kruskal_wallis = !cmd.no_kw;
  options.enumeration = common.enumeration();
  options.montecarlo = common.montecarlo();
  options.cache = common.cache();
  TestReport report;
  try {
    report = build_report(sample, options);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::capacity) fail(ErrorKind::capacity, std::string(e.what()) + " (--pvalue montecarlo)");
    throw;
  }

  switch (common.format) {
    case OutputFormat::text: render_text(out, report); break;
    case OutputFormat::csv: render_csv(out, report); break;
    case OutputFormat::json: out << to_json(report).dump(2) << "\n"; break;
  }
  return report.concordance.degenerate ? kExitDegenerate : kExitOk;
}

// ------------------------------------------------------------------ dist --

struct DistCommand {
  std::string sizes;
  Statistic statistic = Statistic::disorder;
  bool normalize_kw = false;
};

inline void render_exact(std::ostream& out, const ExactDistribution& dist, Statistic shown, OutputFormat format) {
  const bool kw = shown == Statistic::kw;
  const auto n = dist.atoms.size();
  auto value_text = [&](std::size_t i) {
    return kw ? fixed(dist.atoms[i].value, 2) : compact(dist.atoms[i].value);
  };
  if (format == OutputFormat::json) {
    nlohmann::json atoms = nlohmann::json::array();
    for (std::size_t i = 0; i < n; ++i) {
      nlohmann::json a = {{"value", dist.atoms[i].value},
                          {"key", dist.atoms[i].key},
                          {"count", dist.atoms[i].count.str()},
                          {"probability", dist.probability(i)}};
      if (shown == Statistic::tau) a["tau"] = dist.tau(i);
      atoms.push_back(a);
    }
    nlohmann::json j = {{"sizes", dist.sizes.values()},
                        {"statistic", to_string(shown)},
                        {"method", "exact"},
                        {"total", dist.total.str()},
                        {"atoms", atoms}};
    if (!kw) j["max_disorder"] = dist.max_disorder;
    out << j.dump(2) << "\n";
    return;
  }
  if (format == OutputFormat::csv) {
    out << (shown == Statistic::tau ? "disorder,tau,count,probability\n" : "value,count,probability\n");
    for (std::size_t i = 0; i < n; ++i) {
      out << value_text(i) << ",";
      if (shown == Statistic::tau) out << fixed(dist.tau(i), 4) << ",";
      out << dist.atoms[i].count.str() << "," << fixed(dist.probability(i), 5) << "\n";
    }
    return;
  }
  out << "# exact distribution of " << to_string(shown) << ", sizes (" << dist.sizes.to_string() << "), "
      << dist.total.str() << " arrangements\n";
  if (kw) {
    out << "     KW      count     prob\n";
    for (std::size_t i = n; i-- > 0;) {
      char line[128];
      std::snprintf(line, sizeof line, "%7s %10s  %7s\n", value_text(i).c_str(), dist.atoms[i].count.str().c_str(),
                    fixed(dist.probability(i), 5).c_str());
      out << line;
    }
  } else {
    out << "    dis     tau      count     prob\n";
    for (std::size_t i = 0; i < n; ++i) {
      char line[128];
      std::snprintf(line, sizeof line, "%7s  %6s %10s  %7s\n", value_text(i).c_str(),
                    fixed(dist.tau(i), 4).c_str(), dist.atoms[i].count.str().c_str(),
                    fixed(dist.probability(i), 5).c_str());
      out << line;
    }
  }
}

inline void render_histogram(std::ostream& out, const McHistogram& h, OutputFormat format) {
  const bool kw = h.statistic == Statistic::kw;
  if (format == OutputFormat::json) {
    nlohmann::json bins = nlohmann::json::array();
    for (const auto& b : h.bins) bins.push_back({{"value", b.value}, {"count", b.count}, {"frequency", b.frequency}});
    out << nlohmann::json{{"sizes", h.sizes.values()},
                          {"statistic", to_string(h.statistic)},
                          {"method", "montecarlo"},
                          {"samples", h.samples},
                          {"seed", h.seed},
                          {"kw_normalized", h.kw_normalized},
                          {"bins", bins}}
                .dump(2)
        << "\n";
    return;
  }
  if (format == OutputFormat::text)
    out << "# Monte Carlo distribution of " << to_string(h.statistic) << (h.kw_normalized ? " (normalized)" : "")
        << ", sizes (" << h.sizes.to_string() << "), " << h.samples << " samples, seed " << h.seed << "\n";
  out << (format == OutputFormat::csv ? "value,count,frequency\n" : "    value      count     freq\n");
  for (const auto& b : h.bins) {
    const auto value = kw || h.statistic == Statistic::tau ? fixed(b.value, 4) : compact(b.value);
    if (format == OutputFormat::csv) {
      out << value << "," << b.count << "," << fixed(b.frequency, 5) << "\n";
    } else {
      char line[128];
      std::snprintf(line, sizeof line, "%9s %10llu  %7s\n", value.c_str(), static_cast<unsigned long long>(b.count),
                    fixed(b.frequency, 5).c_str());
      out << line;
    }
  }
}

inline int run_dist(const DistCommand& cmd, const CommonOptions& common, std::ostream& out) {
  const auto sizes = parse_sizes(cmd.sizes);
  if (common.pvalue == PValueMethod::montecarlo) {
    render_histogram(out, mc_distribution(sizes, cmd.statistic, common.montecarlo(), cmd.normalize_kw), common.format);
    return kExitOk;
  }
  const auto dist = cached_distribution(common.cache(), sizes, cmd.statistic, common.enumeration());
  render_exact(out, dist, cmd.statistic, common.format);
  return kExitOk;
}

// ---------------------------------------------------------------- tables --

struct TablesCommand {
  std::vector<std::string> sizes;
  std::string alphas;
};

inline int run_tables(const TablesCommand& cmd, const CommonOptions& common, std::ostream& out) {
  const auto alphas = parse_alphas(cmd.alphas);
  if (cmd.sizes.empty()) fail(ErrorKind::configuration, "tables: at least one --sizes is required");
  nlohmann::json tables = nlohmann::json::array();
  if (common.format == OutputFormat::csv) out << "sizes,alpha,critical_disorder,tau,count,total,p_value\n";

  for (const auto& text : cmd.sizes) {
    const auto sizes = parse_sizes(text);
    const auto dist = cached_distribution(common.cache(), sizes, Statistic::disorder, common.enumeration());
    const auto rows = critical_values(dist, alphas);
    auto tau_of = [&](HalfCount d) { return 1.0 - d.value() / static_cast<double>(dist.max_disorder); };

    if (common.format == OutputFormat::json) {
      nlohmann::json jr = nlohmann::json::array();
      for (const auto& r : rows) {
        nlohmann::json row = {{"alpha", r.alpha}, {"attainable", r.disorder.has_value()}};
        if (r.disorder) {
          row["critical_disorder"] = r.disorder->value();
          row["tau"] = tau_of(*r.disorder);
          row["p"] = to_json(Fraction{r.count, r.total});
        }
        jr.push_back(row);
      }
      tables.push_back({{"sizes", sizes.values()},
                        {"total", dist.total.str()},
                        {"convention", "largest d with P(D <= d) <= alpha"},
                        {"rows", jr}});
    } else if (common.format == OutputFormat::csv) {
      for (const auto& r : rows) {
        out << '"' << sizes.to_string() << "\"," << fixed(r.alpha, 2) << ",";
        if (r.disorder) {
          out << r.disorder->to_string() << "," << fixed(tau_of(*r.disorder), 4) << "," << r.count.str() << ","
              << r.total.str() << "," << fixed(r.attained_p, 7) << "\n";
        } else {
          out << "unattainable,,,,\n";
        }
      }
    } else {
      out << "sizes (" << sizes.to_string() << "): " << dist.total.str()
          << " arrangements; critical value = largest d with P(D <= d) <= alpha (conservative)\n"
          << "  alpha  disorder     tau    p-value\n";
      for (const auto& r : rows) {
        char line[128];
        if (r.disorder) {
          std::snprintf(line, sizeof line, "  %5s  %8s  %6s  %9s\n", fixed(r.alpha, 2).c_str(),
                        r.disorder->to_string().c_str(), fixed(tau_of(*r.disorder), 4).c_str(),
                        fixed(r.attained_p, 7).c_str());
        } else {
          std::snprintf(line, sizeof line, "  %5s  unattainable (smallest atom exceeds alpha)\n",
                        fixed(r.alpha, 2).c_str());
        }
        out << line;
      }
    }
  }
  if (common.format == OutputFormat::json) out << tables.dump(2) << "\n";
  return kExitOk;
}

// --------------------------------------------------------------- compare --

struct CompareCommand {
  std::string sizes;
};

/// Paired densities of tau and normalized KW on a shared [0, 1] axis.
struct ComparisonTable {
  std::string method;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  struct Row {
    double value = 0.0;
    double concordance = 0.0;
    double kw = 0.0;
  };
  std::vector<Row> rows;
};

inline ComparisonTable compare_distributions(const GroupSizes& sizes, const CommonOptions& common) {
  ComparisonTable table;
  std::map<long long, ComparisonTable::Row> merged;
  auto slot = [&](double v) -> ComparisonTable::Row& {
    auto& row = merged[std::llround(v * 1e9)];
    row.value = v;
    return row;
  };
  const double kw_scale = max_kw(sizes);

  bool exact = multinomial(sizes) <= common.budget && common.pvalue != PValueMethod::montecarlo;
  if (exact) {
    auto [dis, kw] = enumerate_disorder_and_kw(sizes, common.enumeration());
    table.method = "exact";
    for (std::size_t i = 0; i < dis.atoms.size(); ++i) slot(dis.tau(i)).concordance += dis.probability(i);
    for (std::size_t i = 0; i < kw.atoms.size(); ++i) slot(kw.atoms[i].value / kw_scale).kw += kw.probability(i);
  } else {
    const auto options = common.montecarlo();
    table.method = "montecarlo";
    table.samples = options.samples;
    table.seed = options.seed;
    for (const auto& b : mc_distribution(sizes, Statistic::tau, options).bins) slot(b.value).concordance += b.frequency;
    for (const auto& b : mc_distribution(sizes, Statistic::kw, options, true).bins) slot(b.value).kw += b.frequency;
  }
  for (const auto& [key, row] : merged) table.rows.push_back(row);
  return table;
}

inline int run_compare(const CompareCommand& cmd, const CommonOptions& common, std::ostream& out) {
  const auto sizes = parse_sizes(cmd.sizes);
  if (sizes.k() < 2 || max_disorder(sizes) <= 0)
    fail(ErrorKind::degenerate, "compare: tau is undefined for sizes (" + sizes.to_string() + ")");
  const auto table = compare_distributions(sizes, common);
  if (common.format == OutputFormat::json) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : table.rows)
      rows.push_back({{"statistic_value_normalized", r.value}, {"concordance_density", r.concordance},
                      {"kw_density", r.kw}});
    nlohmann::json j = {{"sizes", sizes.values()}, {"method", table.method}, {"rows", rows}};
    if (table.method == "montecarlo") {
      j["samples"] = table.samples;
      j["seed"] = table.seed;
    }
    out << j.dump(2) << "\n";
    return kExitOk;
  }
  out << "# sizes=(" << sizes.to_string() << ") method=" << table.method;
  if (table.method == "montecarlo") out << " samples=" << table.samples << " seed=" << table.seed;
  out << "\nstatistic_value_normalized,concordance_density,kw_density\n";
  char line[128];
  for (const auto& r : table.rows) {
    std::snprintf(line, sizeof line, "%.6f,%.6f,%.6f\n", r.value, r.concordance, r.kw);
    out << line;
  }
  return kExitOk;
}

// ------------------------------------------------------------------ main --

inline int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Concordance coefficient test: exact and Monte Carlo k-sample rank statistics", "concordance"};
  app.require_subcommand(1);

  CommonOptions common;
  const std::map<std::string, OutputFormat> formats{
      {"text", OutputFormat::text}, {"csv", OutputFormat::csv}, {"json", OutputFormat::json}};
  const std::map<std::string, PValueMethod> methods{
      {"exact", PValueMethod::exact}, {"montecarlo", PValueMethod::montecarlo}, {"none", PValueMethod::none}};
  const std::map<std::string, Statistic> statistics{
      {"disorder", Statistic::disorder}, {"tau", Statistic::tau}, {"kw", Statistic::kw}};

  auto add_common = [&](CLI::App* sub, bool with_method) {
    sub->add_option("--format", common.format, "Output format")->transform(CLI::CheckedTransformer(formats));
    sub->add_option("--budget", common.budget, "Largest number of arrangements to enumerate exactly");
    sub->add_option("--cache-dir", common.cache_dir, "Directory for cached exact distributions");
    sub->add_option("--samples", common.samples, "Monte Carlo sample count");
    sub->add_option("--seed", common.seed, "Monte Carlo seed");
    if (with_method)
      sub->add_option("--pvalue", common.pvalue, "exact, montecarlo or none")
          ->transform(CLI::CheckedTransformer(methods));
  };

  TestCommand test;
  auto* test_cmd = app.add_subcommand("test", "Run the concordance (and Kruskal-Wallis) test on a data file");
  test_cmd->add_option("input", test.input, "CSV with header group,value ('-' for stdin)")->required();
  test_cmd->add_flag("--pre-ranked", test.pre_ranked, "Input is a label sequence such as 'a a (a c) b'");
  test_cmd->add_flag("--no-kw", test.no_kw, "Skip the Kruskal-Wallis statistic");
  add_common(test_cmd, true);

  DistCommand dist;
  auto* dist_cmd = app.add_subcommand("dist", "Null distribution of a statistic for given group sizes");
  dist_cmd->add_option("--sizes", dist.sizes, "Comma-separated group sizes")->required();
  dist_cmd->add_option("--statistic", dist.statistic, "disorder, tau or kw")
      ->transform(CLI::CheckedTransformer(statistics));
  dist_cmd->add_flag("--normalize-kw", dist.normalize_kw, "Scale KW to [0, 1] (Monte Carlo output)");
  add_common(dist_cmd, true);

  TablesCommand tables;
  auto* tables_cmd = app.add_subcommand("tables", "Critical values of the disorder statistic");
  tables_cmd->add_option("--sizes", tables.sizes, "Group sizes; repeat for several tables")->required();
  tables_cmd->add_option("--alpha", tables.alphas, "Comma-separated significance levels");
  add_common(tables_cmd, false);

  CompareCommand compare;
  auto* compare_cmd = app.add_subcommand("compare", "Paired tau / normalized KW densities as CSV");
  compare_cmd->add_option("--sizes", compare.sizes, "Comma-separated group sizes")->required();
  compare_cmd->add_flag("--normalize-kw", "Accepted for symmetry; compare always normalizes KW");
  add_common(compare_cmd, true);

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*test_cmd) return run_test(test, common, out);
    if (*dist_cmd) return run_dist(dist, common, out);
    if (*tables_cmd) return run_tables(tables, common, out);
    if (*compare_cmd) return run_compare(compare, common, out);
  } catch (const Error& e) {
    err << "error: " << to_string(e.kind()) << ": " << e.what() << "\n";
    return exit_code_for(e.kind());
  }
  return kExitInput;
}

}  // namespace concordance::io
