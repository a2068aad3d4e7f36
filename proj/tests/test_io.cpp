#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "concordance/io/cli.hpp"
#include "concordance/io/input.hpp"
#include "fixtures.hpp"

using namespace concordance;
using namespace concordance::io;
using concordance::testing::letters;

namespace {

std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("concordance-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::filesystem::path write_file(const std::filesystem::path& dir, const std::string& name, const std::string& text) {
  const auto path = dir / name;
  std::ofstream(path) << text;
  return path;
}

std::string hours_csv(const std::vector<Record>& records) {
  std::string out = "group,value\n";
  for (const auto& r : records) out += r.group + "," + std::to_string(r.value) + "\n";
  return out;
}

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(std::move(args), out, err);
  return {code, out.str(), err.str()};
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::parse;
}

}  // namespace

TEST(Csv, ReadsRecords) {
  std::istringstream in("\xEF\xBB\xBFgroup,value\n\nA, 1.5\nB,+2\r\nA,-3e1\n");
  const auto records = read_csv(in);
  ASSERT_EQ(records.size(), 3u);
  EXPECT_EQ(records[0].group, "A");
  EXPECT_DOUBLE_EQ(records[0].value, 1.5);
  EXPECT_DOUBLE_EQ(records[1].value, 2.0);
  EXPECT_DOUBLE_EQ(records[2].value, -30.0);
}

TEST(Csv, Errors) {
  auto parse = [](const std::string& text) {
    return [text] {
      std::istringstream in(text);
      read_csv(in);
    };
  };
  EXPECT_EQ(kind_of(parse("g,v\nA,1\n")), ErrorKind::parse);
  EXPECT_EQ(kind_of(parse("group,value\nA,x\n")), ErrorKind::parse);
  EXPECT_EQ(kind_of(parse("group,value\nA,1,2\n")), ErrorKind::parse);
  EXPECT_EQ(kind_of(parse("group,value\n,1\n")), ErrorKind::parse);
  EXPECT_EQ(kind_of(parse("group,value\nA,nan\n")), ErrorKind::parse);
  EXPECT_EQ(kind_of(parse("group,value\n")), ErrorKind::empty_input);
  EXPECT_EQ(kind_of(parse("")), ErrorKind::empty_input);
  try {
    parse("group,value\nA,1\nB,oops\n")();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
}

TEST(PreRanked, ParsesTiedSequence) {
  const auto s = parse_pre_ranked(concordance::testing::kTiedSequence);
  const auto expected = arrangement_from_data(concordance::testing::hours_tied());
  EXPECT_EQ(s.group_names, (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_EQ(s.sizes, expected.sizes);
  EXPECT_EQ(s.arrangement, expected.arrangement);
  const auto u = parse_pre_ranked(concordance::testing::kUntiedSequence);
  EXPECT_EQ(u.arrangement, Arrangement(letters("aaaaaccababaacabbb")));
  // Labels are indexed in sorted order regardless of first appearance.
  const auto v = parse_pre_ranked("z y | (x z),y");
  EXPECT_EQ(v.group_names, (std::vector<std::string>{"x", "y", "z"}));
  EXPECT_EQ(v.arrangement, Arrangement(std::vector<std::vector<GroupIndex>>{{2}, {1}, {0, 2}, {1}}));
}

TEST(PreRanked, Errors) {
  EXPECT_EQ(kind_of([] { parse_pre_ranked("a (b (c))"); }), ErrorKind::parse);
  EXPECT_EQ(kind_of([] { parse_pre_ranked("a b)"); }), ErrorKind::parse);
  EXPECT_EQ(kind_of([] { parse_pre_ranked("a ()"); }), ErrorKind::parse);
  EXPECT_EQ(kind_of([] { parse_pre_ranked("a (b"); }), ErrorKind::parse);
  EXPECT_EQ(kind_of([] { parse_pre_ranked("   "); }), ErrorKind::empty_input);
}

TEST(Options, SizesAndAlphas) {
  EXPECT_EQ(parse_sizes("10,5,3"), GroupSizes({10, 5, 3}));
  EXPECT_EQ(kind_of([] { parse_sizes("10,,3"); }), ErrorKind::configuration);
  EXPECT_EQ(kind_of([] { parse_sizes("10,0"); }), ErrorKind::configuration);
  EXPECT_EQ(kind_of([] { parse_sizes("a"); }), ErrorKind::configuration);
  EXPECT_EQ(parse_alphas(""), (std::vector<double>{0.10, 0.05, 0.01}));
  EXPECT_EQ(parse_alphas("0.2, 0.05"), (std::vector<double>{0.2, 0.05}));
  EXPECT_EQ(kind_of([] { parse_alphas("1.5"); }), ErrorKind::configuration);
}

TEST(Cache, HitEqualsMiss) {
  const auto dir = scratch_dir("cache");
  const DistributionCache cache(dir);
  const GroupSizes sizes({4, 3, 2});
  for (auto stat : {Statistic::disorder, Statistic::kw}) {
    EXPECT_FALSE(cache.load(sizes, stat).has_value());
    const auto miss = cached_distribution(cache, sizes, stat, {});
    ASSERT_TRUE(std::filesystem::exists(cache.path_for(sizes, stat)));
    const auto hit = cache.load(sizes, stat);
    ASSERT_TRUE(hit.has_value());
    EXPECT_EQ(hit->total, miss.total);
    ASSERT_EQ(hit->atoms.size(), miss.atoms.size());
    for (std::size_t i = 0; i < miss.atoms.size(); ++i) {
      EXPECT_EQ(hit->atoms[i].key, miss.atoms[i].key);
      EXPECT_EQ(hit->atoms[i].count, miss.atoms[i].count);
      EXPECT_DOUBLE_EQ(hit->atoms[i].value, miss.atoms[i].value);
    }
  }
  // Group order does not change the file, tau shares the disorder entry.
  EXPECT_EQ(cache.path_for(GroupSizes({2, 4, 3}), Statistic::disorder), cache.path_for(sizes, Statistic::tau));

  // A corrupt entry is ignored and rebuilt.
  write_file(dir, cache.path_for(sizes, Statistic::disorder).filename().string(), "garbage\n");
  EXPECT_FALSE(cache.load(sizes, Statistic::disorder).has_value());
  EXPECT_EQ(cached_distribution(cache, sizes, Statistic::disorder, {}).total, 1260);
  std::filesystem::remove_all(dir);
}

TEST(Report, JsonRoundTrip) {
  for (const auto& records : {concordance::testing::hours_untied(), concordance::testing::hours_tied()}) {
    TestOptions options;
    const auto report = build_report(arrangement_from_data(records), options);
    const auto json = to_json(report);
    EXPECT_EQ(report_from_json(nlohmann::json::parse(json.dump())), report);
  }
  TestOptions mc;
  mc.pvalue = PValueMethod::montecarlo;
  mc.montecarlo.samples = 2000;
  const auto report = build_report(arrangement_from_data(concordance::testing::hours_tied()), mc);
  EXPECT_EQ(report_from_json(to_json(report)), report);
  ASSERT_TRUE(report.concordance.p_value.has_value());
  EXPECT_EQ(report.concordance.p_value->samples, 2000u);
}

TEST(Report, HoursExampleContent) {
  const auto report = build_report(arrangement_from_data(concordance::testing::hours_untied()), {});
  EXPECT_EQ(report.concordance.disorder, (Fraction{20, 1}));
  EXPECT_EQ(report.concordance.tau, (Fraction{27, 47}));
  EXPECT_EQ(report.concordance.closest_order, (std::vector<std::string>{"A", "C", "B"}));
  ASSERT_TRUE(report.concordance.p_value);
  EXPECT_EQ(report.concordance.p_value->p, (Fraction{120738, 2450448}));
  ASSERT_TRUE(report.kruskal_wallis && report.kruskal_wallis->p_value);
  EXPECT_EQ(report.kruskal_wallis->p_value->p, (Fraction{127996, 2450448}));

  const auto tied = build_report(arrangement_from_data(concordance::testing::hours_tied()), {});
  EXPECT_EQ(tied.concordance.disorder, (Fraction{43, 2}));
  EXPECT_EQ(tied.tie_blocks, 3);
  bool noted = false;
  for (const auto& n : tied.notes) noted |= n.find("t^2 - t") != std::string::npos;
  EXPECT_TRUE(noted);
}

TEST(Cli, TestCommand) {
  const auto dir = scratch_dir("cli");
  const auto csv = write_file(dir, "hours.csv", hours_csv(concordance::testing::hours_untied()));
  auto r = cli({"test", csv.string()});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("disorder       20"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("120738/2450448"), std::string::npos);

  r = cli({"test", csv.string(), "--format", "json", "--cache-dir", (dir / "cache").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["concordance"]["disorder"]["num"], "20");
  EXPECT_TRUE(std::filesystem::exists(dir / "cache"));
  r = cli({"test", csv.string(), "--format", "csv"});
  EXPECT_EQ(r.code, 0);
  EXPECT_FALSE(r.out.empty());

  const auto ranked = write_file(dir, "ranked.txt", concordance::testing::kTiedSequence);
  r = cli({"test", "--pre-ranked", ranked.string(), "--pvalue", "montecarlo", "--samples", "1000", "--seed", "3"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("21.5"), std::string::npos);

  const auto bad = write_file(dir, "bad.csv", "group,value\nA,x\n");
  r = cli({"test", bad.string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("error:"), std::string::npos);
  EXPECT_EQ(cli({"test", (dir / "missing.csv").string()}).code, 2);

  const auto single = write_file(dir, "single.csv", "group,value\nA,1\nA,2\n");
  EXPECT_EQ(cli({"test", single.string()}).code, 4);
  const auto pair = write_file(dir, "pair.csv", "group,value\nA,1\nB,2\n");
  // Degenerate sizes still print the report, then signal through the exit code.
  r = cli({"test", pair.string()});
  EXPECT_EQ(r.code, 4) << r.err;
  EXPECT_NE(r.out.find("degenerate"), std::string::npos) << r.out;
  std::filesystem::remove_all(dir);
}

TEST(Cli, DistTablesCompare) {
  auto r = cli({"dist", "--sizes", "2,2,2", "--format", "csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "value,count,probability");
  EXPECT_NE(r.out.find("3,18,"), std::string::npos) << r.out;

  r = cli({"dist", "--sizes", "2,2,2", "--statistic", "kw", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(nlohmann::json::accept(r.out));

  r = cli({"dist", "--sizes", "6,6,6,6"});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("capacity"), std::string::npos);
  r = cli({"dist", "--sizes", "6,6,6,6", "--pvalue", "montecarlo", "--samples", "2000", "--format", "csv"});
  EXPECT_EQ(r.code, 0) << r.err;

  r = cli({"tables", "--sizes", "10,5,3", "--alpha", "0.05"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("0.0492718"), std::string::npos) << r.out;

  r = cli({"compare", "--sizes", "2,2,2"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("statistic_value_normalized,concordance_density,kw_density"), std::string::npos);

  EXPECT_EQ(cli({"dist", "--sizes", "x"}).code, 2);
  EXPECT_EQ(cli({"dist", "--sizes", "2,2", "--statistic", "bogus"}).code, 2);
  EXPECT_EQ(cli({"nonsense"}).code, 2);
  EXPECT_EQ(cli({"--help"}).code, 0);
  EXPECT_EQ(cli({"dist", "--sizes", "1,1", "--statistic", "tau"}).code, 4);
}
