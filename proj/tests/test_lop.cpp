#include <algorithm>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "concordance/lop.hpp"

using namespace concordance;

namespace {

PreferenceMatrix example1() { return PreferenceMatrix::from_units({{0, 3, 4}, {1, 0, 2}, {0, 2, 0}}); }
PreferenceMatrix example2() { return PreferenceMatrix::from_units({{0, 43, 19}, {7, 0, 2}, {11, 13, 0}}); }
PreferenceMatrix example3() { return PreferenceMatrix::from_units({{0, 42, 18.5}, {8, 0, 2}, {11.5, 13, 0}}); }

// Random matrix with m[r][s] + m[s][r] = n_r n_s, entries in halves.
PreferenceMatrix random_matrix(std::mt19937& rng, std::size_t k) {
  PreferenceMatrix m(k);
  std::vector<std::int64_t> sizes(k);
  for (auto& s : sizes) s = 1 + rng() % 6;
  for (std::size_t r = 0; r < k; ++r)
    for (std::size_t s = r + 1; s < k; ++s) {
      const std::int64_t pair_halves = 2 * sizes[r] * sizes[s];
      const std::int64_t forward = static_cast<std::int64_t>(rng() % (pair_halves + 1));
      m.set(r, s, HalfCount::from_halves(forward));
      m.set(s, r, HalfCount::from_halves(pair_halves - forward));
    }
  return m;
}

}  // namespace

TEST(Lop, Example1TwoOptimaLexicographicWinner) {
  const auto dp = lop_exact_dp(example1());
  EXPECT_EQ(dp.value, HalfCount::whole(9));
  EXPECT_EQ(dp.order, (std::vector<GroupIndex>{0, 1, 2}));
  EXPECT_EQ(order_value(example1(), {0, 2, 1}), HalfCount::whole(9));
  const auto bf = lop_bruteforce(example1());
  EXPECT_EQ(bf.order, dp.order);
}

TEST(Lop, Example2AllSixOrders) {
  const auto all = lop_all_orders(example2());
  ASSERT_EQ(all.size(), 6u);
  const std::vector<std::int64_t> expected = {64, 75, 28, 20, 67, 31};  // ABC ACB BAC BCA CAB CBA
  for (std::size_t i = 0; i < 6; ++i) EXPECT_EQ(all[i].second, HalfCount::whole(expected[i]));
  const auto dp = lop_exact_dp(example2());
  EXPECT_EQ(dp.value, HalfCount::whole(75));
  EXPECT_EQ(dp.order, (std::vector<GroupIndex>{0, 2, 1}));
}

TEST(Lop, TiedExampleHalfValues) {
  const auto bf = lop_bruteforce(example3());
  EXPECT_EQ(bf.value, HalfCount::from_halves(147));
  EXPECT_EQ(bf.order, (std::vector<GroupIndex>{0, 2, 1}));
  EXPECT_EQ(lop_exact_dp(example3()).value, bf.value);
}

TEST(Lop, SingleGroup) {
  const auto sol = lop_exact_dp(PreferenceMatrix(1));
  EXPECT_EQ(sol.value, HalfCount{});
  EXPECT_EQ(sol.order, (std::vector<GroupIndex>{0}));
}

TEST(Lop, TwoGroupsTakeTheLargerDirection) {
  for (double x : {0.0, 2.5, 7.0}) {
    for (double y : {0.0, 3.0, 4.5}) {
      const auto m = PreferenceMatrix::from_units({{0, x}, {y, 0}});
      EXPECT_DOUBLE_EQ(lop_exact_dp(m).value.value(), std::max(x, y));
      EXPECT_DOUBLE_EQ(lop_bruteforce(m).value.value(), std::max(x, y));
    }
  }
}

TEST(Lop, CapacityLimits) {
  try {
    lop_bruteforce(PreferenceMatrix(10));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::capacity);
  }
  try {
    lop_exact_dp(PreferenceMatrix(25));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::capacity);
  }
  EXPECT_THROW(PreferenceMatrix::from_units({{0, 0.25}, {1, 0}}), Error);
}

TEST(Lop, DpMatchesBruteForceOnRandomMatrices) {
  std::mt19937 rng(2024);
  LopSolver solver;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t k = 2 + trial % 6;
    const auto m = random_matrix(rng, k);
    const auto bf = lop_bruteforce(m);
    const auto dp = solver.solve(m);
    ASSERT_EQ(dp.value, bf.value) << "trial " << trial;
    EXPECT_EQ(dp.order, bf.order) << "both report the lexicographically smallest optimum";
    EXPECT_EQ(order_value(m, dp.order), dp.value);
  }
}

TEST(Lop, ValueBounds) {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t k = 2 + trial % 5;
    const auto m = random_matrix(rng, k);
    const auto value = lop_exact_dp(m).value;
    std::int64_t upper = 0;
    for (std::size_t r = 0; r < k; ++r)
      for (std::size_t s = r + 1; s < k; ++s) upper += std::max(m.halves(r, s), m.halves(s, r));
    EXPECT_LE(value.halves(), upper);
    EXPECT_GE(2 * value.halves(), m.total().halves());
  }
}

TEST(Lop, TransposeReversesOptimalOrder) {
  std::mt19937 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const auto m = random_matrix(rng, 2 + trial % 6);
    const auto sol = lop_exact_dp(m);
    const auto t = m.transposed();
    EXPECT_EQ(lop_exact_dp(t).value, sol.value);
    auto reversed = sol.order;
    std::reverse(reversed.begin(), reversed.end());
    EXPECT_EQ(order_value(t, reversed), sol.value);
  }
}

TEST(Lop, RelabelingPermutesTheOptimum) {
  std::mt19937 rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t k = 2 + trial % 6;
    const auto m = random_matrix(rng, k);
    std::vector<GroupIndex> sigma(k);
    std::iota(sigma.begin(), sigma.end(), GroupIndex{0});
    std::shuffle(sigma.begin(), sigma.end(), rng);
    const auto sol = lop_exact_dp(m);
    const auto relabeled = m.relabeled(sigma);
    EXPECT_EQ(lop_exact_dp(relabeled).value, sol.value);
    std::vector<GroupIndex> mapped;
    for (auto g : sol.order) mapped.push_back(sigma[g]);
    EXPECT_EQ(order_value(relabeled, mapped), sol.value);
  }
}
