#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "cproc/util.hpp"

using namespace cproc;

TEST(Util, UniformIndexStaysInRange) {
  Rng rng(7);
  std::vector<int> hits(7, 0);
  for (int i = 0; i < 7000; ++i) {
    const auto v = uniform_index(rng, 7);
    ASSERT_LT(v, 7u);
    ++hits[v];
  }
  for (int h : hits) EXPECT_GT(h, 800);
}

TEST(Util, ShuffleIsAPermutationAndDeterministic) {
  std::vector<int> a(50), b(50);
  std::iota(a.begin(), a.end(), 0);
  b = a;
  Rng r1(3), r2(3);
  shuffle(a, r1);
  shuffle(b, r2);
  EXPECT_EQ(a, b);
  auto sorted = a;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 50; ++i) EXPECT_EQ(sorted[i], i);
}

TEST(Util, FormatDoubleRoundTrips) {
  for (double x : {0.0, 1.0, -2.5, 0.1, 1e-300, 123456.789, 1.0 / 3.0}) EXPECT_EQ(parse_double(format_double(x)), x);
  EXPECT_EQ(format_double(INFINITY), "inf");
  EXPECT_TRUE(std::isinf(parse_double("inf")));
  EXPECT_THROW(parse_double("abc"), std::exception);
}

TEST(Util, SplitAndTrim) {
  EXPECT_EQ(trim("  a b \t"), "a b");
  const auto parts = split("1, 2,,3", ',');
  ASSERT_EQ(parts.size(), 4u);
  EXPECT_EQ(parts[2], "");
  EXPECT_EQ(trim(parts[1]), "2");
}

TEST(Util, Fnv1aKnownVector) {
  Fnv1a h;
  h.update(std::string_view("a"));
  EXPECT_EQ(h.digest(), 0xaf63dc4c8601ec8cULL);
}

TEST(Util, ParallelForVisitsEachIndexOnce) {
  std::vector<std::atomic<int>> seen(1000);
  parallel_for(seen.size(), 4, [&](std::size_t i) { seen[i]++; });
  for (auto& s : seen) EXPECT_EQ(s.load(), 1);
}

TEST(Util, ParallelForRethrows) {
  EXPECT_THROW(parallel_for(10, 3,
                            [](std::size_t i) {
                              if (i == 5) throw std::runtime_error("boom");
                            }),
               std::runtime_error);
}
