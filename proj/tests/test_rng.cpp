#include <cmath>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "sapleak/rng.hpp"

using namespace sapleak;

TEST(Rng, DerivedSeedsAreStableAndDistinct) {
  EXPECT_EQ(derive_seed(1, 2, "queries"), derive_seed(1, 2, "queries"));
  std::set<std::uint64_t> seen;
  for (std::uint64_t base : {0, 1, 2}) {
    for (std::uint64_t idx : {0, 1, 2, 3}) {
      for (const char* label : {"universe", "split", "queries", "defense"}) {
        seen.insert(derive_seed(base, idx, label));
      }
    }
  }
  EXPECT_EQ(seen.size(), 48u);
}

TEST(Rng, Fnv1aKnownVectors) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(fnv1a64("foobar"), 0x85944171f73967e8ULL);
}

TEST(Rng, StreamsReproduce) {
  Rng a = make_rng(7, 3, "x");
  Rng b = make_rng(7, 3, "x");
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a(), b());
}

TEST(Rng, LaplaceMomentsMatch) {
  Rng rng(123);
  const double scale = 2.0;
  const int n = 400000;
  double sum = 0.0;
  double abs_sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = sample_laplace(rng, scale);
    ASSERT_TRUE(std::isfinite(x));
    sum += x;
    abs_sum += std::abs(x);
  }
  // mean 0 (sd sqrt(2) scale), E|X| = scale (sd = scale)
  EXPECT_NEAR(sum / n, 0.0, 5 * std::sqrt(2.0) * scale / std::sqrt(n));
  EXPECT_NEAR(abs_sum / n, scale, 5 * scale / std::sqrt(n));
}

TEST(Rng, PoissonZeroMeanIsZero) {
  Rng rng(1);
  for (int i = 0; i < 100; ++i) {
    EXPECT_EQ(sample_poisson(rng, 0.0), 0);
    EXPECT_EQ(sample_poisson(rng, -1.0), 0);
  }
}

TEST(Rng, PoissonMeanMatches) {
  for (double mean : {0.3, 5.0, 40.0}) {
    Rng rng(99);
    const int n = 200000;
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += static_cast<double>(sample_poisson(rng, mean));
    EXPECT_NEAR(s / n, mean, 5 * std::sqrt(mean / n));
  }
}
