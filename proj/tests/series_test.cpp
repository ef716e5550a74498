#include <gtest/gtest.h>

#include <random>
#include <set>
#include <vector>

#include "crossing/truncated_series.hpp"
#include "oracles.hpp"

namespace crossing {
namespace {

TEST(IndexSpace, RankIsABijectionInGradedOrder) {
  for (std::size_t dims : {1u, 2u, 3u, 4u}) {
    const IndexSpace sp(dims, 7);
    std::uint64_t prev_degree = 0;
    for (std::size_t r = 0; r < sp.size(); ++r) {
      const MultiIndex m = sp.index(r);
      EXPECT_EQ(sp.rank(m), r);
      EXPECT_GE(m.degree(), prev_degree);
      prev_degree = m.degree();
      EXPECT_GE(r, sp.degree_begin(m.degree()));
      EXPECT_LT(r, sp.degree_end(m.degree()));
    }
  }
}

TEST(IndexSpace, SizeIsBinomial) {
  EXPECT_EQ(IndexSpace(1, 10).size(), 11u);
  EXPECT_EQ(IndexSpace(2, 40).size(), 861u);    // C(42, 2)
  EXPECT_EQ(IndexSpace(3, 5).size(), 56u);      // C(8, 3)
  EXPECT_EQ(IndexSpace(4, 40).size(), 135751u); // C(44, 4)
}

TEST(TruncatedSeries, ZeroBeyondOrderAndEvaluate) {
  Series s(2, 3);
  s.set({1, 0}, 0.5);
  s.set({0, 2}, 0.25);
  EXPECT_EQ(s[MultiIndex({3, 1})], 0.0);
  EXPECT_THROW(s.set({3, 1}, 1.0), Error);
  const std::vector<double> v{0.5, 2.0};
  EXPECT_DOUBLE_EQ(s.evaluate(v), 0.25 + 1.0);
  EXPECT_DOUBLE_EQ(s.sum(), 0.75);
  EXPECT_DOUBLE_EQ(s.partial_sum(1), 0.5);
}

TEST(ConvolutionPower, ZeroIsUnit) {
  Series f(2, 4);
  f.set({0, 0}, 0.3);
  f.set({1, 2}, 0.7);
  const Series u = convolution_power(f, 0);
  EXPECT_EQ(u[MultiIndex({0, 0})], 1.0);
  EXPECT_EQ(u.sum(), 1.0);
}

TEST(ConvolutionPower, SingleTermSquare) {
  Series f(2, 4);
  const double a = 0.37;
  f.set({1, 0}, a);
  const Series sq = convolution_power(f, 2);
  EXPECT_DOUBLE_EQ(sq[MultiIndex({2, 0})], a * a);
  for (std::size_t r = 0; r < sq.space().size(); ++r) {
    if (sq.space().index(r) == MultiIndex{2, 0}) continue;
    if (sq.space().index(r).degree() <= 2) {
      EXPECT_EQ(sq.at_rank(r), 0.0);
    }
  }
}

TEST(ConvolutionPower, DeathSeriesSquare) {
  // rho_0 = 0, rho_1 = 1/3 for mu = 1, lambda = 2.
  Series f(1, 4);
  f.set({1}, 1.0 / 3.0);
  f.set({2}, 2.0 / 27.0);
  EXPECT_NEAR(convolution_power(f, 2)[MultiIndex({2})], 1.0 / 9.0, 1e-16);
}

TEST(ConvolutionPower, MatchesBruteForceUnivariate) {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const int order = 7;
  std::vector<double> f(order + 1);
  Series s(1, order);
  for (int k = 0; k <= order; ++k) {
    f[k] = unif(gen);
    s.at_rank(k) = f[k];
  }
  for (int j = 0; j <= 5; ++j) {
    const Series p = convolution_power(s, j);
    for (int l = 0; l <= order; ++l) {
      EXPECT_NEAR(p.at_rank(l), oracle::brute_convolution(f, j, l), 1e-12) << j << ' ' << l;
    }
  }
}

TEST(ConvolutionPower, MatchesBruteForceBivariateAndRepeatedProducts) {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const int order = 5;
  Series s(2, order);
  std::vector<std::vector<double>> f(order + 1, std::vector<double>(order + 1, 0.0));
  for (int a = 0; a <= order; ++a) {
    for (int b = 0; a + b <= order; ++b) {
      f[a][b] = unif(gen);
      s.set({static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b)}, f[a][b]);
    }
  }
  for (unsigned j = 1; j <= 4; ++j) {
    const Series p = convolution_power(s, j);
    Series repeated = s;
    for (unsigned t = 1; t < j; ++t) repeated = repeated * s;
    for (int a = 0; a <= order; ++a) {
      for (int b = 0; a + b <= order; ++b) {
        const MultiIndex m{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b)};
        const double brute = oracle::brute_convolution2(f, static_cast<int>(j), a, b);
        EXPECT_NEAR(p[m], brute, 1e-10 * std::max(1.0, brute));
        EXPECT_NEAR(repeated[m], brute, 1e-10 * std::max(1.0, brute));
      }
    }
  }
}

}  // namespace
}  // namespace crossing
