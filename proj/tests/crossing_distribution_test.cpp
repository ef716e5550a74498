#include <gtest/gtest.h>

#include <algorithm>
#include <map>

#include "crossing/crossing_distribution.hpp"

namespace crossing {
namespace {

BranchingLaw birth_death(double mu, double lambda) {
  return BranchingLaw(std::map<unsigned, double>{{0, mu}, {1, -(mu + lambda)}, {2, lambda}});
}

const BranchingLaw kPureDeath(std::map<unsigned, double>{{0, 1}, {1, -1}});

TEST(ConditionalDistribution, SupercriticalDeathCount) {
  const auto d = conditional_distribution(birth_death(1, 2), CrossingSet{0}, 1, 100);
  EXPECT_NEAR(d.rho, 0.5, 1e-12);
  EXPECT_NEAR(d.probability(MultiIndex({1})), 2.0 / 3.0, 1e-12);
  EXPECT_TRUE(d.conditional);
  EXPECT_LE(d.captured_mass, 1.0 + 1e-10);
}

TEST(ConditionalDistribution, PureDeathPointMass) {
  const auto d = conditional_distribution(kPureDeath, CrossingSet{0}, 3, 10);
  for (std::uint32_t n = 0; n <= 10; ++n) {
    EXPECT_EQ(d.probability(MultiIndex({n})), n == 3 ? 1.0 : 0.0);
  }
}

TEST(ConditionalDistribution, JointBirthDeath) {
  const auto d = conditional_distribution(birth_death(1, 1), CrossingSet{0, 2}, 1, 20);
  EXPECT_EQ(d.rho, 1.0);
  EXPECT_NEAR(d.probability(MultiIndex({1, 0})), 0.5, 1e-15);
  EXPECT_NEAR(d.probability(MultiIndex({2, 1})), 0.125, 1e-15);
}

TEST(ConditionalDistribution, CapturedMassIsNondecreasingInOrder) {
  double prev = 0.0;
  for (std::size_t k : {5u, 10u, 20u, 40u, 80u}) {
    const double m = conditional_distribution(birth_death(1, 1), CrossingSet{0, 2}, 1, k).captured_mass;
    EXPECT_GE(m, prev);
    EXPECT_LE(m, 1.0 + 1e-10);
    prev = m;
  }
}

TEST(ConditionalDistribution, SubcriticalNormalization) {
  const auto d = conditional_distribution(birth_death(2, 1), CrossingSet{0}, 1, 200);
  EXPECT_EQ(d.rho, 1.0);
  EXPECT_LE(1.0 - d.captured_mass, 1e-8);
}

TEST(ConditionalDistribution, InitialStateTwoIsSelfConvolution) {
  const auto law = BranchingLaw(std::map<unsigned, double>{{0, 1}, {1, -2.6}, {2, 0.9}, {3, 0.7}});
  const CrossingSet set{0, 3};
  const auto one = conditional_distribution(law, set, 1, 25);
  const auto two = conditional_distribution(law, set, 2, 25);
  const Series conv = one.probs * one.probs;
  for (std::size_t r = 0; r < conv.space().size(); ++r) {
    EXPECT_NEAR(two.probs.at_rank(r), conv.at_rank(r), 1e-12);
  }
}

TEST(ConditionalDistribution, WeightsDoNotMatter) {
  const std::map<unsigned, double> b{{0, 1}, {1, -3.5}, {2, 1.5}, {4, 1}};
  const CrossingSet set{0, 2, 4};
  const auto unit = conditional_distribution(BranchingLaw(b), set, 1, 20);
  const auto linear = conditional_distribution(BranchingLaw(b, Weights::linear()), set, 1, 20);
  const auto table = conditional_distribution(BranchingLaw(b, Weights::table({0.1, 9.0, 3.0})), set, 1, 20);
  EXPECT_TRUE(std::ranges::equal(unit.probs.data(), linear.probs.data()));
  EXPECT_TRUE(std::ranges::equal(unit.probs.data(), table.probs.data()));
}

TEST(ConditionalDistribution, NoMassWithoutADeath) {
  for (unsigned i : {1u, 2u, 4u}) {
    const auto d = conditional_distribution(birth_death(1, 2), CrossingSet{0, 2}, i, 15);
    for (std::uint32_t m = 0; m <= 15; ++m) EXPECT_EQ(d.probability(MultiIndex({0, m})), 0.0);
  }
}

TEST(ConditionalDistribution, RejectsBadInput) {
  EXPECT_THROW(conditional_distribution(birth_death(1, 1), CrossingSet{0}, 0, 10), Error);
  EXPECT_THROW(conditional_distribution(birth_death(1, 1), CrossingSet{1}, 1, 10), Error);
}

TEST(Marginal, JointBirthDeathComponents) {
  const auto d = conditional_distribution(birth_death(1, 1), CrossingSet{0, 2}, 1, 30);
  const Marginal y0 = marginal(d, 0);
  const Marginal y2 = marginal(d, 2);
  EXPECT_NEAR(y0.probs[2], 0.125, 1e-15);
  EXPECT_NEAR(y2.probs[0], 0.5, 1e-15);
  EXPECT_NEAR(y0.mass(), d.captured_mass, 1e-13);
  EXPECT_NEAR(y2.mass(), d.captured_mass, 1e-13);
  EXPECT_THROW(marginal(d, 3), Error);
}

TEST(Marginal, UnivariateIsIdentity) {
  const auto d = conditional_distribution(birth_death(2, 1), CrossingSet{0}, 1, 30);
  const Marginal m = marginal(d, 0);
  for (std::size_t n = 0; n <= 30; ++n) EXPECT_EQ(m.probs[n], d.probs.at_rank(n));
}

TEST(Moments, SubcriticalBirthDeath) {
  const MomentReport r = moments(birth_death(2, 1), CrossingSet{0}, 0, 200);
  EXPECT_TRUE(r.rho_is_one);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.mean, 2.0, 1e-6);
  EXPECT_NEAR(r.variance, 6.0, 1e-4);
}

TEST(Moments, PureDeath) {
  const MomentReport r = moments(kPureDeath, CrossingSet{0}, 0, 20);
  EXPECT_DOUBLE_EQ(r.mean, 1.0);
  EXPECT_DOUBLE_EQ(r.variance, 0.0);
  EXPECT_TRUE(r.converged);
}

TEST(Moments, CriticalDiverges) {
  const MomentReport lo = moments(birth_death(1, 1), CrossingSet{0}, 0, 100);
  const MomentReport hi = moments(birth_death(1, 1), CrossingSet{0}, 0, 400);
  EXPECT_FALSE(lo.converged);
  EXPECT_FALSE(hi.converged);
  EXPECT_GT(hi.mean, lo.mean + 0.1);
}

TEST(Moments, SupercriticalIsConditional) {
  // Conditioned on extinction the mu=1, lambda=2 walk is the mu=2, lambda=1
  // walk, so the death count has mean 2 and variance 6.
  const MomentReport r = moments(birth_death(1, 2), CrossingSet{0, 2}, 0, 200);
  EXPECT_FALSE(r.rho_is_one);
  EXPECT_NEAR(r.rho, 0.5, 1e-12);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.mean, 2.0, 1e-6);
  EXPECT_NEAR(r.variance, 6.0, 1e-4);
  EXPECT_THROW(moments(birth_death(1, 2), CrossingSet{0}, 2, 50), Error);
}

}  // namespace
}  // namespace crossing
