#include <cmath>

#include <gtest/gtest.h>

#include "opinionflow/error.hpp"
#include "opinionflow/initial_density.hpp"
#include "oracles.hpp"

using namespace opinionflow;

TEST(InitialDensity, UniformMassAndCdf) {
  const auto d = InitialDensity::uniform(0.6);
  EXPECT_DOUBLE_EQ(d.mass(), 0.6);
  EXPECT_DOUBLE_EQ(d(0.3), 0.3);
  EXPECT_DOUBLE_EQ(d.cdf(0.0), 0.3);
  EXPECT_DOUBLE_EQ(d.cdf(5.0), 0.6);
  EXPECT_DOUBLE_EQ(d(1.5), 0.0);
}

TEST(InitialDensity, MixtureComponentsCarryTheirWeightOnI) {
  const auto d = InitialDensity::gaussian_mixture({{0.4, -0.75, 0.05}, {0.2, 0.5, 0.3}});
  EXPECT_NEAR(d.mass(), 0.6, 1e-14);
  const double m = oracle::simpson([&](double w) { return d(w); }, -1.0, 1.0, 1e-13);
  EXPECT_NEAR(m, 0.6, 1e-10);
  const double left = oracle::simpson([&](double w) { return d(w); }, -1.0, 0.1, 1e-13);
  EXPECT_NEAR(d.cdf(0.1), left, 1e-10);
}

TEST(InitialDensity, FloorKeepsMassAndRaisesInfimum) {
  const auto d = InitialDensity::gaussian_mixture({{0.6, 0.0, 0.05}}, 0.01);
  EXPECT_NEAR(d.mass(), 0.6, 1e-14);
  EXPECT_NEAR(d.cdf(1.0), 0.6, 1e-12);
  EXPECT_GE(d.bounds().min, 0.01);
  EXPECT_THROW(InitialDensity::gaussian_mixture({{0.6, 0.0, 0.05}}, 0.3), DomainError);
}

TEST(InitialDensity, TabulatedCells) {
  const auto d = InitialDensity::tabulated({0.1, 0.5, 0.3, 0.1});
  EXPECT_NEAR(d.mass(), 0.5, 1e-15);  // cell width 0.5
  EXPECT_DOUBLE_EQ(d(-0.25), 0.5);
  EXPECT_NEAR(d.cdf(-0.5), 0.05, 1e-15);
  const auto b = d.bounds();
  EXPECT_DOUBLE_EQ(b.min, 0.1);
  EXPECT_DOUBLE_EQ(b.max, 0.5);
  // 0.1 + 0.4 + 0.2 + 0.2 + 0.1
  EXPECT_NEAR(d.total_variation(), 1.0, 1e-14);
}

TEST(InitialDensity, BoundsOfSingleSpike) {
  const auto d = InitialDensity::gaussian_mixture({{0.6, 0.0, 0.05}});
  const auto b = d.bounds();
  EXPECT_NEAR(b.max, d(0.0), 1e-12);
  EXPECT_GT(b.min, 0.0);
  EXPECT_NEAR(b.min / d(1.0), 1.0, 1e-12);
}

TEST(InitialDensity, TotalVariationOfSpikeIsTwiceThePeak) {
  // Unimodal, extended by zero: TV = 2 max - 2 (edge values) + 2 (edge values) = 2 max.
  const auto d = InitialDensity::gaussian_mixture({{0.6, 0.0, 0.05}});
  EXPECT_NEAR(d.total_variation(), 2.0 * d(0.0), 1e-9);
}

TEST(InitialDensity, RejectsNegativeValues) {
  EXPECT_THROW(InitialDensity::tabulated({0.1, -0.1}), DomainError);
  EXPECT_THROW(InitialDensity::gaussian_mixture({{0.6, 0.0, -1.0}}), DomainError);
}
