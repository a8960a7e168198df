#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "opinionflow/error.hpp"
#include "opinionflow/particles.hpp"
#include "opinionflow/scenario.hpp"
#include "oracles.hpp"

using namespace opinionflow;

namespace {

ParticleState random_state(const ModelSpec& spec, std::size_t N, std::mt19937_64& rng) {
  ParticleState st;
  for (const auto& s : spec.species) {
    SpeciesState ss;
    ss.W = oracle::random_positions(rng, N, s.pinned());
    ss.sigma = s.sigma;
    ss.sigma_n = s.sigma / static_cast<double>(N);
    ss.pinned = s.pinned();
    st.species.push_back(std::move(ss));
  }
  return st;
}

}  // namespace

TEST(Atomize, EqualMassCells) {
  const auto d = InitialDensity::gaussian_mixture({{0.4, -0.75, 0.05}, {0.2, 0.5, 0.05}});
  const auto W = atomize(d, 50, 0.6);
  ASSERT_EQ(W.size(), 51u);
  EXPECT_EQ(W.front(), -1.0);
  EXPECT_EQ(W.back(), 1.0);
  for (std::size_t i = 1; i < 50; ++i) {
    EXPECT_GT(W[i], W[i - 1]);
    EXPECT_NEAR(d.cdf(W[i]), 0.6 * static_cast<double>(i) / 50.0, 1e-13);
  }
}

TEST(Atomize, RejectsMassMismatchAndVanishingDensity) {
  EXPECT_THROW(atomize(InitialDensity::uniform(0.6), 10, 0.5), AtomizationError);
  EXPECT_THROW(atomize(InitialDensity::tabulated({0.6, 0.0, 0.0, 0.6}), 10, 0.6), AtomizationError);
}

TEST(LocalDensities, InverseGaps) {
  const std::vector<double> W{-1.0, -0.5, 0.5, 1.0};
  const auto u = local_densities(W, 0.2);
  ASSERT_EQ(u.size(), 3u);
  EXPECT_DOUBLE_EQ(u[0], 0.4);
  EXPECT_DOUBLE_EQ(u[1], 0.2);
  EXPECT_DOUBLE_EQ(u[2], 0.4);
  EXPECT_THROW(local_densities(std::vector<double>{0.0, 0.0, 1.0}, 0.1), SpacingUnderflow);
}

TEST(Rhs, MatchesNaiveLoopOnEveryPreset) {
  std::mt19937_64 rng(7);
  for (const auto& name : preset_names()) {
    const auto spec = preset(name).model;
    for (int rep = 0; rep < 10; ++rep) {
      const auto st = random_state(spec, 6, rng);
      const auto fast = opinionflow::rhs(st, spec);
      const auto ref = oracle::naive_rhs(st, spec);
      for (std::size_t u = 0; u < ref.size(); ++u) {
        for (std::size_t i = 0; i < ref[u].size(); ++i) {
          EXPECT_NEAR(fast[u][i], ref[u][i], 1e-12 * std::max(1.0, std::abs(ref[u][i]))) << name;
        }
      }
    }
  }
}

TEST(Rhs, FastCompromiseMatchesDirectSummationAtLargeN) {
  std::mt19937_64 rng(11);
  const CompromiseKernel ks[] = {CompromiseKernel::constant(), CompromiseKernel::one_minus_abs_w(),
                                 CompromiseKernel::one_minus_abs_diff(), CompromiseKernel::one_minus_w_sq(),
                                 CompromiseKernel::scaled_one_minus_w_sq(0.2), CompromiseKernel::quad_dist()};
  for (const auto& k : ks) {
    ModelSpec spec;
    for (const char* tag : {"a", "b"}) {
      SpeciesSpec s;
      s.tag = tag;
      s.sigma = 0.5;
      s.initial = InitialDensity::uniform(0.5);
      spec.species.push_back(s);
    }
    spec.set_kernel("a", "b", k);
    spec.set_kernel("a", "a", k);
    const auto st = random_state(spec, 300, rng);
    std::vector<double> fast(st.species[0].W.size(), 0.0);
    accumulate_compromise(st.species[0].W, st.species[0].W, st.species[0].sigma_n, k, fast);
    accumulate_compromise(st.species[0].W, st.species[1].W, st.species[1].sigma_n, k, fast);
    for (std::size_t i = 0; i < fast.size(); ++i) {
      EXPECT_NEAR(fast[i], compromise_velocity(i, st, spec, 0), 1e-11) << kernel_name(k.kind);
    }
  }
}

TEST(Rhs, PinnedEndsDoNotMoveAndTrollEndsDo) {
  const auto spec = preset("flt-symmetric").model;
  const auto st = initial_state(spec, 20);
  const auto v = opinionflow::rhs(st, spec);
  for (std::size_t u = 0; u < 3; ++u) {
    EXPECT_EQ(v[u].front(), 0.0);
    EXPECT_EQ(v[u].back(), 0.0);
  }
  EXPECT_NE(v[3].front(), 0.0);
  EXPECT_NE(v[3].back(), 0.0);
}

TEST(Rhs, UniformStateIsDiffusivelyBalanced) {
  // Equal gaps and alpha = 0 make every osmotic term vanish.
  SpeciesSpec s;
  s.tag = "u";
  s.sigma = 1.0;
  s.half_lambda_sq = 0.5;
  s.mobility.alpha = 0.0;
  s.initial = InitialDensity::uniform(1.0);
  ModelSpec spec;
  spec.species.push_back(s);
  const auto st = initial_state(spec, 16);
  const auto v = opinionflow::rhs(st, spec);
  for (double x : v[0]) EXPECT_NEAR(x, 0.0, 1e-11);
}

TEST(InitialState, OrderedWithCellMass) {
  const auto spec = preset("fl-asymmetric").model;
  const auto st = initial_state(spec, 40);
  EXPECT_TRUE(is_ordered(st));
  EXPECT_DOUBLE_EQ(st.species[2].sigma_n, 0.2 / 40.0);
}

TEST(Atomize, TrollsAvoidTheEndpoints) {
  const auto d = InitialDensity::gaussian_mixture({{0.3, 0.0, 0.3}});
  const auto W = atomize_unpinned(d, 20, 0.3);
  ASSERT_EQ(W.size(), 21u);
  EXPECT_GT(W.front(), -1.0);
  EXPECT_LT(W.back(), 1.0);
  for (std::size_t i = 0; i < W.size(); ++i) {
    EXPECT_NEAR(d.cdf(W[i]), 0.3 * (static_cast<double>(i) + 0.5) / 21.0, 1e-13);
  }
  const auto st = initial_state(preset("flt-symmetric").model, 20);
  EXPECT_EQ(st.species[3].W, W);
  EXPECT_FALSE(st.species[3].pinned);
}
