#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "opinionflow/error.hpp"
#include "opinionflow/model.hpp"
#include "opinionflow/scenario.hpp"
#include "oracles.hpp"

using namespace opinionflow;

TEST(Mobility, PowerOfOneMinusWSquared) {
  EXPECT_DOUBLE_EQ(eval_mobility_sq(0.5, Mobility{1.0}), 0.75);
  EXPECT_DOUBLE_EQ(eval_mobility_sq(0.5, Mobility{2.0}), 0.5625);
  EXPECT_DOUBLE_EQ(eval_mobility_sq(1.0, Mobility{1.0}), 0.0);
  EXPECT_THROW(eval_mobility_sq(1.0001, Mobility{1.0}), DomainError);
}

TEST(Phi, LinearAndPowerLaw) {
  EXPECT_DOUBLE_EQ(eval_phi(3.0, DiffusionNonlinearity::linear()), 3.0);
  EXPECT_DOUBLE_EQ(eval_phi(3.0, DiffusionNonlinearity::power_law(2.0)), 4.5);
  EXPECT_THROW(eval_phi(-1.0, DiffusionNonlinearity::linear()), DomainError);
  EXPECT_DOUBLE_EQ(phi_lipschitz(DiffusionNonlinearity::linear(), 10.0), 1.0);
  EXPECT_DOUBLE_EQ(phi_lipschitz(DiffusionNonlinearity::power_law(2.0), 10.0), 10.0);
}

TEST(Kernel, MatchesFormulasOnGrid) {
  const CompromiseKernel ks[] = {CompromiseKernel::zero(),          CompromiseKernel::constant(),
                                 CompromiseKernel::one_minus_abs_w(), CompromiseKernel::one_minus_abs_diff(),
                                 CompromiseKernel::one_minus_w_sq(),  CompromiseKernel::scaled_one_minus_w_sq(0.3),
                                 CompromiseKernel::quad_dist()};
  for (const auto& k : ks) {
    for (double w = -1.0; w <= 1.0; w += 0.125) {
      for (double v = -1.0; v <= 1.0; v += 0.125) {
        EXPECT_NEAR(eval_kernel(k, w, v), oracle::kernel(k, w, v), 1e-15);
      }
    }
  }
  EXPECT_THROW(eval_kernel(CompromiseKernel::constant(), 1.5, 0.0), DomainError);
}

TEST(Kernel, NamesRoundTrip) {
  for (auto kind : {KernelKind::Zero, KernelKind::Constant, KernelKind::OneMinusAbsW, KernelKind::OneMinusAbsDiff,
                    KernelKind::OneMinusWSq, KernelKind::ScaledOneMinusWSq, KernelKind::QuadDist}) {
    EXPECT_EQ(kernel_kind_from_name(kernel_name(kind)), kind);
  }
  EXPECT_FALSE(kernel_kind_from_name("gaussian").has_value());
}

// Lipschitz constants checked numerically on a fine grid.
TEST(Kernel, ConstantsBoundFiniteDifferences) {
  const CompromiseKernel ks[] = {CompromiseKernel::constant(), CompromiseKernel::one_minus_w_sq(),
                                 CompromiseKernel::scaled_one_minus_w_sq(0.5), CompromiseKernel::quad_dist()};
  const double h = 1e-3;
  for (const auto& k : ks) {
    const auto c = kernel_constants(k);
    double sup = 0.0;
    double lip = 0.0;
    for (double w = -1.0; w + h <= 1.0; w += 0.01) {
      for (double v = -1.0; v <= 1.0; v += 0.01) {
        sup = std::max(sup, std::abs(oracle::kernel(k, w, v)));
        const double d = std::abs(oracle::kernel(k, w + h, v) - oracle::kernel(k, w, v)) +
                         std::abs(oracle::kernel(k, v, w + h) - oracle::kernel(k, v, w));
        lip = std::max(lip, d / h);
      }
    }
    EXPECT_LE(sup, c.sup + 1e-12);
    EXPECT_LE(lip, c.lip + 1e-9);
  }
  EXPECT_TRUE(std::isinf(kernel_constants(CompromiseKernel::one_minus_abs_w()).lip_d1));
  EXPECT_TRUE(std::isinf(kernel_constants(CompromiseKernel::one_minus_abs_diff()).lip_d1));
}

TEST(Theta, ConstantKernelIsOne) {
  const auto sc = preset("single-ini1");
  EXPECT_DOUBLE_EQ(theta_constant(sc.model, "u"), 1.0);
}

TEST(Theta, TrollFollowerRowSumsToTwelve) {
  // ff = 1, fl = fr = 2 + 1 + 2, fq = 1.
  const auto sc = preset("flt-symmetric");
  EXPECT_DOUBLE_EQ(theta_constant(sc.model, "f"), 12.0);
  EXPECT_DOUBLE_EQ(theta_constant(sc.model, "q"), 4.0);
  EXPECT_THROW(theta_constant(sc.model, "x"), std::out_of_range);
}

TEST(ModelSpec, MissingKernelIsZero) {
  ModelSpec m;
  m.set_kernel("a", "b", CompromiseKernel::constant());
  EXPECT_TRUE(m.kernel("b", "a").is_zero());
  EXPECT_EQ(m.kernel("a", "b").kind, KernelKind::Constant);
}

TEST(SpeciesSpec, TrollIsUnpinned) {
  SpeciesSpec s;
  s.tag = "q";
  EXPECT_TRUE(s.is_troll());
  EXPECT_FALSE(s.pinned());
  s.tag = "f";
  EXPECT_TRUE(s.pinned());
}
