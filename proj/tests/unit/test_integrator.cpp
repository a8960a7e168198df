#include <cmath>

#include <gtest/gtest.h>

#include "opinionflow/density.hpp"
#include "opinionflow/error.hpp"
#include "opinionflow/integrator.hpp"
#include "opinionflow/scenario.hpp"

using namespace opinionflow;

namespace {

// Single troll-free species with compromise only: W_i' = -sigma^N sum_j (W_i - W_j)
// has the explicit solution W_i(t) = mean + (W_i(0) - mean) e^{-sigma (N+1)/N t}.
ModelSpec pure_compromise() {
  SpeciesSpec s;
  s.tag = "q";  // unpinned, no diffusion
  s.sigma = 0.5;
  s.initial = InitialDensity::uniform(0.5);
  ModelSpec m;
  m.species.push_back(s);
  m.set_kernel("q", "q", CompromiseKernel::constant());
  return m;
}

double max_error_vs_exact(const ModelSpec& m, std::size_t N, double dt, Scheme scheme) {
  const auto init = initial_state(m, N);
  IntegratorConfig cfg;
  cfg.scheme = scheme;
  cfg.dt_policy = FixedStep{dt};
  cfg.t_final = 1.0;
  const auto traj = run(m, init, cfg);
  const auto& W0 = init.species[0].W;
  double mean = 0.0;
  for (double w : W0) mean += w;
  mean /= static_cast<double>(W0.size());
  const double rate = 0.5 * static_cast<double>(N + 1) / static_cast<double>(N);
  const auto& W = traj.snapshots.back().species[0].W;
  double err = 0.0;
  for (std::size_t i = 0; i < W.size(); ++i) {
    err = std::max(err, std::abs(W[i] - (mean + (W0[i] - mean) * std::exp(-rate))));
  }
  return err;
}

}  // namespace

TEST(Integrator, EulerIsFirstOrder) {
  const auto m = pure_compromise();
  const double e1 = max_error_vs_exact(m, 10, 0.02, Scheme::ExplicitEuler);
  const double e2 = max_error_vs_exact(m, 10, 0.01, Scheme::ExplicitEuler);
  EXPECT_NEAR(std::log2(e1 / e2), 1.0, 0.1);
}

TEST(Integrator, Rk4IsFourthOrder) {
  const auto m = pure_compromise();
  const double e1 = max_error_vs_exact(m, 10, 0.1, Scheme::RK4);
  const double e2 = max_error_vs_exact(m, 10, 0.05, Scheme::RK4);
  EXPECT_NEAR(std::log2(e1 / e2), 4.0, 0.2);
}

TEST(Integrator, SnapshotGridIsHitExactly) {
  auto sc = preset("single-ini1");
  sc.integrator.t_final = 0.3;
  sc.integrator.snapshot_interval = 0.1;
  const auto traj = run(sc.model, 40, sc.integrator);
  ASSERT_EQ(traj.snapshots.size(), 4u);
  EXPECT_EQ(traj.snapshots[0].t, 0.0);
  EXPECT_NEAR(traj.snapshots[1].t, 0.1, 1e-15);
  EXPECT_NEAR(traj.snapshots[2].t, 0.2, 1e-15);
  EXPECT_EQ(traj.snapshots[3].t, 0.3);
}

TEST(Integrator, StrideSnapshots) {
  auto sc = preset("single-ini1");
  sc.integrator.t_final = 0.005;
  sc.integrator.snapshot_interval = 0.0;
  sc.integrator.snapshot_stride = 1;
  sc.integrator.dt_policy = FixedStep{0.001};
  const auto traj = run(sc.model, 20, sc.integrator);
  EXPECT_EQ(traj.halvings, 0u);
  EXPECT_EQ(traj.steps, 5u);
  EXPECT_EQ(traj.snapshots.size(), 6u);
}

TEST(Integrator, ReplayReproducesStateBitwise) {
  auto sc = preset("fl-asymmetric");
  sc.integrator.t_final = 0.2;
  RunOptions rec;
  rec.record_step_sizes = true;
  const auto a = run(sc.model, 30, sc.integrator, nullptr, rec);
  RunOptions rep;
  rep.replay = std::span<const double>(a.step_sizes);
  const auto b = run(sc.model, 30, sc.integrator, nullptr, rep);
  EXPECT_EQ(a.snapshots.back(), b.snapshots.back());
}

TEST(Integrator, RunsAreDeterministic) {
  auto sc = preset("flt-asymmetric");
  sc.integrator.t_final = 0.2;
  const auto a = run(sc.model, 25, sc.integrator);
  const auto b = run(sc.model, 25, sc.integrator);
  EXPECT_EQ(a.snapshots, b.snapshots);
}

TEST(Integrator, PolicyDtScalesWithCfl) {
  const auto sc = preset("single-ini2");
  const auto st = initial_state(sc.model, 50);
  const double a = policy_dt(st, sc.model, AdaptiveSpacing{0.2});
  const double b = policy_dt(st, sc.model, AdaptiveSpacing{0.4});
  EXPECT_NEAR(b / a, 2.0, 1e-12);
  EXPECT_EQ(policy_dt(st, sc.model, FixedStep{0.003}), 0.003);
}

TEST(Integrator, OrderingIsPreserved) {
  auto sc = preset("single-ini3");
  sc.integrator.t_final = 1.0;
  const auto traj = run(sc.model, 60, sc.integrator);
  for (const auto& s : traj.snapshots) EXPECT_TRUE(is_ordered(s));
}

TEST(MinMaxMonitor, CleanOnShortPresetRun) {
  auto sc = preset("single-ini2");
  sc.integrator.t_final = 0.5;
  auto mon = MinMaxMonitor::for_model(sc.model, sc.integrator.t_final);
  run(sc.model, 50, sc.integrator, &mon);
  EXPECT_EQ(mon.violation_count(), 0u);
  EXPECT_DOUBLE_EQ(mon.bounds()[0].c, 1.01);
}

TEST(MinMaxMonitor, FlagsSpacingOutsideBounds) {
  MinMaxMonitor mon({{0.0, 1.0, 1.0, true}}, 1.0);
  ParticleState st;
  SpeciesState s;
  s.W = {-1.0, -0.9, 1.0};  // gaps 0.1 and 1.9 with sigma^N = 0.5
  s.sigma = 1.0;
  s.sigma_n = 0.5;
  st.species.push_back(s);
  mon.check(st);
  EXPECT_GE(mon.violation_count(), 2u);
  ASSERT_FALSE(mon.log().empty());
}

TEST(Integrator, MassIsExactAtEverySnapshot) {
  auto sc = preset("flt-symmetric");
  sc.integrator.t_final = 0.3;
  sc.integrator.snapshot_interval = 0.1;
  const auto traj = run(sc.model, 30, sc.integrator);
  for (const auto& snap : traj.snapshots) {
    for (std::size_t u = 0; u < snap.species.size(); ++u) {
      EXPECT_NEAR(reconstruct(snap.species[u]).integral(), sc.model.species[u].sigma, 1e-14);
    }
  }
}
