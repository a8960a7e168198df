#include "opinionflow/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "opinionflow/error.hpp"

namespace opinionflow {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_finite(const Velocities& v, double t) {
  for (std::size_t s = 0; s < v.size(); ++s) {
    for (std::size_t i = 0; i < v[s].size(); ++i) {
      if (!std::isfinite(v[s][i])) throw IntegrationError("non-finite velocity", t, s, i);
    }
  }
}

// out = base + h * k (positions only)
void combine(const ParticleState& base, double h, const Velocities& k, ParticleState& out) {
  out.t = base.t;
  out.species.resize(base.species.size());
  for (std::size_t s = 0; s < base.species.size(); ++s) {
    const auto& src = base.species[s];
    auto& dst = out.species[s];
    dst.sigma = src.sigma;
    dst.sigma_n = src.sigma_n;
    dst.pinned = src.pinned;
    dst.W.resize(src.W.size());
    for (std::size_t i = 0; i < src.W.size(); ++i) dst.W[i] = src.W[i] + h * k[s][i];
  }
}

std::pair<std::size_t, std::size_t> first_disorder(const ParticleState& state) {
  for (std::size_t s = 0; s < state.species.size(); ++s) {
    const auto& W = state.species[s].W;
    for (std::size_t i = 0; i < W.size(); ++i) {
      if (!(W[i] >= kOpinions.lo && W[i] <= kOpinions.hi)) return {s, i};
      if (i > 0 && !(W[i] > W[i - 1])) return {s, i};
    }
  }
  return {0, 0};
}

// Scratch storage reused across steps of one run.
class Stepper {
public:
  Stepper(const ModelSpec& spec, Scheme scheme) : spec_(spec), scheme_(scheme) {}

  StepResult step(const ParticleState& state, double dt) {
    rhs(state, spec_, k1_);
    check_finite(k1_, state.t);

    double h = dt;
    for (std::size_t halvings = 0; halvings <= kMaxHalvings; ++halvings, h *= 0.5) {
      StepResult result;
      if (advance(state, h, result.state) && is_ordered(result.state)) {
        result.state.t = state.t + h;
        result.dt_taken = h;
        result.halvings = halvings;
        return result;
      }
      if (halvings == kMaxHalvings) {
        const auto [s, i] = first_disorder(result.state);
        throw IntegrationError("particle ordering violated after maximum step halvings", state.t, s, i);
      }
    }
    throw IntegrationError("unreachable", state.t, 0, 0);
  }

private:
  // Returns false when an intermediate stage lost the ordering.
  bool advance(const ParticleState& state, double h, ParticleState& out) {
    if (scheme_ == Scheme::ExplicitEuler) {
      combine(state, h, k1_, out);
      return true;
    }
    try {
      combine(state, 0.5 * h, k1_, stage_);
      rhs(stage_, spec_, k2_);
      check_finite(k2_, state.t);
      combine(state, 0.5 * h, k2_, stage_);
      rhs(stage_, spec_, k3_);
      check_finite(k3_, state.t);
      combine(state, h, k3_, stage_);
      rhs(stage_, spec_, k4_);
      check_finite(k4_, state.t);
    } catch (const SpacingUnderflow&) {
      return false;
    }
    out.t = state.t;
    out.species.resize(state.species.size());
    const double w = h / 6.0;
    for (std::size_t s = 0; s < state.species.size(); ++s) {
      const auto& src = state.species[s];
      auto& dst = out.species[s];
      dst.sigma = src.sigma;
      dst.sigma_n = src.sigma_n;
      dst.pinned = src.pinned;
      dst.W.resize(src.W.size());
      for (std::size_t i = 0; i < src.W.size(); ++i) {
        dst.W[i] = src.W[i] + w * (k1_[s][i] + 2.0 * k2_[s][i] + 2.0 * k3_[s][i] + k4_[s][i]);
      }
    }
    return true;
  }

  const ModelSpec& spec_;
  Scheme scheme_;
  Velocities k1_, k2_, k3_, k4_;
  ParticleState stage_;
};

}  // namespace

double policy_dt(const ParticleState& state, const ModelSpec& spec, const DtPolicy& policy) {
  if (const auto* fixed = std::get_if<FixedStep>(&policy)) return fixed->dt;
  const double c = std::get<AdaptiveSpacing>(policy).c_cfl;

  double dt = kInf;
  double max_rate = 0.0;
  for (std::size_t u = 0; u < spec.species.size(); ++u) {
    const auto& sp = spec.species[u];
    const auto& st = state.species[u];
    if (!sp.is_troll() && sp.half_lambda_sq > 0.0 && st.W.size() > 1) {
      double h_min = kInf;
      for (std::size_t i = 0; i + 1 < st.W.size(); ++i) h_min = std::min(h_min, st.W[i + 1] - st.W[i]);
      const double kappa = sp.half_lambda_sq * phi_lipschitz(sp.nonlinearity, st.sigma_n / h_min);
      if (kappa > 0.0) dt = std::min(dt, c * h_min * h_min / kappa);
    }
    double rate = 0.0;
    for (std::size_t h = 0; h < spec.species.size(); ++h) {
      const auto& k = spec.kernel(sp.tag, spec.species[h].tag);
      rate += kernel_constants(k).sup * state.species[h].sigma_n * static_cast<double>(state.species[h].W.size());
    }
    max_rate = std::max(max_rate, rate);
  }
  if (max_rate > 0.0) dt = std::min(dt, c / max_rate);
  return dt;
}

StepResult step(const ParticleState& state, const ModelSpec& spec, double dt, Scheme scheme) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw IntegrationError("step size must be positive and finite", state.t, 0, 0);
  Stepper stepper(spec, scheme);
  return stepper.step(state, dt);
}

MinMaxMonitor::MinMaxMonitor(std::vector<SpeciesBounds> bounds, double horizon)
    : bounds_(std::move(bounds)), horizon_(horizon) {}

MinMaxMonitor MinMaxMonitor::for_model(const ModelSpec& spec, double horizon, double margin) {
  std::vector<SpeciesBounds> b;
  b.reserve(spec.species.size());
  for (const auto& s : spec.species) {
    const double theta = theta_constant(spec, s.tag);
    const auto db = s.initial.bounds();
    b.push_back({theta + margin, db.min, db.max, std::isfinite(theta)});
  }
  return MinMaxMonitor(std::move(b), horizon);
}

void MinMaxMonitor::record(const Entry& e) {
  if (log_.size() < kMaxLogged) log_.push_back(e);
  ++count_;
}

void MinMaxMonitor::check(const ParticleState& state) {
  for (std::size_t s = 0; s < state.species.size() && s < bounds_.size(); ++s) {
    const auto& b = bounds_[s];
    if (!b.active) continue;
    const auto& st = state.species[s];
    const double growth = std::exp(b.c * horizon_);
    const double gap_lo = st.sigma_n / (b.M * growth);
    const double gap_hi = b.m > 0.0 ? st.sigma_n * growth / b.m : kInf;
    const double u_lo = b.m / growth;
    const double u_hi = b.M * growth;
    for (std::size_t i = 0; i + 1 < st.W.size(); ++i) {
      const double gap = st.W[i + 1] - st.W[i];
      const double u = st.sigma_n / gap;
      if (gap < gap_lo) record({state.t, s, i, Bound::SpacingLower, gap, gap_lo});
      if (gap > gap_hi) record({state.t, s, i, Bound::SpacingUpper, gap, gap_hi});
      if (u < u_lo) record({state.t, s, i, Bound::DensityLower, u, u_lo});
      if (u > u_hi) record({state.t, s, i, Bound::DensityUpper, u, u_hi});
    }
  }
}

Trajectory run(const ModelSpec& spec, ParticleState initial, const IntegratorConfig& cfg, MinMaxMonitor* monitor,
               const RunOptions& options) {
  if (initial.species.size() != spec.species.size()) {
    throw IntegrationError("state and model disagree on the number of species", initial.t, 0, 0);
  }
  if (!is_ordered(initial)) {
    const auto [s, i] = first_disorder(initial);
    throw IntegrationError("initial state is not ordered", initial.t, s, i);
  }

  Trajectory traj;
  Stepper stepper(spec, cfg.scheme);
  ParticleState state = std::move(initial);
  const double t0 = state.t;
  const double t_final = cfg.t_final;
  const double interval = cfg.snapshot_interval;
  // Snapshot grid points that coincide with t_final are taken as the final snapshot.
  const double grid_eps = 1e-12 * std::max(1.0, std::abs(t_final));

  if (monitor) monitor->check(state);
  traj.snapshots.push_back(state);
  bool last_is_snapshot = true;

  std::size_t snap_index = 1;
  auto next_snap = [&] { return t0 + interval * static_cast<double>(snap_index); };

  std::size_t replay_pos = 0;
  while (state.t < t_final) {
    double dt;
    if (options.replay) {
      if (replay_pos >= options.replay->size()) {
        throw IntegrationError("replayed step sequence exhausted", state.t, 0, 0);
      }
      dt = (*options.replay)[replay_pos++];
    } else {
      dt = policy_dt(state, spec, cfg.dt_policy);
    }

    bool land_final = false;
    bool land_snap = false;
    const double remaining = t_final - state.t;
    if (dt >= remaining) {
      dt = remaining;
      land_final = true;
    }
    double snap_time = 0.0;
    if (interval > 0.0) {
      snap_time = next_snap();
      if (snap_time < t_final - grid_eps && dt >= snap_time - state.t) {
        dt = snap_time - state.t;
        land_snap = true;
        land_final = false;
      }
    }

    const double t_before = state.t;
    auto res = stepper.step(state, dt);
    state = std::move(res.state);
    if (res.halvings == 0 && land_final) state.t = t_final;
    if (res.halvings == 0 && land_snap) state.t = snap_time;
    if (res.halvings > 0) {
      land_final = false;
      land_snap = false;
      state.t = t_before + res.dt_taken;
    }

    ++traj.steps;
    traj.halvings += res.halvings;
    if (options.record_step_sizes) traj.step_sizes.push_back(res.dt_taken);
    if (monitor) monitor->check(state);

    last_is_snapshot = false;
    if (land_snap) {
      ++snap_index;
      traj.snapshots.push_back(state);
      last_is_snapshot = true;
    } else if (cfg.snapshot_stride > 0 && traj.steps % cfg.snapshot_stride == 0 && state.t < t_final) {
      traj.snapshots.push_back(state);
      last_is_snapshot = true;
    }
  }
  if (!last_is_snapshot) traj.snapshots.push_back(state);
  return traj;
}

Trajectory run(const ModelSpec& spec, std::size_t N, const IntegratorConfig& cfg, MinMaxMonitor* monitor,
               const RunOptions& options) {
  return run(spec, initial_state(spec, N), cfg, monitor, options);
}

}  // namespace opinionflow
