#pragma once

// Explicit time integration of the particle system with ordering protection,
// snapshot recording and the discrete min-max monitor.

#include <cstddef>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "opinionflow/model.hpp"
#include "opinionflow/particles.hpp"

namespace opinionflow {

enum class Scheme { ExplicitEuler, RK4 };

struct FixedStep {
  double dt = 1e-3;
  bool operator==(const FixedStep&) const = default;
};

/// dt = c_cfl * min_u (h_min,u^2 / kappa_u), kappa_u = (lambda_u^2/2) Lip[phi_u],
/// additionally capped by c_cfl / (total compromise rate).
struct AdaptiveSpacing {
  double c_cfl = 0.2;
  bool operator==(const AdaptiveSpacing&) const = default;
};

using DtPolicy = std::variant<FixedStep, AdaptiveSpacing>;

struct IntegratorConfig {
  Scheme scheme = Scheme::RK4;
  DtPolicy dt_policy = AdaptiveSpacing{};
  double t_final = 1.0;
  /// Record a snapshot every k accepted steps (0 disables stride snapshots).
  std::size_t snapshot_stride = 0;
  /// Record snapshots at every multiple of this time (0 disables). Steps are
  /// shortened to land on these times exactly.
  double snapshot_interval = 0.0;

  bool operator==(const IntegratorConfig&) const = default;
};

/// Step size the policy prescribes for `state` (before clipping to t_final).
double policy_dt(const ParticleState& state, const ModelSpec& spec, const DtPolicy& policy);

struct StepResult {
  ParticleState state;
  double dt_taken = 0.0;
  std::size_t halvings = 0;
};

inline constexpr std::size_t kMaxHalvings = 40;

/// Advances by dt, or by dt / 2^k when the full step breaks the ordering
/// invariant (k <= kMaxHalvings). Throws IntegrationError on non-finite
/// velocities or when ordering cannot be restored.
StepResult step(const ParticleState& state, const ModelSpec& spec, double dt, Scheme scheme);

/// Records spacing / local-density violations of the discrete min-max bounds
///   sigma^N e^{-cT} / M <= W_{i+1} - W_i <= sigma^N e^{cT} / m,
///   e^{-cT} m <= u_i <= e^{cT} M.
class MinMaxMonitor {
public:
  enum class Bound { SpacingLower, SpacingUpper, DensityLower, DensityUpper };

  struct Entry {
    double t;
    std::size_t species;
    std::size_t cell;
    Bound bound;
    double value;
    double limit;
  };

  struct SpeciesBounds {
    double c = 0.0;      // rate constant, > Theta_u
    double m = 0.0;      // inf of the initial density
    double M = 0.0;      // sup of the initial density
    bool active = true;  // false when Theta_u is not finite
  };

  MinMaxMonitor() = default;
  MinMaxMonitor(std::vector<SpeciesBounds> bounds, double horizon);

  /// c_u = Theta_u + margin, m_u and M_u from each initial density.
  static MinMaxMonitor for_model(const ModelSpec& spec, double horizon, double margin = 0.01);

  void check(const ParticleState& state);

  const std::vector<SpeciesBounds>& bounds() const { return bounds_; }
  double horizon() const { return horizon_; }
  std::size_t violation_count() const { return count_; }
  /// First kMaxLogged violations.
  const std::vector<Entry>& log() const { return log_; }

  static constexpr std::size_t kMaxLogged = 1000;

private:
  void record(const Entry& e);

  std::vector<SpeciesBounds> bounds_;
  double horizon_ = 0.0;
  std::size_t count_ = 0;
  std::vector<Entry> log_;
};

struct RunOptions {
  /// Keep the accepted step sizes in Trajectory::step_sizes.
  bool record_step_sizes = false;
  /// Take these step sizes instead of the dt policy (still clipped to the
  /// snapshot grid and t_final). Used to reproduce a step sequence.
  std::optional<std::span<const double>> replay;
};

struct Trajectory {
  std::vector<ParticleState> snapshots;
  std::vector<double> step_sizes;
  std::size_t steps = 0;
  std::size_t halvings = 0;
};

/// Integrates from `initial` to cfg.t_final. Snapshots at t = initial.t,
/// per the stride / interval settings, and at t_final.
Trajectory run(const ModelSpec& spec, ParticleState initial, const IntegratorConfig& cfg,
               MinMaxMonitor* monitor = nullptr, const RunOptions& options = {});

/// Atomizes every species with N particles, then integrates.
Trajectory run(const ModelSpec& spec, std::size_t N, const IntegratorConfig& cfg, MinMaxMonitor* monitor = nullptr,
               const RunOptions& options = {});

}  // namespace opinionflow
