#pragma once

// Closed-form and quadrature-based stationary states of the single-species
// equation with P = 1, plus the mean-opinion and moment dynamics.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "opinionflow/density.hpp"

namespace opinionflow {

struct StationaryParams {
  double alpha = 1.0;
  /// lambda^2, so the flux coefficient is lambda_sq / 2.
  double lambda_sq = 0.06;
  double sigma = 0.6;
  double m1_inf = 0.0;
  /// Porous exponent; empty for linear diffusion.
  std::optional<double> gamma;
};

/// Antiderivative of (m1_inf - sigma s) / (1 - s^2)^alpha from 0 to w.
/// Closed forms for alpha = 1 and 2, adaptive quadrature otherwise. Returns
/// -inf for |w| >= 1.
double frak_D(double w, const StationaryParams& p);

struct Support {
  double lo = -1.0;
  double hi = 1.0;
};

class StationaryProfile {
public:
  enum class Kind { LinearAlpha1, LinearAlpha2, LinearGeneric, Porous };
  enum class Status { Ok, NonIntegrable };

  StationaryProfile() = default;
  StationaryProfile(Kind kind, Status status, StationaryParams params, double normalization, Support support)
      : kind_(kind), status_(status), params_(params), normalization_(normalization), support_(support) {}

  Kind kind() const { return kind_; }
  Status status() const { return status_; }
  bool ok() const { return status_ == Status::Ok; }
  const StationaryParams& params() const { return params_; }
  /// C_infinity for the linear kinds, C for the porous one.
  double normalization() const { return normalization_; }
  Support support() const { return support_; }

  /// u_infinity(w); zero outside the support and at |w| >= 1.
  double operator()(double w) const;
  /// Mass over the support by adaptive quadrature.
  double mass() const;
  /// Exact cell masses on `cells` equal cells of the support, stored as a
  /// piecewise-constant density rescaled to mass sigma.
  PiecewiseConstantDensity discretize(std::size_t cells) const;

private:
  Kind kind_ = Kind::LinearAlpha1;
  Status status_ = Status::NonIntegrable;
  StationaryParams params_;
  double normalization_ = 0.0;
  Support support_;
};

/// u = C exp((2 / lambda^2) frak_D). A non-integrable exponential factor is
/// reported through Status::NonIntegrable. Throws DomainError when alpha = 1
/// and sigma -/+ m1_inf is not positive.
StationaryProfile stationary_linear(const StationaryParams& p);

/// u = [(2 (gamma - 1) / lambda^2) (C + frak_D)_+]^{1 / (gamma - 1)} with C
/// fixed by bisection. Throws DomainError for gamma <= 1 or an unbracketable C.
StationaryProfile stationary_porous(const StationaryParams& p);

/// Decay rate of m1 for P = 1, alpha = 1, linear diffusion with flux
/// coefficient lambda_sq / 2: dm1/dt = -lambda_sq m1.
double m1_rate_linear_alpha1(double lambda_sq);

/// Right-hand side of the truncated moment hierarchy for alpha = 2, P = 1:
///   dm_k/dt = (l/2) k (k-1) m_{k-2} + k m_1 m_{k-1} - k [l (k+1) + sigma] m_k
///             + (l/2) k (k+3) m_{k+2},   l = lambda^2, m_0 = sigma,
/// with m_{K+1} = m_{K+2} = 0. `m` holds m_1 .. m_K. Throws DomainError for K < 3.
std::vector<double> moment_rhs_alpha2(std::span<const double> m, double sigma, double lambda_sq);

}  // namespace opinionflow
