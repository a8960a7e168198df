#pragma once

// Piecewise-constant densities reconstructed from particles, and the
// diagnostics computed on them.

#include <cstddef>
#include <vector>

#include "opinionflow/particles.hpp"

namespace opinionflow {

/// values[i] on [breakpoints[i], breakpoints[i+1]).
struct PiecewiseConstantDensity {
  std::vector<double> breakpoints;
  std::vector<double> values;
  double mass = 0.0;

  std::size_t cells() const { return values.size(); }
  /// Sum of values[i] * width_i, recomputed.
  double integral() const;
  /// Mass of (-inf, w].
  double cdf(double w) const;
};

/// Builds a density from explicit breakpoints and values; mass = integral().
PiecewiseConstantDensity make_density(std::vector<double> breakpoints, std::vector<double> values);

/// u^N of one species. The cached mass is sigma (exactly N * sigma/N).
PiecewiseConstantDensity reconstruct(const SpeciesState& state);

/// Generalized inverse X(z) = inf{x : rho((-inf, x]) > z} on [0, mass],
/// stored as linear pieces. Zero cells are skipped, so X jumps across them.
class PseudoInverse {
public:
  struct Piece {
    double z0;     // mass level where the piece starts
    double z1;     // mass level where it ends
    double x0;     // X(z0)
    double slope;  // 1 / density of the cell
  };

  PseudoInverse() = default;
  PseudoInverse(double mass, std::vector<Piece> pieces) : mass_(mass), pieces_(std::move(pieces)) {}

  double mass() const { return mass_; }
  const std::vector<Piece>& pieces() const { return pieces_; }
  double operator()(double z) const;

private:
  double mass_ = 0.0;
  std::vector<Piece> pieces_;
};

/// Throws DomainError for zero mass.
PseudoInverse pseudo_inverse(const PiecewiseConstantDensity& rho);

/// Relative mass mismatch accepted by wasserstein1.
inline constexpr double kW1MassTolerance = 1e-9;

/// Scaled 1-Wasserstein distance ||X_1 - X_2||_{L1([0, sigma])}, computed
/// exactly on the merged piece grid. Throws DomainError on mass mismatch.
double wasserstein1(const PiecewiseConstantDensity& a, const PiecewiseConstantDensity& b);
double wasserstein1(const PseudoInverse& a, const PseudoInverse& b);

/// values[0] + sum |values[i+1] - values[i]| + values[M-1]: the density is
/// extended by zero outside its breakpoints.
double total_variation(const PiecewiseConstantDensity& rho);

/// Exact cell-wise integral of w^k rho(w).
double moment(const PiecewiseConstantDensity& rho, unsigned k);

/// Variance of rho / mass. Throws DomainError for zero mass.
double variance(const PiecewiseConstantDensity& rho);

}  // namespace opinionflow
