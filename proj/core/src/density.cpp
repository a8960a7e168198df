#include "opinionflow/density.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "opinionflow/error.hpp"

namespace opinionflow {

double PiecewiseConstantDensity::integral() const {
  double s = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) s += values[i] * (breakpoints[i + 1] - breakpoints[i]);
  return s;
}

double PiecewiseConstantDensity::cdf(double w) const {
  double s = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double a = breakpoints[i];
    const double b = breakpoints[i + 1];
    if (w <= a) break;
    s += values[i] * (std::min(w, b) - a);
  }
  return s;
}

PiecewiseConstantDensity make_density(std::vector<double> breakpoints, std::vector<double> values) {
  if (breakpoints.size() != values.size() + 1) {
    throw DomainError(fmt::format("density needs M+1 breakpoints for M values (got {} and {})", breakpoints.size(),
                                  values.size()));
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(breakpoints[i + 1] >= breakpoints[i])) throw DomainError("density breakpoints must be nondecreasing");
    if (!(values[i] >= 0.0)) throw DomainError(fmt::format("negative density value {}", values[i]));
  }
  PiecewiseConstantDensity rho{std::move(breakpoints), std::move(values), 0.0};
  rho.mass = rho.integral();
  return rho;
}

PiecewiseConstantDensity reconstruct(const SpeciesState& state) {
  PiecewiseConstantDensity rho;
  rho.breakpoints = state.W;
  rho.values = local_densities(state.W, state.sigma_n);
  rho.mass = state.sigma;
  return rho;
}

double PseudoInverse::operator()(double z) const {
  if (pieces_.empty()) return 0.0;
  if (z <= pieces_.front().z0) return pieces_.front().x0;
  // First piece with z1 > z.
  auto it = std::upper_bound(pieces_.begin(), pieces_.end(), z, [](double v, const Piece& p) { return v < p.z1; });
  if (it == pieces_.end()) {
    const auto& last = pieces_.back();
    return last.x0 + last.slope * (last.z1 - last.z0);
  }
  return it->x0 + it->slope * (z - it->z0);
}

PseudoInverse pseudo_inverse(const PiecewiseConstantDensity& rho) {
  std::vector<PseudoInverse::Piece> pieces;
  pieces.reserve(rho.values.size());
  double z = 0.0;
  for (std::size_t i = 0; i < rho.values.size(); ++i) {
    const double a = rho.breakpoints[i];
    const double b = rho.breakpoints[i + 1];
    const double m = rho.values[i] * (b - a);
    if (!(m > 0.0)) continue;  // flat CDF: X jumps over this cell
    pieces.push_back({z, z + m, a, 1.0 / rho.values[i]});
    z += m;
  }
  if (pieces.empty()) throw DomainError("pseudo-inverse of a zero-mass density");
  return PseudoInverse(z, std::move(pieces));
}

namespace {

// Exact integral over an interval of length len of |f| for f linear with
// endpoint values f0, f1.
double abs_linear_integral(double f0, double f1, double len) {
  if ((f0 >= 0.0 && f1 >= 0.0) || (f0 <= 0.0 && f1 <= 0.0)) return 0.5 * (std::abs(f0) + std::abs(f1)) * len;
  const double a = std::abs(f0);
  const double b = std::abs(f1);
  return 0.5 * (a * a + b * b) / (a + b) * len;
}

}  // namespace

double wasserstein1(const PseudoInverse& a, const PseudoInverse& b) {
  const double scale = std::max(a.mass(), b.mass());
  if (std::abs(a.mass() - b.mass()) > kW1MassTolerance * scale) {
    throw DomainError(fmt::format("wasserstein1: mass mismatch {:.17g} vs {:.17g}", a.mass(), b.mass()));
  }
  const auto& pa = a.pieces();
  const auto& pb = b.pieces();
  const double z_end = std::min(a.mass(), b.mass());

  double total = 0.0;
  std::size_t ia = 0;
  std::size_t ib = 0;
  double z = 0.0;
  while (z < z_end && ia < pa.size() && ib < pb.size()) {
    const auto& p = pa[ia];
    const auto& q = pb[ib];
    const double z1 = std::min({p.z1, q.z1, z_end});
    if (z1 > z) {
      const double f0 = (p.x0 + p.slope * (z - p.z0)) - (q.x0 + q.slope * (z - q.z0));
      const double f1 = (p.x0 + p.slope * (z1 - p.z0)) - (q.x0 + q.slope * (z1 - q.z0));
      total += abs_linear_integral(f0, f1, z1 - z);
    }
    z = z1;
    if (p.z1 <= z) ++ia;
    if (q.z1 <= z) ++ib;
  }
  return total;
}

double wasserstein1(const PiecewiseConstantDensity& a, const PiecewiseConstantDensity& b) {
  return wasserstein1(pseudo_inverse(a), pseudo_inverse(b));
}

double total_variation(const PiecewiseConstantDensity& rho) {
  if (rho.values.empty()) return 0.0;
  double tv = rho.values.front() + rho.values.back();
  for (std::size_t i = 1; i < rho.values.size(); ++i) tv += std::abs(rho.values[i] - rho.values[i - 1]);
  return tv;
}

double moment(const PiecewiseConstantDensity& rho, unsigned k) {
  double s = 0.0;
  const double kp1 = static_cast<double>(k) + 1.0;
  for (std::size_t i = 0; i < rho.values.size(); ++i) {
    const double a = rho.breakpoints[i];
    const double b = rho.breakpoints[i + 1];
    double cell;
    switch (k) {
      case 0:
        cell = b - a;
        break;
      case 1:
        cell = 0.5 * (b - a) * (b + a);
        break;
      case 2:
        cell = (b - a) * (b * b + a * b + a * a) / 3.0;
        break;
      default:
        cell = (std::pow(b, kp1) - std::pow(a, kp1)) / kp1;
    }
    s += rho.values[i] * cell;
  }
  return s;
}

double variance(const PiecewiseConstantDensity& rho) {
  const double m0 = moment(rho, 0);
  if (!(m0 > 0.0)) throw DomainError("variance of a zero-mass density");
  const double mean = moment(rho, 1) / m0;
  return std::max(0.0, moment(rho, 2) / m0 - mean * mean);
}

}  // namespace opinionflow
