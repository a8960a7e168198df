#include "opinionflow/stationary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <fmt/format.h>

#include "opinionflow/error.hpp"

namespace opinionflow {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kQuadTol = 1e-13;

double gk_integrate(auto f, double a, double b) {
  using boost::math::quadrature::gauss_kronrod;
  return gauss_kronrod<double, 61>::integrate(f, a, b, 15, kQuadTol);
}

// Fixed-order rule for the many small cells of a discretization.
double gauss_integrate(auto f, double a, double b) {
  return boost::math::quadrature::gauss<double, 20>::integrate(f, a, b);
}

double ts_integrate(auto f, double a, double b) {
  // integrate() is not const-qualified in every Boost release.
  thread_local boost::math::quadrature::tanh_sinh<double> integrator;
  return integrator.integrate(f, a, b, kQuadTol);
}

// Values of u on (-1, 1) without the normalization factor for the linear kinds.
double linear_shape(double w, const StationaryParams& p) {
  const double d = frak_D(w, p);
  if (d == -kInf) return 0.0;
  return std::exp(2.0 / p.lambda_sq * d);
}

double porous_value(double w, double C, const StationaryParams& p) {
  const double g = C + frak_D(w, p);
  if (!(g > 0.0)) return 0.0;
  const double gm1 = *p.gamma - 1.0;
  return std::pow(2.0 * gm1 / p.lambda_sq * g, 1.0 / gm1);
}

// Maximizer of frak_D: the zero of m1_inf - sigma w, clamped inside I.
double mode(const StationaryParams& p) {
  const double w = p.m1_inf / p.sigma;
  return std::clamp(w, -1.0 + 1e-12, 1.0 - 1e-12);
}

// Level-set endpoint of C + frak_D between `outer` (where it is negative or
// at the boundary of I) and `inner` (where it is positive).
double level_endpoint(double C, const StationaryParams& p, double outer, double inner) {
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (outer + inner);
    if (mid == outer || mid == inner) break;
    if (C + frak_D(mid, p) > 0.0) {
      inner = mid;
    } else {
      outer = mid;
    }
  }
  return 0.5 * (outer + inner);
}

Support porous_support(double C, const StationaryParams& p) {
  const double w0 = mode(p);
  return {level_endpoint(C, p, -1.0, w0), level_endpoint(C, p, 1.0, w0)};
}

double porous_mass(double C, const StationaryParams& p) {
  const auto s = porous_support(C, p);
  if (!(s.hi > s.lo)) return 0.0;
  return ts_integrate([&](double w) { return porous_value(w, C, p); }, s.lo, s.hi);
}

}  // namespace

double frak_D(double w, const StationaryParams& p) {
  if (!(std::abs(w) < 1.0)) return -kInf;
  const double m = p.m1_inf;
  const double s = p.sigma;
  if (p.alpha == 1.0) {
    return 0.5 * m * std::log((1.0 + w) / (1.0 - w)) + 0.5 * s * std::log1p(-w * w);
  }
  if (p.alpha == 2.0) {
    const double q = 1.0 - w * w;
    return m * (w / (2.0 * q) + 0.25 * std::log((1.0 + w) / (1.0 - w))) - s * w * w / (2.0 * q);
  }
  if (w == 0.0) return 0.0;
  const double a = p.alpha;
  return gk_integrate([&](double x) { return (m - s * x) / std::pow(1.0 - x * x, a); }, 0.0, w);
}

double StationaryProfile::operator()(double w) const {
  if (!ok() || w < support_.lo || w > support_.hi || !(std::abs(w) < 1.0)) return 0.0;
  if (kind_ == Kind::Porous) return porous_value(w, normalization_, params_);
  return normalization_ * linear_shape(w, params_);
}

double StationaryProfile::mass() const {
  if (!ok()) return 0.0;
  return ts_integrate([this](double w) { return (*this)(w); }, support_.lo, support_.hi);
}

PiecewiseConstantDensity StationaryProfile::discretize(std::size_t cells) const {
  if (cells == 0) throw DomainError("discretize needs at least one cell");
  if (!ok()) throw DomainError("cannot discretize a non-integrable stationary profile");
  const double lo = support_.lo;
  const double width = (support_.hi - lo) / static_cast<double>(cells);
  std::vector<double> bps(cells + 1);
  for (std::size_t i = 0; i <= cells; ++i) bps[i] = lo + width * static_cast<double>(i);
  bps.back() = support_.hi;

  std::vector<double> masses(cells);
  double total = 0.0;
  for (std::size_t i = 0; i < cells; ++i) {
    masses[i] = std::max(0.0, gauss_integrate([this](double w) { return (*this)(w); }, bps[i], bps[i + 1]));
    total += masses[i];
  }
  if (!(total > 0.0)) throw DomainError("stationary profile has no mass on its support");
  const double scale = params_.sigma / total;
  std::vector<double> vals(cells);
  for (std::size_t i = 0; i < cells; ++i) vals[i] = masses[i] * scale / (bps[i + 1] - bps[i]);
  auto rho = make_density(std::move(bps), std::move(vals));
  rho.mass = params_.sigma;
  return rho;
}

StationaryProfile stationary_linear(const StationaryParams& p) {
  if (!(p.lambda_sq > 0.0)) throw DomainError("stationary_linear needs lambda^2 > 0");
  if (!(p.sigma > 0.0)) throw DomainError("stationary_linear needs sigma > 0");
  const auto kind = p.alpha == 1.0   ? StationaryProfile::Kind::LinearAlpha1
                    : p.alpha == 2.0 ? StationaryProfile::Kind::LinearAlpha2
                                     : StationaryProfile::Kind::LinearGeneric;
  StationaryParams lp = p;
  lp.gamma.reset();
  const Support full{-1.0, 1.0};

  if (p.alpha == 1.0 && !(p.sigma + p.m1_inf > 0.0 && p.sigma - p.m1_inf > 0.0)) {
    throw DomainError(fmt::format("stationary state needs sigma + m1 > 0 and sigma - m1 > 0 (sigma = {}, m1 = {})",
                                  p.sigma, p.m1_inf));
  }
  // For alpha > 1 the exponential factor blows up at an endpoint unless sigma > |m1|.
  if (p.alpha > 1.0 && !(p.sigma > std::abs(p.m1_inf))) {
    return StationaryProfile(kind, StationaryProfile::Status::NonIntegrable, lp, 0.0, full);
  }

  const double z = ts_integrate([&](double w) { return linear_shape(w, lp); }, -1.0, 1.0);
  if (!std::isfinite(z) || !(z > 0.0)) {
    return StationaryProfile(kind, StationaryProfile::Status::NonIntegrable, lp, 0.0, full);
  }
  return StationaryProfile(kind, StationaryProfile::Status::Ok, lp, p.sigma / z, full);
}

StationaryProfile stationary_porous(const StationaryParams& p) {
  if (!p.gamma || !(*p.gamma > 1.0)) throw DomainError("stationary_porous needs gamma > 1");
  if (!(p.lambda_sq > 0.0)) throw DomainError("stationary_porous needs lambda^2 > 0");
  if (!(p.sigma > std::abs(p.m1_inf))) {
    throw DomainError(fmt::format("stationary_porous needs sigma > |m1| (sigma = {}, m1 = {})", p.sigma, p.m1_inf));
  }

  // Mass is zero at C = -max frak_D and increases with C.
  double lo = -frak_D(mode(p), p);
  double step = 0.01;
  double hi = lo + step;
  while (porous_mass(hi, p) < p.sigma) {
    lo = hi;
    step *= 2.0;
    hi += step;
    if (step > 1e6) throw DomainError("stationary_porous: cannot bracket the normalization constant");
  }
  double C = hi;
  for (int iter = 0; iter < 200; ++iter) {
    C = 0.5 * (lo + hi);
    const double m = porous_mass(C, p);
    if (std::abs(m - p.sigma) <= 1e-12 * p.sigma) break;
    if (m < p.sigma) {
      lo = C;
    } else {
      hi = C;
    }
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(C)) break;
  }
  return StationaryProfile(StationaryProfile::Kind::Porous, StationaryProfile::Status::Ok, p, C,
                           porous_support(C, p));
}

double m1_rate_linear_alpha1(double lambda_sq) { return lambda_sq; }

std::vector<double> moment_rhs_alpha2(std::span<const double> m, double sigma, double lambda_sq) {
  const std::size_t K = m.size();
  if (K < 3) throw DomainError(fmt::format("moment hierarchy needs K >= 3, got {}", K));
  // mk(j): m_j with m_0 = sigma and zero above K.
  auto mk = [&](std::size_t j) -> double {
    if (j == 0) return sigma;
    return j <= K ? m[j - 1] : 0.0;
  };
  const double half = 0.5 * lambda_sq;
  const double m1 = m[0];
  std::vector<double> out(K);
  for (std::size_t k = 1; k <= K; ++k) {
    const auto kd = static_cast<double>(k);
    double v = k >= 2 ? half * kd * (kd - 1.0) * mk(k - 2) : 0.0;
    v += kd * m1 * mk(k - 1);
    v -= kd * (lambda_sq * (kd + 1.0) + sigma) * mk(k);
    v += half * kd * (kd + 3.0) * mk(k + 2);
    out[k - 1] = v;
  }
  return out;
}

}  // namespace opinionflow
