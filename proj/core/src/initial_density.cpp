#include "opinionflow/initial_density.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "opinionflow/error.hpp"

namespace opinionflow {

namespace {

// Standard normal CDF, accurate in both tails.
double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double component_truncated_mass(const GaussianComponent& c) {
  return normal_cdf((1.0 - c.center) / c.std) - normal_cdf((-1.0 - c.center) / c.std);
}

template <typename F>
double golden_extremum(F&& f, double a, double b, bool maximize) {
  constexpr double ratio = 0.6180339887498949;
  double x1 = b - ratio * (b - a);
  double x2 = a + ratio * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int iter = 0; iter < 200 && (b - a) > 1e-15; ++iter) {
    const bool keep_left = maximize ? (f1 > f2) : (f1 < f2);
    if (keep_left) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - ratio * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + ratio * (b - a);
      f2 = f(x2);
    }
  }
  return maximize ? std::max(f1, f2) : std::min(f1, f2);
}

}  // namespace

InitialDensity InitialDensity::uniform(double mass) {
  if (!(mass > 0.0)) throw DomainError(fmt::format("uniform density needs positive mass, got {}", mass));
  InitialDensity d;
  d.kind_ = Kind::Uniform;
  d.mass_ = mass;
  return d;
}

InitialDensity InitialDensity::gaussian_mixture(std::vector<GaussianComponent> components, double floor) {
  if (components.empty()) throw DomainError("gaussian mixture needs at least one component");
  double mass = 0.0;
  for (const auto& c : components) {
    if (!(c.weight > 0.0) || !(c.std > 0.0) || !std::isfinite(c.center)) {
      throw DomainError(fmt::format("invalid mixture component (weight {}, center {}, std {})", c.weight,
                                    c.center, c.std));
    }
    if (!(component_truncated_mass(c) > 0.0)) {
      throw DomainError(fmt::format("mixture component centred at {} has no mass on [-1, 1]", c.center));
    }
    mass += c.weight;
  }
  if (!(floor >= 0.0) || !(2.0 * floor < mass)) {
    throw DomainError(fmt::format("density floor {} must lie in [0, mass/2)", floor));
  }
  InitialDensity d;
  d.kind_ = Kind::GaussianMixture;
  d.components_ = std::move(components);
  d.floor_ = floor;
  d.mass_ = mass;
  return d;
}

InitialDensity InitialDensity::tabulated(std::vector<double> cell_values, double floor) {
  if (cell_values.empty()) throw DomainError("tabulated density needs at least one cell");
  const double width = 2.0 / static_cast<double>(cell_values.size());
  double mass = 0.0;
  for (double v : cell_values) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError(fmt::format("tabulated density value {} invalid", v));
    mass += v * width;
  }
  if (!(mass > 0.0)) throw DomainError("tabulated density has zero mass");
  if (!(floor >= 0.0) || !(2.0 * floor < mass)) {
    throw DomainError(fmt::format("density floor {} must lie in [0, mass/2)", floor));
  }
  InitialDensity d;
  d.kind_ = Kind::TabulatedPositive;
  d.values_ = std::move(cell_values);
  d.floor_ = floor;
  d.mass_ = mass;
  return d;
}

double InitialDensity::blend_scale() const { return floor_ > 0.0 ? 1.0 - 2.0 * floor_ / mass_ : 1.0; }

double InitialDensity::raw(double w) const {
  switch (kind_) {
    case Kind::Uniform:
      return 0.5 * mass_;
    case Kind::GaussianMixture: {
      double s = 0.0;
      for (const auto& c : components_) {
        const double z = (w - c.center) / c.std;
        s += c.weight * std::exp(-0.5 * z * z) /
             (c.std * std::sqrt(2.0 * std::numbers::pi) * component_truncated_mass(c));
      }
      return s;
    }
    case Kind::TabulatedPositive: {
      const auto k = values_.size();
      auto cell = static_cast<std::size_t>((w + 1.0) * 0.5 * static_cast<double>(k));
      return values_[std::min(cell, k - 1)];
    }
  }
  return 0.0;
}

double InitialDensity::raw_cdf(double w) const {
  switch (kind_) {
    case Kind::Uniform:
      return 0.5 * mass_ * (w + 1.0);
    case Kind::GaussianMixture: {
      double s = 0.0;
      for (const auto& c : components_) {
        const double lo = normal_cdf((-1.0 - c.center) / c.std);
        s += c.weight * (normal_cdf((w - c.center) / c.std) - lo) / component_truncated_mass(c);
      }
      return s;
    }
    case Kind::TabulatedPositive: {
      const auto k = values_.size();
      const double width = 2.0 / static_cast<double>(k);
      double s = 0.0;
      for (std::size_t i = 0; i < k; ++i) {
        const double left = -1.0 + width * static_cast<double>(i);
        if (w <= left) break;
        s += values_[i] * std::min(width, w - left);
      }
      return s;
    }
  }
  return 0.0;
}

double InitialDensity::operator()(double w) const {
  if (w < -1.0 || w > 1.0) return 0.0;
  return floor_ + blend_scale() * raw(w);
}

double InitialDensity::cdf(double w) const {
  if (w <= -1.0) return 0.0;
  if (w >= 1.0) return mass_;
  return floor_ * (w + 1.0) + blend_scale() * raw_cdf(w);
}

DensityBounds InitialDensity::bounds() const {
  if (kind_ == Kind::Uniform) return {0.5 * mass_, 0.5 * mass_};
  if (kind_ == Kind::TabulatedPositive) {
    const auto [lo, hi] = std::minmax_element(values_.begin(), values_.end());
    return {floor_ + blend_scale() * *lo, floor_ + blend_scale() * *hi};
  }
  // Sample, then sharpen every interior local extremum by golden section.
  double min_std = 1.0;
  for (const auto& c : components_) min_std = std::min(min_std, c.std);
  const auto samples = static_cast<std::size_t>(std::max(20000.0, 40.0 / min_std));
  const double h = 2.0 / static_cast<double>(samples);
  std::vector<double> f(samples + 1);
  for (std::size_t i = 0; i <= samples; ++i) f[i] = (*this)(-1.0 + h * static_cast<double>(i));
  DensityBounds b{std::min(f.front(), f.back()), std::max(f.front(), f.back())};
  const auto density = [this](double w) { return (*this)(w); };
  for (std::size_t i = 1; i < samples; ++i) {
    const double x = -1.0 + h * static_cast<double>(i);
    if (f[i] >= f[i - 1] && f[i] >= f[i + 1]) b.max = std::max(b.max, golden_extremum(density, x - h, x + h, true));
    if (f[i] <= f[i - 1] && f[i] <= f[i + 1]) b.min = std::min(b.min, golden_extremum(density, x - h, x + h, false));
  }
  return b;
}

double InitialDensity::total_variation() const {
  if (kind_ == Kind::Uniform) return mass_;  // two jumps of height mass/2
  if (kind_ == Kind::TabulatedPositive) {
    double tv = (*this)(-1.0);
    const double scale = blend_scale();
    for (std::size_t i = 1; i < values_.size(); ++i) tv += scale * std::abs(values_[i] - values_[i - 1]);
    return tv + (*this)(1.0);
  }
  // TV of a piecewise-monotone function = sum of jumps between consecutive extrema.
  double min_std = 1.0;
  for (const auto& c : components_) min_std = std::min(min_std, c.std);
  const auto samples = static_cast<std::size_t>(std::max(20000.0, 40.0 / min_std));
  const double h = 2.0 / static_cast<double>(samples);
  std::vector<double> f(samples + 1);
  for (std::size_t i = 0; i <= samples; ++i) f[i] = (*this)(-1.0 + h * static_cast<double>(i));
  const auto density = [this](double w) { return (*this)(w); };
  std::vector<double> extrema{f.front()};
  for (std::size_t i = 1; i < samples; ++i) {
    const double x = -1.0 + h * static_cast<double>(i);
    if (f[i] > f[i - 1] && f[i] >= f[i + 1]) extrema.push_back(golden_extremum(density, x - h, x + h, true));
    if (f[i] < f[i - 1] && f[i] <= f[i + 1]) extrema.push_back(golden_extremum(density, x - h, x + h, false));
  }
  extrema.push_back(f.back());
  double tv = extrema.front() + extrema.back();
  for (std::size_t i = 1; i < extrema.size(); ++i) tv += std::abs(extrema[i] - extrema[i - 1]);
  return tv;
}

}  // namespace opinionflow
