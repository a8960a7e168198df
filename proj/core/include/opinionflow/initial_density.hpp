#pragma once

#include <vector>

namespace opinionflow {

struct GaussianComponent {
  double weight = 0.0;  // mass carried by this component on I after truncation
  double center = 0.0;
  double std = 1.0;

  bool operator==(const GaussianComponent&) const = default;
};

struct DensityBounds {
  double min = 0.0;
  double max = 0.0;
};

/// Initial opinion density on I = [-1, 1].
///
/// Gaussian components are truncated to I and renormalized so that each one
/// carries exactly its `weight`. A floor eps >= 0 is blended in as
/// eps + (1 - 2 eps / mass) * raw(w), which keeps the total mass unchanged.
/// Tabulated densities are piecewise constant on equal cells of I.
class InitialDensity {
public:
  enum class Kind { Uniform, GaussianMixture, TabulatedPositive };

  InitialDensity() = default;

  static InitialDensity uniform(double mass);
  static InitialDensity gaussian_mixture(std::vector<GaussianComponent> components, double floor = 0.0);
  static InitialDensity tabulated(std::vector<double> cell_values, double floor = 0.0);

  Kind kind() const { return kind_; }
  const std::vector<GaussianComponent>& components() const { return components_; }
  const std::vector<double>& cell_values() const { return values_; }
  double floor() const { return floor_; }

  double mass() const { return mass_; }

  /// Density value; zero outside I.
  double operator()(double w) const;
  /// Mass of [-1, w]; clamps w to I.
  double cdf(double w) const;

  /// Infimum and supremum over I (the m_u, M_u of the min-max bounds).
  DensityBounds bounds() const;
  /// Total variation of the density extended by zero outside I.
  double total_variation() const;

  bool operator==(const InitialDensity&) const = default;

private:
  double raw(double w) const;
  double raw_cdf(double w) const;
  double blend_scale() const;

  Kind kind_ = Kind::Uniform;
  std::vector<GaussianComponent> components_;
  std::vector<double> values_;
  double floor_ = 0.0;
  double mass_ = 1.0;
};

}  // namespace opinionflow
