#pragma once

// Model vocabulary: mobilities, diffusion nonlinearities, compromise kernels
// and the species/coupling description of a multi-population model.

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "opinionflow/initial_density.hpp"

namespace opinionflow {

/// The opinion domain. Fixed to [-1, 1] for all species.
struct OpinionInterval {
  double lo = -1.0;
  double hi = 1.0;

  constexpr bool contains(double w) const { return w >= lo && w <= hi; }
  constexpr double length() const { return hi - lo; }
};

inline constexpr OpinionInterval kOpinions{};

/// D^2(w) = (1 - w^2)^alpha. alpha >= 1 keeps d/dw D^2 bounded.
struct Mobility {
  double alpha = 1.0;

  bool operator==(const Mobility&) const = default;
};

/// Returns D^2(w). Throws DomainError for |w| > 1.
double eval_mobility_sq(double w, const Mobility& mob);

/// phi(u) = u (Linear) or u^gamma / gamma (PowerLaw, gamma > 1).
struct DiffusionNonlinearity {
  enum class Kind { Linear, PowerLaw };

  Kind kind = Kind::Linear;
  double gamma = 1.0;

  static DiffusionNonlinearity linear() { return {}; }
  static DiffusionNonlinearity power_law(double gamma) { return {Kind::PowerLaw, gamma}; }

  bool operator==(const DiffusionNonlinearity&) const = default;
};

/// Throws DomainError for u < 0.
double eval_phi(double u, const DiffusionNonlinearity& nl);

/// Lipschitz constant of phi on [0, u_max].
double phi_lipschitz(const DiffusionNonlinearity& nl, double u_max);

enum class KernelKind {
  Zero,
  Constant,            // 1
  OneMinusAbsW,        // 1 - |w|
  OneMinusAbsDiff,     // 1 - |w - v|
  OneMinusWSq,         // 1 - w^2
  ScaledOneMinusWSq,   // c (1 - w^2)
  QuadDist,            // 1 - (w - v)^2 / 4
};

/// Compromise kernel P(w, v): relevance of opinion v to an agent holding w.
struct CompromiseKernel {
  KernelKind kind = KernelKind::Zero;
  double scale = 1.0;  // only meaningful for ScaledOneMinusWSq

  static CompromiseKernel zero() { return {KernelKind::Zero, 1.0}; }
  static CompromiseKernel constant() { return {KernelKind::Constant, 1.0}; }
  static CompromiseKernel one_minus_abs_w() { return {KernelKind::OneMinusAbsW, 1.0}; }
  static CompromiseKernel one_minus_abs_diff() { return {KernelKind::OneMinusAbsDiff, 1.0}; }
  static CompromiseKernel one_minus_w_sq() { return {KernelKind::OneMinusWSq, 1.0}; }
  static CompromiseKernel scaled_one_minus_w_sq(double c) { return {KernelKind::ScaledOneMinusWSq, c}; }
  static CompromiseKernel quad_dist() { return {KernelKind::QuadDist, 1.0}; }

  bool is_zero() const { return kind == KernelKind::Zero; }

  bool operator==(const CompromiseKernel& o) const {
    return kind == o.kind && (kind != KernelKind::ScaledOneMinusWSq || scale == o.scale);
  }
};

/// Certified constants of a kernel on I x I.
///
/// `lip` bounds |P(w1,v)-P(w2,v)| + |P(v,w1)-P(v,w2)| by lip*|w1-w2|, `lip_d1`
/// is the same quantity for the first partial derivative. A kernel whose first
/// partial is discontinuous reports lip_d1 = +inf.
struct KernelConstants {
  double lip = 0.0;
  double sup = 0.0;
  double lip_d1 = 0.0;
  double sup_d1 = 0.0;
};

KernelConstants kernel_constants(const CompromiseKernel& k);

/// Throws DomainError outside I x I.
double eval_kernel(const CompromiseKernel& k, double w, double v);

/// Lower-case identifier used by the config format, e.g. "quad_dist".
std::string_view kernel_name(KernelKind kind);
std::optional<KernelKind> kernel_kind_from_name(std::string_view name);

/// Tag reserved for the troll population: no diffusion, unpinned particles.
inline constexpr std::string_view kTrollTag = "q";

struct SpeciesSpec {
  std::string tag;
  double sigma = 1.0;
  /// lambda^2 / 2, the coefficient multiplying D^2 d_w phi(u) in the flux.
  double half_lambda_sq = 0.0;
  Mobility mobility;
  DiffusionNonlinearity nonlinearity;
  InitialDensity initial;

  bool is_troll() const { return tag == kTrollTag; }
  /// Extreme particles W_0 = -1 and W_N = +1 never move.
  bool pinned() const { return !is_troll(); }

  bool operator==(const SpeciesSpec&) const = default;
};

struct ModelSpec {
  using KernelKey = std::pair<std::string, std::string>;

  std::vector<SpeciesSpec> species;
  /// (u, h) -> P_uh. Missing pairs are Zero.
  std::map<KernelKey, CompromiseKernel> kernels;

  const CompromiseKernel& kernel(std::string_view u, std::string_view h) const;
  void set_kernel(std::string_view u, std::string_view h, CompromiseKernel k);

  std::optional<std::size_t> index_of(std::string_view tag) const;
  const SpeciesSpec& species_by_tag(std::string_view tag) const;

  bool operator==(const ModelSpec& o) const;
};

/// Theta_u = sum_h (Lip[P_uh] + sup|P_uh| + Lip[d1 P_uh]); the rate used by
/// the discrete min-max bounds. Throws std::out_of_range for an unknown tag.
double theta_constant(const ModelSpec& spec, std::string_view u);

}  // namespace opinionflow
