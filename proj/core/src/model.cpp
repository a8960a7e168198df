#include "opinionflow/model.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>

#include "opinionflow/error.hpp"

namespace opinionflow {

SpacingUnderflow::SpacingUnderflow(std::size_t species_, std::size_t cell_, double gap_)
    : Error(fmt::format("particle spacing underflow in species {} cell {} (gap {:.3e})", species_, cell_, gap_)),
      species(species_),
      cell(cell_),
      gap(gap_) {}

IntegrationError::IntegrationError(const std::string& what, double t_, std::size_t species_, std::size_t particle_)
    : Error(fmt::format("{} at t={:.17g} (species {}, particle {})", what, t_, species_, particle_)),
      t(t_),
      species(species_),
      particle(particle_) {}

ConfigError::ConfigError(const std::string& what, std::size_t line_, std::string key_)
    : Error(line_ > 0 ? fmt::format("line {}: {}", line_, what) : what), line(line_), key(std::move(key_)) {}

namespace {

void require_opinion(double w, const char* who) {
  if (!(std::abs(w) <= 1.0)) {
    throw DomainError(fmt::format("{}: opinion {} outside [-1, 1]", who, w));
  }
}

struct KernelName {
  KernelKind kind;
  std::string_view name;
};

constexpr std::array<KernelName, 7> kKernelNames{{
    {KernelKind::Zero, "zero"},
    {KernelKind::Constant, "constant"},
    {KernelKind::OneMinusAbsW, "one_minus_abs_w"},
    {KernelKind::OneMinusAbsDiff, "one_minus_abs_diff"},
    {KernelKind::OneMinusWSq, "one_minus_w_sq"},
    {KernelKind::ScaledOneMinusWSq, "scaled_one_minus_w_sq"},
    {KernelKind::QuadDist, "quad_dist"},
}};

}  // namespace

double eval_mobility_sq(double w, const Mobility& mob) {
  require_opinion(w, "eval_mobility_sq");
  const double base = 1.0 - w * w;
  if (base <= 0.0) return 0.0;
  if (mob.alpha == 1.0) return base;
  if (mob.alpha == 2.0) return base * base;
  return std::pow(base, mob.alpha);
}

double eval_phi(double u, const DiffusionNonlinearity& nl) {
  if (!(u >= 0.0)) throw DomainError(fmt::format("eval_phi: negative density {}", u));
  switch (nl.kind) {
    case DiffusionNonlinearity::Kind::Linear:
      return u;
    case DiffusionNonlinearity::Kind::PowerLaw:
      if (nl.gamma == 2.0) return 0.5 * u * u;
      return std::pow(u, nl.gamma) / nl.gamma;
  }
  return u;
}

double phi_lipschitz(const DiffusionNonlinearity& nl, double u_max) {
  if (nl.kind == DiffusionNonlinearity::Kind::Linear) return 1.0;
  // phi'(u) = u^(gamma-1), nondecreasing for gamma >= 1.
  return std::pow(std::max(u_max, 0.0), nl.gamma - 1.0);
}

KernelConstants kernel_constants(const CompromiseKernel& k) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  switch (k.kind) {
    case KernelKind::Zero:
      return {0.0, 0.0, 0.0, 0.0};
    case KernelKind::Constant:
      return {0.0, 1.0, 0.0, 0.0};
    case KernelKind::OneMinusAbsW:
      // d1 P = -sign(w): bounded but discontinuous at w = 0.
      return {1.0, 1.0, inf, 1.0};
    case KernelKind::OneMinusAbsDiff:
      return {2.0, 1.0, inf, 1.0};
    case KernelKind::OneMinusWSq:
      return {2.0, 1.0, 2.0, 2.0};
    case KernelKind::ScaledOneMinusWSq: {
      const double c = std::abs(k.scale);
      return {2.0 * c, c, 2.0 * c, 2.0 * c};
    }
    case KernelKind::QuadDist:
      // d1 P = -(w - v)/2, d2 P = (w - v)/2, |w - v| <= 2 on I x I.
      return {2.0, 1.0, 1.0, 1.0};
  }
  return {};
}

double eval_kernel(const CompromiseKernel& k, double w, double v) {
  require_opinion(w, "eval_kernel");
  require_opinion(v, "eval_kernel");
  switch (k.kind) {
    case KernelKind::Zero:
      return 0.0;
    case KernelKind::Constant:
      return 1.0;
    case KernelKind::OneMinusAbsW:
      return 1.0 - std::abs(w);
    case KernelKind::OneMinusAbsDiff:
      return std::max(0.0, 1.0 - std::abs(w - v));
    case KernelKind::OneMinusWSq:
      return 1.0 - w * w;
    case KernelKind::ScaledOneMinusWSq:
      return k.scale * (1.0 - w * w);
    case KernelKind::QuadDist: {
      const double d = w - v;
      return 1.0 - 0.25 * d * d;
    }
  }
  return 0.0;
}

std::string_view kernel_name(KernelKind kind) {
  for (const auto& entry : kKernelNames) {
    if (entry.kind == kind) return entry.name;
  }
  return "zero";
}

std::optional<KernelKind> kernel_kind_from_name(std::string_view name) {
  for (const auto& entry : kKernelNames) {
    if (entry.name == name) return entry.kind;
  }
  return std::nullopt;
}

const CompromiseKernel& ModelSpec::kernel(std::string_view u, std::string_view h) const {
  static const CompromiseKernel zero{};
  const auto it = kernels.find(KernelKey{std::string(u), std::string(h)});
  return it == kernels.end() ? zero : it->second;
}

void ModelSpec::set_kernel(std::string_view u, std::string_view h, CompromiseKernel k) {
  kernels[KernelKey{std::string(u), std::string(h)}] = k;
}

std::optional<std::size_t> ModelSpec::index_of(std::string_view tag) const {
  for (std::size_t i = 0; i < species.size(); ++i) {
    if (species[i].tag == tag) return i;
  }
  return std::nullopt;
}

const SpeciesSpec& ModelSpec::species_by_tag(std::string_view tag) const {
  const auto idx = index_of(tag);
  if (!idx) throw std::out_of_range(fmt::format("unknown species tag '{}'", tag));
  return species[*idx];
}

bool ModelSpec::operator==(const ModelSpec& o) const {
  if (species != o.species) return false;
  // Missing kernel entries are Zero, so compare through the accessor.
  for (const auto& [key, k] : kernels) {
    if (!(o.kernel(key.first, key.second) == k)) return false;
  }
  for (const auto& [key, k] : o.kernels) {
    if (!(kernel(key.first, key.second) == k)) return false;
  }
  return true;
}

double theta_constant(const ModelSpec& spec, std::string_view u) {
  (void)spec.species_by_tag(u);
  double theta = 0.0;
  for (const auto& h : spec.species) {
    const auto c = kernel_constants(spec.kernel(u, h.tag));
    theta += c.lip + c.sup + c.lip_d1;
  }
  return theta;
}

}  // namespace opinionflow
