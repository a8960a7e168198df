#include "opinionflow/particles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "opinionflow/error.hpp"

namespace opinionflow {

namespace {

constexpr double kMassTolerance = 1e-10;

// Largest x in [lo, hi] with cdf(x) < target, to full double resolution.
double invert_cdf(const InitialDensity& density, double target, double lo, double hi) {
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (density.cdf(mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

}  // namespace

std::vector<double> atomize(const InitialDensity& density, std::size_t N, double sigma) {
  if (N < 2) throw AtomizationError(fmt::format("atomize needs N >= 2, got {}", N));
  if (!(sigma > 0.0)) throw AtomizationError(fmt::format("atomize needs positive mass, got {}", sigma));
  if (std::abs(density.mass() - sigma) > kMassTolerance * sigma) {
    throw AtomizationError(
        fmt::format("density mass {:.17g} differs from species mass {:.17g}", density.mass(), sigma));
  }

  const double cell_mass = sigma / static_cast<double>(N);
  std::vector<double> W(N + 1);
  W.front() = kOpinions.lo;
  W.back() = kOpinions.hi;
  for (std::size_t i = 1; i < N; ++i) {
    const double target = cell_mass * static_cast<double>(i);
    const double x = invert_cdf(density, target, W[i - 1], kOpinions.hi);
    if (!(x > W[i - 1]) || !(x < kOpinions.hi) || density(x) <= 0.0) {
      throw AtomizationError(fmt::format(
          "cannot bracket cell boundary {} (mass level {:.17g}); the density vanishes near w = {}", i, target, x));
    }
    W[i] = x;
  }
  return W;
}

std::vector<double> atomize_unpinned(const InitialDensity& density, std::size_t N, double sigma) {
  if (N < 1) throw AtomizationError(fmt::format("atomize_unpinned needs N >= 1, got {}", N));
  if (!(sigma > 0.0)) throw AtomizationError(fmt::format("atomize needs positive mass, got {}", sigma));
  if (std::abs(density.mass() - sigma) > kMassTolerance * sigma) {
    throw AtomizationError(
        fmt::format("density mass {:.17g} differs from species mass {:.17g}", density.mass(), sigma));
  }
  const double level = sigma / static_cast<double>(N + 1);
  std::vector<double> W(N + 1);
  double lo = kOpinions.lo;
  for (std::size_t i = 0; i <= N; ++i) {
    const double target = level * (static_cast<double>(i) + 0.5);
    const double x = invert_cdf(density, target, lo, kOpinions.hi);
    if (!(x > lo) || !(x < kOpinions.hi)) {
      throw AtomizationError(fmt::format("cannot place particle {} (mass level {:.17g})", i, target));
    }
    W[i] = x;
    lo = x;
  }
  return W;
}

ParticleState initial_state(const ModelSpec& spec, std::size_t N) {
  ParticleState state;
  state.species.reserve(spec.species.size());
  for (const auto& s : spec.species) {
    SpeciesState st;
    st.W = s.pinned() ? atomize(s.initial, N, s.sigma) : atomize_unpinned(s.initial, N, s.sigma);
    st.sigma = s.sigma;
    st.sigma_n = s.sigma / static_cast<double>(N);
    st.pinned = s.pinned();
    state.species.push_back(std::move(st));
  }
  return state;
}

std::vector<double> local_densities(std::span<const double> W, double sigma_n, std::size_t species) {
  std::vector<double> u(W.size() > 0 ? W.size() - 1 : 0);
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double gap = W[i + 1] - W[i];
    if (!(gap > 2.0 * std::numeric_limits<double>::epsilon())) throw SpacingUnderflow(species, i, gap);
    u[i] = sigma_n / gap;
  }
  return u;
}

double diffusive_velocity(std::size_t i, std::span<const double> W, std::span<const double> u,
                          const SpeciesSpec& species, double sigma_n) {
  if (i == 0 || i + 1 >= W.size()) {
    throw std::out_of_range(fmt::format("diffusive_velocity: particle {} is not interior", i));
  }
  const double d2 = eval_mobility_sq(W[i], species.mobility);
  return species.half_lambda_sq / sigma_n * d2 *
         (eval_phi(u[i - 1], species.nonlinearity) - eval_phi(u[i], species.nonlinearity));
}

double compromise_velocity(std::size_t i, const ParticleState& state, const ModelSpec& spec, std::size_t u) {
  const double w = state.species.at(u).W.at(i);
  const auto& tag = spec.species.at(u).tag;
  double v = 0.0;
  for (std::size_t h = 0; h < spec.species.size(); ++h) {
    const auto& k = spec.kernel(tag, spec.species[h].tag);
    if (k.is_zero()) continue;
    const auto& other = state.species[h];
    double s = 0.0;
    for (double H : other.W) s += eval_kernel(k, w, H) * (w - H);
    v -= other.sigma_n * s;
  }
  return v;
}

void accumulate_compromise(std::span<const double> W, std::span<const double> H, double sigma_h_n,
                           const CompromiseKernel& k, std::span<double> out) {
  if (k.is_zero() || H.empty()) return;
  const auto n = static_cast<double>(H.size());

  if (k.kind == KernelKind::OneMinusAbsDiff) {
    // Only |w - H_j| < 1 contributes (the kernel is clamped at zero);
    // prefix sums of H and H^2 over the sorted population give each window.
    std::vector<double> p1(H.size() + 1, 0.0);
    std::vector<double> p2(H.size() + 1, 0.0);
    for (std::size_t j = 0; j < H.size(); ++j) {
      p1[j + 1] = p1[j] + H[j];
      p2[j + 1] = p2[j] + H[j] * H[j];
    }
    for (std::size_t i = 0; i < W.size(); ++i) {
      const double w = W[i];
      const auto lo = static_cast<std::size_t>(std::upper_bound(H.begin(), H.end(), w - 1.0) - H.begin());
      const auto mid = static_cast<std::size_t>(std::lower_bound(H.begin(), H.end(), w) - H.begin());
      const auto hi = static_cast<std::size_t>(std::lower_bound(H.begin(), H.end(), w + 1.0) - H.begin());
      // H_j < w: d = w - H_j > 0 contributes d - d^2; H_j >= w contributes d + d^2.
      const double cl = static_cast<double>(mid - lo);
      const double s1l = p1[mid] - p1[lo];
      const double s2l = p2[mid] - p2[lo];
      const double cr = static_cast<double>(hi - mid);
      const double s1r = p1[hi] - p1[mid];
      const double s2r = p2[hi] - p2[mid];
      const double dl = cl * w - s1l;
      const double dl2 = cl * w * w - 2.0 * w * s1l + s2l;
      const double dr = cr * w - s1r;
      const double dr2 = cr * w * w - 2.0 * w * s1r + s2r;
      out[i] -= sigma_h_n * ((dl - dl2) + (dr + dr2));
    }
    return;
  }

  double s1 = 0.0;
  double s2 = 0.0;
  double s3 = 0.0;
  for (double x : H) {
    s1 += x;
    if (k.kind == KernelKind::QuadDist) {
      s2 += x * x;
      s3 += x * x * x;
    }
  }

  for (std::size_t i = 0; i < W.size(); ++i) {
    const double w = W[i];
    // sum_j (w - H_j)
    const double d1 = n * w - s1;
    double sum = 0.0;
    switch (k.kind) {
      case KernelKind::Constant:
        sum = d1;
        break;
      case KernelKind::OneMinusWSq:
        sum = (1.0 - w * w) * d1;
        break;
      case KernelKind::ScaledOneMinusWSq:
        sum = k.scale * (1.0 - w * w) * d1;
        break;
      case KernelKind::OneMinusAbsW:
        sum = (1.0 - std::abs(w)) * d1;
        break;
      case KernelKind::QuadDist: {
        const double d3 = n * w * w * w - 3.0 * w * w * s1 + 3.0 * w * s2 - s3;
        sum = d1 - 0.25 * d3;
        break;
      }
      default:
        break;
    }
    out[i] -= sigma_h_n * sum;
  }
}

void rhs(const ParticleState& state, const ModelSpec& spec, Velocities& out) {
  const auto ns = spec.species.size();
  out.resize(ns);
  for (std::size_t u = 0; u < ns; ++u) {
    const auto& sp = spec.species[u];
    const auto& st = state.species[u];
    auto& v = out[u];
    v.assign(st.W.size(), 0.0);
    if (st.W.size() < 2) continue;

    if (!sp.is_troll() && sp.half_lambda_sq > 0.0) {
      const auto dens = local_densities(st.W, st.sigma_n, u);
      const double coef = sp.half_lambda_sq / st.sigma_n;
      for (std::size_t i = 1; i + 1 < st.W.size(); ++i) {
        const double d2 = eval_mobility_sq(st.W[i], sp.mobility);
        v[i] = coef * d2 * (eval_phi(dens[i - 1], sp.nonlinearity) - eval_phi(dens[i], sp.nonlinearity));
      }
    }

    for (std::size_t h = 0; h < ns; ++h) {
      const auto& k = spec.kernel(sp.tag, spec.species[h].tag);
      if (k.is_zero()) continue;
      accumulate_compromise(st.W, state.species[h].W, state.species[h].sigma_n, k, v);
    }

    if (st.pinned) {
      v.front() = 0.0;
      v.back() = 0.0;
    }
  }
}

Velocities rhs(const ParticleState& state, const ModelSpec& spec) {
  Velocities out;
  rhs(state, spec, out);
  return out;
}

bool is_ordered(const ParticleState& state) {
  for (const auto& s : state.species) {
    for (std::size_t i = 0; i < s.W.size(); ++i) {
      if (!(s.W[i] >= kOpinions.lo && s.W[i] <= kOpinions.hi)) return false;
      if (i > 0 && !(s.W[i] > s.W[i - 1])) return false;
    }
  }
  return true;
}

}  // namespace opinionflow
