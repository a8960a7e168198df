#pragma once

// Independent reference implementations used by the tests. Nothing here
// calls into the library's numerical routines.

#include <cmath>
#include <cstddef>
#include <functional>
#include <random>
#include <vector>

#include "opinionflow/model.hpp"
#include "opinionflow/particles.hpp"

namespace oracle {

/// Adaptive Simpson quadrature.
inline double simpson(const std::function<double(double)>& f, double a, double b, double tol = 1e-12, int depth = 40) {
  struct Rec {
    static double step(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb,
                       double whole, double tol, int depth) {
      const double m = 0.5 * (a + b);
      const double lm = 0.5 * (a + m);
      const double rm = 0.5 * (m + b);
      const double flm = f(lm);
      const double frm = f(rm);
      const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
      const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
      const double diff = left + right - whole;
      if (depth <= 0 || std::abs(diff) <= 15.0 * tol) return left + right + diff / 15.0;
      return step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
             step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
    }
  };
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return Rec::step(f, a, b, fa, fm, fb, whole, tol, depth);
}

/// Composite Simpson on n (even) panels; for integrands with known smoothness.
inline double simpson_fixed(const std::function<double(double)>& f, double a, double b, std::size_t n) {
  if (n % 2) ++n;
  const double h = (b - a) / static_cast<double>(n);
  double s = f(a) + f(b);
  for (std::size_t i = 1; i < n; ++i) s += f(a + h * static_cast<double>(i)) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

/// Kernel formulas written out again, independently of eval_kernel.
inline double kernel(const opinionflow::CompromiseKernel& k, double w, double v) {
  using opinionflow::KernelKind;
  switch (k.kind) {
    case KernelKind::Zero:
      return 0.0;
    case KernelKind::Constant:
      return 1.0;
    case KernelKind::OneMinusAbsW:
      return 1.0 - std::fabs(w);
    case KernelKind::OneMinusAbsDiff:
      return std::fmax(0.0, 1.0 - std::fabs(w - v));
    case KernelKind::OneMinusWSq:
      return 1.0 - w * w;
    case KernelKind::ScaledOneMinusWSq:
      return k.scale * (1.0 - w * w);
    case KernelKind::QuadDist:
      return 1.0 - 0.25 * (w - v) * (w - v);
  }
  return 0.0;
}

/// Direct double loop over the particle ODE right-hand side.
inline std::vector<std::vector<double>> naive_rhs(const opinionflow::ParticleState& st,
                                                  const opinionflow::ModelSpec& spec) {
  std::vector<std::vector<double>> out(st.species.size());
  for (std::size_t u = 0; u < st.species.size(); ++u) {
    const auto& sp = spec.species[u];
    const auto& W = st.species[u].W;
    const double sn = st.species[u].sigma_n;
    const std::size_t N = W.size() - 1;
    out[u].assign(W.size(), 0.0);
    for (std::size_t i = 0; i <= N; ++i) {
      const bool end = i == 0 || i == N;
      if (end && sp.tag != "q") continue;  // pinned
      double v = 0.0;
      if (!end && sp.tag != "q") {
        const double left = sn / (W[i] - W[i - 1]);
        const double right = sn / (W[i + 1] - W[i]);
        auto phi = [&](double x) {
          return sp.nonlinearity.kind == opinionflow::DiffusionNonlinearity::Kind::Linear
                     ? x
                     : std::pow(x, sp.nonlinearity.gamma) / sp.nonlinearity.gamma;
        };
        v += sp.half_lambda_sq / sn * std::pow(1.0 - W[i] * W[i], sp.mobility.alpha) * (phi(left) - phi(right));
      }
      for (std::size_t h = 0; h < st.species.size(); ++h) {
        const auto& k = spec.kernel(sp.tag, spec.species[h].tag);
        for (double H : st.species[h].W) v -= st.species[h].sigma_n * kernel(k, W[i], H) * (W[i] - H);
      }
      out[u][i] = v;
    }
  }
  return out;
}

/// Piecewise-constant density as (breakpoints, values), for the CDF oracle.
struct Pc {
  std::vector<double> x;
  std::vector<double> v;

  double cdf(double w) const {
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (w <= x[i]) break;
      s += v[i] * (std::fmin(w, x[i + 1]) - x[i]);
    }
    return s;
  }
};

/// W1 = int |F_a - F_b| dw, integrated exactly: on every interval between
/// merged breakpoints F_a - F_b is linear, so |.| integrates in closed form.
inline double w1_cdf(const Pc& a, const Pc& b) {
  std::vector<double> xs = a.x;
  xs.insert(xs.end(), b.x.begin(), b.x.end());
  std::sort(xs.begin(), xs.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const double x0 = xs[i];
    const double x1 = xs[i + 1];
    if (!(x1 > x0)) continue;
    const double d0 = a.cdf(x0) - b.cdf(x0);
    const double d1 = a.cdf(x1) - b.cdf(x1);
    const double len = x1 - x0;
    if (d0 * d1 >= 0.0) {
      total += 0.5 * (std::fabs(d0) + std::fabs(d1)) * len;
    } else {
      total += 0.5 * (d0 * d0 + d1 * d1) / (std::fabs(d0) + std::fabs(d1)) * len;
    }
  }
  return total;
}

/// Random strictly increasing opinions on [-1, 1]; W_0 = -1 and W_N = 1 when
/// pinned. Gaps are a floor of 5% of the mean gap plus Dirichlet weights.
inline std::vector<double> random_positions(std::mt19937_64& rng, std::size_t N, bool pinned) {
  std::exponential_distribution<double> expo(1.0);
  const std::size_t n_gaps = pinned ? N : N + 2;  // unpinned: slack before W_0 and after W_N
  std::vector<double> g(n_gaps);
  double total = 0.0;
  for (double& x : g) total += (x = expo(rng));
  const double floor = 0.05 * 2.0 / static_cast<double>(n_gaps);
  const double free = 2.0 - floor * static_cast<double>(n_gaps);
  std::vector<double> W;
  double w = -1.0;
  if (!pinned) w += floor + free * g[0] / total;
  W.push_back(w);
  for (std::size_t i = pinned ? 0 : 1; W.size() < N + 1; ++i) {
    w += floor + free * g[i] / total;
    W.push_back(w);
  }
  if (pinned) W.back() = 1.0;
  return W;
}

}  // namespace oracle
