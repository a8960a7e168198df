#pragma once

// Particle representation of the opinion densities and the right-hand side
// of the coupled particle ODE system.

#include <cstddef>
#include <span>
#include <vector>

#include "opinionflow/model.hpp"

namespace opinionflow {

/// Ordered opinions W_0 < ... < W_N of one species, each cell carrying sigma/N.
struct SpeciesState {
  std::vector<double> W;
  double sigma = 0.0;
  double sigma_n = 0.0;
  bool pinned = true;

  std::size_t cells() const { return W.empty() ? 0 : W.size() - 1; }
  bool operator==(const SpeciesState&) const = default;
};

struct ParticleState {
  double t = 0.0;
  std::vector<SpeciesState> species;

  bool operator==(const ParticleState&) const = default;
};

/// dW/dt for every particle of every species, same shape as ParticleState.
using Velocities = std::vector<std::vector<double>>;

/// Splits `density` into N equal-mass cells: W_0 = -1, W_N = +1 and
/// cdf(W_i) = i sigma / N. Throws AtomizationError when the density mass
/// differs from sigma or when a cell boundary cannot be bracketed.
std::vector<double> atomize(const InitialDensity& density, std::size_t N, double sigma);

/// Unpinned (troll) variant: N+1 particles at the midpoints of N+1 equal
/// mass levels, cdf(W_i) = (i + 1/2) sigma / (N + 1), none of them at +-1.
std::vector<double> atomize_unpinned(const InitialDensity& density, std::size_t N, double sigma);

/// Atomizes every species of the model with N particles per species; pinned
/// species through atomize, trolls through atomize_unpinned.
ParticleState initial_state(const ModelSpec& spec, std::size_t N);

/// u_i = sigma_n / (W_{i+1} - W_i). Throws SpacingUnderflow when a gap is at
/// machine-epsilon scale or non-positive; `species` only labels the error.
std::vector<double> local_densities(std::span<const double> W, double sigma_n, std::size_t species = 0);

/// Osmotic velocity of interior particle i (1 <= i <= N-1) given the local
/// densities u of its species.
double diffusive_velocity(std::size_t i, std::span<const double> W, std::span<const double> u,
                          const SpeciesSpec& species, double sigma_n);

/// -sum_h sigma_h^N sum_j P_uh(W_i, H_j)(W_i - H_j) for particle i of species u,
/// evaluated by direct summation over every particle of every species.
double compromise_velocity(std::size_t i, const ParticleState& state, const ModelSpec& spec, std::size_t u);

/// Adds the compromise drift exerted by one population H (sorted, weight
/// sigma_h_n per particle) on every position in W to `out`. Uses power sums
/// or prefix sums so that the cost is O(|W| + |H|) up to a log factor.
void accumulate_compromise(std::span<const double> W, std::span<const double> H, double sigma_h_n,
                           const CompromiseKernel& k, std::span<double> out);

/// Full right-hand side: diffusive + compromise velocities, zero for pinned
/// extreme particles. Propagates SpacingUnderflow.
Velocities rhs(const ParticleState& state, const ModelSpec& spec);

/// In-place variant reusing the storage of `out`.
void rhs(const ParticleState& state, const ModelSpec& spec, Velocities& out);

/// True when every species is strictly increasing and inside [-1, 1].
bool is_ordered(const ParticleState& state);

}  // namespace opinionflow
