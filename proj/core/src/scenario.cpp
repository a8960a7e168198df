#include "opinionflow/scenario.hpp"

#include <stdexcept>

#include <fmt/format.h>

namespace opinionflow {

namespace {

constexpr double kHalfLambdaSq = 0.03;
constexpr double kSpikeStd = 0.05;

SpeciesSpec make_species(std::string tag, double sigma, InitialDensity initial, double half_lambda_sq = kHalfLambdaSq) {
  SpeciesSpec s;
  s.tag = std::move(tag);
  s.sigma = sigma;
  s.half_lambda_sq = half_lambda_sq;
  s.mobility = Mobility{1.0};
  s.nonlinearity = DiffusionNonlinearity::linear();
  s.initial = std::move(initial);
  return s;
}

InitialDensity spikes(std::vector<std::pair<double, double>> weight_center) {
  std::vector<GaussianComponent> comps;
  for (const auto& [w, c] : weight_center) comps.push_back({w, c, kSpikeStd});
  return InitialDensity::gaussian_mixture(std::move(comps));
}

InitialDensity ini1() { return spikes({{0.6, 0.0}}); }
InitialDensity ini2() { return spikes({{0.4, -0.75}, {0.2, 0.5}}); }
InitialDensity ini3() { return spikes({{0.2, -0.75}, {0.1, -0.2}, {0.1, 0.2}, {0.2, 0.75}}); }

Scenario single(std::string name, InitialDensity initial, DiffusionNonlinearity nl = DiffusionNonlinearity::linear()) {
  Scenario sc;
  sc.name = std::move(name);
  auto s = make_species("u", 0.6, std::move(initial));
  s.nonlinearity = nl;
  sc.model.species.push_back(std::move(s));
  sc.model.set_kernel("u", "u", CompromiseKernel::constant());
  sc.integrator.t_final = 20.0;
  sc.integrator.snapshot_interval = 0.5;
  return sc;
}

Scenario leaders(std::string name, double sigma_r, bool trolls) {
  Scenario sc;
  sc.name = std::move(name);
  auto& m = sc.model;
  m.species.push_back(make_species("f", 1.0, InitialDensity::gaussian_mixture({{1.0, 0.0, 0.3}})));
  m.species.push_back(make_species("l", 0.6, InitialDensity::gaussian_mixture({{0.6, -0.5, 0.1}})));
  m.species.push_back(make_species("r", sigma_r, InitialDensity::gaussian_mixture({{sigma_r, 0.5, 0.1}})));
  m.set_kernel("f", "f", CompromiseKernel::constant());
  m.set_kernel("l", "l", CompromiseKernel::constant());
  m.set_kernel("r", "r", CompromiseKernel::constant());
  m.set_kernel("f", "l", CompromiseKernel::one_minus_w_sq());
  m.set_kernel("f", "r", CompromiseKernel::one_minus_w_sq());
  m.set_kernel("l", "r", CompromiseKernel::scaled_one_minus_w_sq(0.001));
  m.set_kernel("r", "l", CompromiseKernel::scaled_one_minus_w_sq(0.001));
  if (trolls) {
    m.species.push_back(make_species(std::string(kTrollTag), 0.3, InitialDensity::gaussian_mixture({{0.3, 0.0, 0.3}}), 0.0));
    // Followers cannot tell trolls from followers.
    m.set_kernel("f", "q", m.kernel("f", "f"));
    m.set_kernel("q", "r", CompromiseKernel::quad_dist());
  }
  sc.integrator.t_final = 20.0;
  sc.integrator.snapshot_interval = 0.5;
  return sc;
}

}  // namespace

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"single-ini1",  "single-ini2",   "single-ini3",   "single-porous",
                                              "fl-symmetric", "fl-asymmetric", "flt-symmetric", "flt-asymmetric"};
  return names;
}

Scenario preset(std::string_view name) {
  if (name == "single-ini1") return single("single-ini1", ini1());
  if (name == "single-ini2") return single("single-ini2", ini2());
  if (name == "single-ini3") return single("single-ini3", ini3());
  if (name == "single-porous") return single("single-porous", ini1(), DiffusionNonlinearity::power_law(2.0));
  if (name == "fl-symmetric") return leaders("fl-symmetric", 0.6, false);
  if (name == "fl-asymmetric") return leaders("fl-asymmetric", 0.2, false);
  if (name == "flt-symmetric") return leaders("flt-symmetric", 0.6, true);
  if (name == "flt-asymmetric") return leaders("flt-asymmetric", 0.2, true);
  throw std::invalid_argument(fmt::format("unknown scenario '{}'", name));
}

std::optional<StationaryParams> stationary_params(const ModelSpec& model) {
  if (model.species.size() != 1) return std::nullopt;
  const auto& s = model.species.front();
  if (s.is_troll() || !(s.half_lambda_sq > 0.0)) return std::nullopt;
  if (model.kernel(s.tag, s.tag).kind != KernelKind::Constant) return std::nullopt;
  StationaryParams p;
  p.alpha = s.mobility.alpha;
  p.lambda_sq = 2.0 * s.half_lambda_sq;
  p.sigma = s.sigma;
  p.m1_inf = 0.0;
  if (s.nonlinearity.kind == DiffusionNonlinearity::Kind::PowerLaw) p.gamma = s.nonlinearity.gamma;
  return p;
}

std::optional<StationaryProfile> stationary_target(const ModelSpec& model) {
  const auto p = stationary_params(model);
  if (!p) return std::nullopt;
  auto prof = p->gamma ? stationary_porous(*p) : stationary_linear(*p);
  if (!prof.ok()) return std::nullopt;
  return prof;
}

}  // namespace opinionflow
