#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "opinionflow/density.hpp"
#include "opinionflow/error.hpp"
#include "opinionflow/validate.hpp"

namespace opinionflow::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct CommonFlags {
  std::string scenario;
  std::string config;
  std::size_t particles = 0;
  std::optional<double> t_final;
  std::optional<double> dt;
  std::optional<double> cfl;
  std::string scheme;
  std::optional<std::size_t> snapshot_every;
};

void add_common(CLI::App& cmd, CommonFlags& f) {
  auto* sc = cmd.add_option("--scenario", f.scenario, "preset name (see list-scenarios)");
  auto* cfg = cmd.add_option("--config", f.config, "config file");
  sc->excludes(cfg);
  cmd.add_option("--particles", f.particles, "particles per species");
  cmd.add_option("--t-final", f.t_final, "final time");
  auto* dt = cmd.add_option("--dt", f.dt, "fixed step size");
  auto* cfl = cmd.add_option("--cfl", f.cfl, "adaptive step constant c_cfl");
  dt->excludes(cfl);
  cmd.add_option("--scheme", f.scheme, "euler|rk4")->check(CLI::IsMember({"euler", "rk4"}));
  cmd.add_option("--snapshot-every", f.snapshot_every, "snapshot every k accepted steps");
}

// Resolves the scenario and applies flag overrides. Writes the validation
// report to err; returns nullopt when the model is invalid.
std::optional<Scenario> resolve(const CommonFlags& f, std::ostream& err) {
  Scenario sc;
  ValidationReport report;
  if (!f.config.empty()) {
    auto loaded = load_config(f.config);
    sc = std::move(loaded.scenario);
    report = std::move(loaded.report);
  } else if (!f.scenario.empty()) {
    sc = preset(f.scenario);
    report = validate(sc.model);
  } else {
    throw std::invalid_argument("one of --scenario or --config is required");
  }
  if (!report.empty()) err << report.to_string();
  if (!report.ok()) {
    fmt::print(err, "error: model '{}' failed validation\n", sc.name);
    return std::nullopt;
  }
  if (f.particles > 0) sc.N = f.particles;
  if (f.t_final) sc.integrator.t_final = *f.t_final;
  if (f.dt) sc.integrator.dt_policy = FixedStep{*f.dt};
  if (f.cfl) sc.integrator.dt_policy = AdaptiveSpacing{*f.cfl};
  if (f.scheme == "euler") sc.integrator.scheme = Scheme::ExplicitEuler;
  if (f.scheme == "rk4") sc.integrator.scheme = Scheme::RK4;
  if (f.snapshot_every) {
    sc.integrator.snapshot_stride = *f.snapshot_every;
    sc.integrator.snapshot_interval = 0.0;
  }
  return sc;
}

unsigned thread_cap() {
  if (const char* env = std::getenv("OPINIONFLOW_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<std::size_t> parse_n_list(const std::string& text) {
  std::vector<std::size_t> ns;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = text.find(',', pos);
    const auto item = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    std::size_t used = 0;
    const auto v = std::stoul(item, &used);
    if (used != item.size() || v < 2) throw std::invalid_argument(fmt::format("bad particle count '{}'", item));
    ns.push_back(v);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  for (std::size_t i = 1; i < ns.size(); ++i) {
    if (!(ns[i] > ns[i - 1])) throw std::invalid_argument("--n-list must be strictly ascending");
  }
  if (ns.size() < 2) throw std::invalid_argument("--n-list needs at least two entries");
  return ns;
}

int cmd_run(const CommonFlags& f, const std::string& out_dir, std::ostream& out, std::ostream& err) {
  const auto sc = resolve(f, err);
  if (!sc) return kExitError;
  MinMaxMonitor monitor = MinMaxMonitor::for_model(sc->model, sc->integrator.t_final);
  const auto traj = run(sc->model, sc->N, sc->integrator, &monitor);
  const auto rec = make_record(*sc, traj, &monitor);
  const std::filesystem::path dir = out_dir.empty() ? std::filesystem::path("out") / sc->name : std::filesystem::path(out_dir);
  write_run(rec, dir);
  fmt::print(out, "scenario {}  N={}  t_final={}  steps={}  halvings={}  snapshots={}\n", sc->name, sc->N,
             sc->integrator.t_final, traj.steps, traj.halvings, traj.snapshots.size());
  fmt::print(out, "config hash {}\n", rec.config_hash);
  fmt::print(out, "wrote {}\n", dir.string());
  if (monitor.violation_count() > 0) {
    fmt::print(err, "min-max monitor logged {} violation(s)\n", monitor.violation_count());
    for (std::size_t k = 0; k < monitor.log().size() && k < 10; ++k) {
      const auto& e = monitor.log()[k];
      fmt::print(err, "  t={:.6g} species={} cell={} value={:.6g} limit={:.6g}\n", e.t, sc->model.species[e.species].tag,
                 e.cell, e.value, e.limit);
    }
    return kExitViolations;
  }
  return kExitOk;
}

int cmd_compare(const CommonFlags& f, const std::string& target, const std::string& out_dir, std::ostream& out,
                std::ostream& err) {
  const auto sc = resolve(f, err);
  if (!sc) return kExitError;
  const bool porous = target.empty()
                          ? sc->model.species.size() == 1 &&
                                sc->model.species[0].nonlinearity.kind == DiffusionNonlinearity::Kind::PowerLaw
                          : target == "porous";
  const auto cmp = compare_stationary(*sc, porous);
  const double sigma = sc->model.species[0].sigma;
  fmt::print(out, "scenario {}  N={}  t_final={}  target={}\n", sc->name, sc->N, sc->integrator.t_final,
             porous ? "porous" : "linear");
  fmt::print(out, "final W1 to target      {:.6e}  ({:.4e} sigma)\n", cmp.final_w1, cmp.final_w1 / sigma);
  fmt::print(out, "monotone-decrease share {:.4f}\n", cmp.monotone_fraction);
  fmt::print(out, "fitted m1 decay rate    {:.6g}\n", cmp.fitted_m1_rate);
  if (!std::isnan(cmp.analytic_m1_rate)) fmt::print(out, "analytic m1 decay rate  {:.6g}\n", cmp.analytic_m1_rate);
  if (porous) {
    fmt::print(out, "particle support        [{:.6f}, {:.6f}]\n", cmp.support_lo, cmp.support_hi);
    fmt::print(out, "target support          [{:.6f}, {:.6f}]\n", cmp.target.support().lo, cmp.target.support().hi);
  }
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    std::ofstream csv(std::filesystem::path(out_dir) / "compare_stationary.csv", std::ios::binary);
    if (!csv) throw Error(fmt::format("cannot write to '{}'", out_dir));
    csv << "t,m1,w1_to_target\n";
    for (std::size_t k = 0; k < cmp.times.size(); ++k) {
      csv << fmt::format("{:.17g},{:.17g},{:.17g}\n", cmp.times[k], cmp.m1[k], cmp.w1_to_target[k]);
    }
  }
  return cmp.monitor_violations > 0 ? kExitViolations : kExitOk;
}

int cmd_convergence(const CommonFlags& f, const std::string& n_list, std::ostream& out, std::ostream& err) {
  const auto sc = resolve(f, err);
  if (!sc) return kExitError;
  const auto ns = parse_n_list(n_list.empty() ? "50,100,200,400,800" : n_list);
  const auto rows = convergence_study(*sc, ns, thread_cap());
  fmt::print(out, "{:>8} {:>8} {:>16} {:>8}\n", "N", "N_next", "sup_t W1", "order");
  for (const auto& r : rows) {
    fmt::print(out, "{:>8} {:>8} {:>16.6e} {:>8}\n", r.n, r.n_next, r.distance,
               std::isnan(r.order) ? std::string("-") : fmt::format("{:.3f}", r.order));
  }
  return kExitOk;
}

int cmd_validate(const std::string& path, std::ostream& out, std::ostream& err) {
  const auto loaded = load_config(path);
  if (!loaded.report.empty()) err << loaded.report.to_string();
  if (!loaded.report.ok()) {
    fmt::print(err, "invalid: {}\n", path);
    return kExitError;
  }
  fmt::print(out, "valid: {} ({} species)\n", loaded.scenario.name, loaded.scenario.model.species.size());
  return kExitOk;
}

}  // namespace

double fit_decay_rate(std::span<const double> t, std::span<const double> y) {
  const std::size_t n = std::min(t.size(), y.size());
  double st = 0.0, sl = 0.0, stt = 0.0, stl = 0.0;
  std::size_t used = 0;
  for (std::size_t k = n / 2; k < n; ++k) {
    if (y[k] == 0.0) continue;
    const double l = std::log(std::abs(y[k]));
    st += t[k];
    sl += l;
    stt += t[k] * t[k];
    stl += t[k] * l;
    ++used;
  }
  if (used < 2) return kNaN;
  const double m = static_cast<double>(used);
  const double denom = m * stt - st * st;
  if (denom == 0.0) return kNaN;
  return -(m * stl - st * sl) / denom;
}

double monotone_fraction(std::span<const double> d) {
  if (d.size() < 2) return 1.0;
  std::size_t ok = 0;
  for (std::size_t k = 0; k + 1 < d.size(); ++k) ok += d[k + 1] <= d[k] ? 1 : 0;
  return static_cast<double>(ok) / static_cast<double>(d.size() - 1);
}

std::vector<ConvergenceRow> convergence_study(const Scenario& sc, const std::vector<std::size_t>& ns,
                                              unsigned threads) {
  IntegratorConfig cfg = sc.integrator;
  if (!(cfg.snapshot_interval > 0.0)) {
    // Distances need snapshots at common times.
    cfg.snapshot_interval = cfg.t_final / 20.0;
    cfg.snapshot_stride = 0;
  }

  std::vector<Trajectory> trajs(ns.size());
  std::vector<std::exception_ptr> errors(ns.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < ns.size(); k = next++) {
      try {
        trajs[k] = run(sc.model, ns[k], cfg);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const unsigned n_threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(ns.size())));
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < n_threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  std::vector<ConvergenceRow> rows;
  for (std::size_t k = 0; k + 1 < ns.size(); ++k) {
    const auto& a = trajs[k].snapshots;
    const auto& b = trajs[k + 1].snapshots;
    double sup = 0.0;
    std::size_t ib = 0;
    for (const auto& sa : a) {
      while (ib < b.size() && b[ib].t < sa.t) ++ib;
      if (ib == b.size() || b[ib].t != sa.t) continue;
      for (std::size_t s = 0; s < sa.species.size(); ++s) {
        sup = std::max(sup, wasserstein1(reconstruct(sa.species[s]), reconstruct(b[ib].species[s])));
      }
    }
    ConvergenceRow row{ns[k], ns[k + 1], sup, kNaN};
    if (!rows.empty() && sup > 0.0) row.order = std::log2(rows.back().distance / sup);
    rows.push_back(row);
  }
  return rows;
}

StationaryComparison compare_stationary(const Scenario& sc, bool porous_target) {
  const auto params = stationary_params(sc.model);
  if (!params) {
    throw std::invalid_argument(
        fmt::format("scenario '{}' has no closed-form stationary state (needs one species with P = 1)", sc.name));
  }
  if (porous_target != params->gamma.has_value()) {
    throw std::invalid_argument(fmt::format("target '{}' does not match the diffusion of scenario '{}'",
                                            porous_target ? "porous" : "linear", sc.name));
  }
  StationaryComparison cmp;
  cmp.target = porous_target ? stationary_porous(*params) : stationary_linear(*params);
  if (!cmp.target.ok()) throw std::invalid_argument("stationary target is not integrable");

  IntegratorConfig cfg = sc.integrator;
  if (!(cfg.snapshot_interval > 0.0) && cfg.snapshot_stride == 0) cfg.snapshot_interval = cfg.t_final / 50.0;
  MinMaxMonitor monitor = MinMaxMonitor::for_model(sc.model, cfg.t_final);
  const auto traj = run(sc.model, sc.N, cfg, &monitor);
  cmp.monitor_violations = monitor.violation_count();

  const auto rows = compute_diagnostics(sc.model, traj.snapshots, &cmp.target);
  for (const auto& r : rows) {
    cmp.times.push_back(r.t);
    cmp.m1.push_back(r.m1);
    cmp.w1_to_target.push_back(r.w1_to_target);
  }
  cmp.final_w1 = cmp.w1_to_target.back();
  cmp.monotone_fraction = monotone_fraction(cmp.w1_to_target);
  cmp.fitted_m1_rate = fit_decay_rate(cmp.times, cmp.m1);
  const auto& sp = sc.model.species[0];
  cmp.analytic_m1_rate = sp.mobility.alpha == 1.0 && !params->gamma ? m1_rate_linear_alpha1(params->lambda_sq) : kNaN;
  const auto& W = traj.snapshots.back().species[0].W;
  cmp.support_lo = W[1];
  cmp.support_hi = W[W.size() - 2];
  return cmp;
}

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Particle simulations of multi-species opinion dynamics"};
  app.require_subcommand(1);

  CommonFlags run_flags, cmp_flags, conv_flags;
  std::string run_out, cmp_out, cmp_target, n_list, config_path, plot_dir;

  auto* run_cmd = app.add_subcommand("run", "integrate a scenario and write its results");
  add_common(*run_cmd, run_flags);
  run_cmd->add_option("--out", run_out, "output directory (default out/<scenario>)");

  auto* cmp_cmd = app.add_subcommand("compare-stationary", "distance of a single-species run to its stationary state");
  add_common(*cmp_cmd, cmp_flags);
  cmp_cmd->add_option("--target", cmp_target, "linear|porous")->check(CLI::IsMember({"linear", "porous"}));
  cmp_cmd->add_option("--out", cmp_out, "directory for compare_stationary.csv");

  auto* conv_cmd = app.add_subcommand("convergence-study", "W1 self-convergence across particle counts");
  add_common(*conv_cmd, conv_flags);
  conv_cmd->add_option("--n-list", n_list, "ascending particle counts, default 50,100,200,400,800");

  auto* list_cmd = app.add_subcommand("list-scenarios", "print the preset names");

  auto* val_cmd = app.add_subcommand("validate-config", "parse and validate a config file");
  val_cmd->add_option("config", config_path, "config file")->required();

  auto* plot_cmd = app.add_subcommand("plot", "render SVG figures from a run directory");
  plot_cmd->add_option("run_dir", plot_dir, "directory written by run")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    if (*run_cmd) return cmd_run(run_flags, run_out, out, err);
    if (*cmp_cmd) return cmd_compare(cmp_flags, cmp_target, cmp_out, out, err);
    if (*conv_cmd) return cmd_convergence(conv_flags, n_list, out, err);
    if (*list_cmd) {
      for (const auto& n : preset_names()) fmt::print(out, "{}\n", n);
      return kExitOk;
    }
    if (*val_cmd) return cmd_validate(config_path, out, err);
    if (*plot_cmd) {
      for (const auto& p : emit_plots(plot_dir)) fmt::print(out, "wrote {}\n", p.string());
      return kExitOk;
    }
  } catch (const ConfigError& e) {
    if (e.line > 0) {
      fmt::print(err, "error: line {}, key '{}': {}\n", e.line, e.key, e.what());
    } else {
      fmt::print(err, "error: {}\n", e.what());
    }
    return kExitError;
  } catch (const std::exception& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitError;
  }
  return kExitError;
}

}  // namespace opinionflow::cli
