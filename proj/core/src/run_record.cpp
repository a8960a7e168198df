#include "opinionflow/run_record.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include <fmt/format.h>
#include <json.hpp>
#include <openssl/evp.h>

#include "opinionflow/density.hpp"
#include "opinionflow/error.hpp"

namespace opinionflow {

namespace {

std::string num(double v) { return fmt::format("{:.17g}", v); }

class CsvFile {
public:
  explicit CsvFile(const std::filesystem::path& path) : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw Error(fmt::format("cannot open '{}' for writing", path.string()));
  }

  void line(const std::string& s) { out_ << s << '\n'; }

  void close() {
    out_.close();
    if (!out_) throw Error(fmt::format("failed writing '{}'", path_.string()));
  }

private:
  std::filesystem::path path_;
  std::ofstream out_;
};

}  // namespace

std::string git_blob_hash(std::string_view text) {
  const std::string header = fmt::format("blob {}", text.size());
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx) throw Error("cannot allocate a digest context");
  const bool ok = EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr) == 1 &&
                  EVP_DigestUpdate(ctx, header.data(), header.size() + 1) == 1 &&  // includes the NUL
                  EVP_DigestUpdate(ctx, text.data(), text.size()) == 1 && EVP_DigestFinal_ex(ctx, md, &len) == 1;
  EVP_MD_CTX_free(ctx);
  if (!ok) throw Error("SHA-1 digest failed");
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", md[i]);
  return hex;
}

std::vector<DiagnosticsRow> compute_diagnostics(const ModelSpec& model, const std::vector<ParticleState>& snapshots,
                                                const StationaryProfile* target) {
  std::optional<PseudoInverse> target_inv;
  if (target && model.species.size() == 1) target_inv = pseudo_inverse(target->discretize(kTargetCells));

  std::vector<DiagnosticsRow> rows;
  rows.reserve(snapshots.size() * model.species.size());
  for (const auto& snap : snapshots) {
    for (std::size_t s = 0; s < model.species.size(); ++s) {
      const auto rho = reconstruct(snap.species[s]);
      DiagnosticsRow row;
      row.t = snap.t;
      row.species = model.species[s].tag;
      row.m1 = moment(rho, 1);
      row.var = variance(rho);
      row.tv = total_variation(rho);
      row.w1_to_target = target_inv ? wasserstein1(pseudo_inverse(rho), *target_inv)
                                    : std::numeric_limits<double>::quiet_NaN();
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

RunRecord make_record(const Scenario& scenario, const Trajectory& traj, const MinMaxMonitor* monitor) {
  RunRecord rec;
  rec.scenario = scenario.name;
  rec.config_text = serialize(scenario);
  rec.config_hash = git_blob_hash(rec.config_text);
  for (const auto& s : scenario.model.species) rec.species.push_back(s.tag);
  rec.outputs = scenario.outputs;
  rec.snapshots = traj.snapshots;
  if (scenario.outputs.diagnostics) {
    const auto target = stationary_target(scenario.model);
    rec.diagnostics = compute_diagnostics(scenario.model, rec.snapshots, target ? &*target : nullptr);
  }
  rec.steps = traj.steps;
  rec.halvings = traj.halvings;
  rec.monitor_violations = monitor ? monitor->violation_count() : 0;
  return rec;
}

void write_run(const RunRecord& rec, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(fmt::format("cannot create output directory '{}': {}", dir.string(), ec.message()));

  for (std::size_t s = 0; s < rec.species.size(); ++s) {
    const auto& tag = rec.species[s];
    if (rec.outputs.trajectories) {
      CsvFile f(dir / fmt::format("trajectories_{}.csv", tag));
      f.line("t,i,W");
      for (const auto& snap : rec.snapshots) {
        const auto& W = snap.species.at(s).W;
        for (std::size_t i = 0; i < W.size(); ++i) f.line(fmt::format("{},{},{}", num(snap.t), i, num(W[i])));
      }
      f.close();
    }
    if (rec.outputs.densities) {
      for (std::size_t k = 0; k < rec.snapshots.size(); ++k) {
        const auto& st = rec.snapshots[k].species.at(s);
        CsvFile f(dir / fmt::format("density_{}_{}.csv", tag, k));
        f.line("w_left,w_right,u");
        for (std::size_t i = 0; i + 1 < st.W.size(); ++i) {
          f.line(fmt::format("{},{},{}", num(st.W[i]), num(st.W[i + 1]), num(st.sigma_n / (st.W[i + 1] - st.W[i]))));
        }
        f.close();
      }
    }
  }

  if (rec.outputs.diagnostics) {
    CsvFile f(dir / "diagnostics.csv");
    f.line("t,species,m1,var,tv,w1_to_target");
    for (const auto& r : rec.diagnostics) {
      f.line(fmt::format("{},{},{},{},{},{}", num(r.t), r.species, num(r.m1), num(r.var), num(r.tv),
                         std::isnan(r.w1_to_target) ? std::string("nan") : num(r.w1_to_target)));
    }
    f.close();
  }

  nlohmann::ordered_json j;
  j["scenario"] = rec.scenario;
  j["config_hash"] = rec.config_hash;
  j["species"] = rec.species;
  j["snapshot_count"] = rec.snapshots.size();
  std::vector<std::string> times;
  for (const auto& s : rec.snapshots) times.push_back(num(s.t));
  j["snapshot_times"] = times;
  j["steps"] = rec.steps;
  j["halvings"] = rec.halvings;
  j["monitor_violations"] = rec.monitor_violations;
  j["config"] = rec.config_text;
  CsvFile f(dir / "run.json");
  f.line(j.dump(2));
  f.close();
}

}  // namespace opinionflow
