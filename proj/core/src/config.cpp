#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "opinionflow/error.hpp"
#include "opinionflow/scenario.hpp"

namespace opinionflow {

namespace {

std::string num(double v) { return fmt::format("{:.17g}", v); }

std::string kernel_text(const CompromiseKernel& k) {
  std::string s(kernel_name(k.kind));
  if (k.kind == KernelKind::ScaledOneMinusWSq) s += ":" + num(k.scale);
  return s;
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto next = s.find(sep, pos);
    out.push_back(trim(s.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos)));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

struct Entry {
  std::string value;
  std::size_t line = 0;
};

// One [section]: ordered key -> value with line numbers.
struct Section {
  std::string name;
  std::size_t line = 0;
  std::map<std::string, Entry> entries;
  std::vector<std::string> order;
};

class Reader {
public:
  explicit Reader(const Section& s) : s_(s) {}

  bool has(const std::string& key) const { return s_.entries.count(key) > 0; }

  const Entry& entry(const std::string& key) const {
    used_.insert(key);
    const auto it = s_.entries.find(key);
    if (it == s_.entries.end()) {
      throw ConfigError(fmt::format("[{}] is missing required key '{}'", s_.name, key), s_.line, key);
    }
    return it->second;
  }

  std::string str(const std::string& key) const { return entry(key).value; }

  double number(const std::string& key) const {
    const auto& e = entry(key);
    return parse_number(e.value, e.line, key);
  }

  double number_or(const std::string& key, double fallback) const { return has(key) ? number(key) : fallback; }

  std::size_t count(const std::string& key) const {
    const auto& e = entry(key);
    std::size_t v = 0;
    const auto* end = e.value.data() + e.value.size();
    const auto [p, ec] = std::from_chars(e.value.data(), end, v);
    if (ec != std::errc() || p != end) {
      throw ConfigError(fmt::format("'{}' is not a nonnegative integer", e.value), e.line, key);
    }
    return v;
  }

  bool boolean(const std::string& key) const {
    const auto& e = entry(key);
    if (e.value == "true") return true;
    if (e.value == "false") return false;
    throw ConfigError(fmt::format("'{}' is not true/false", e.value), e.line, key);
  }

  // Every key present must have been read.
  void finish() const {
    for (const auto& key : s_.order) {
      if (!used_.count(key)) {
        throw ConfigError(fmt::format("unknown key '{}' in [{}]", key, s_.name), s_.entries.at(key).line, key);
      }
    }
  }

  static double parse_number(std::string_view text, std::size_t line, const std::string& key) {
    double v = 0.0;
    const auto* end = text.data() + text.size();
    const auto [p, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || p != end) throw ConfigError(fmt::format("'{}' is not a number", text), line, key);
    return v;
  }

private:
  const Section& s_;
  mutable std::set<std::string> used_;
};

std::vector<Section> tokenize(std::string_view text) {
  std::vector<Section> sections;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    const auto line = trim(raw);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("unterminated section header", line_no, std::string(line));
      const auto name = std::string(trim(line.substr(1, line.size() - 2)));
      for (const auto& s : sections) {
        if (s.name == name) throw ConfigError(fmt::format("duplicate section [{}]", name), line_no, name);
      }
      sections.push_back({name, line_no, {}, {}});
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError("expected 'key = value'", line_no, std::string(line));
    const auto key = std::string(trim(line.substr(0, eq)));
    const auto value = std::string(trim(line.substr(eq + 1)));
    if (sections.empty()) throw ConfigError("key outside of any section", line_no, key);
    auto& sec = sections.back();
    if (key.empty()) throw ConfigError("empty key", line_no, key);
    if (sec.entries.count(key)) throw ConfigError(fmt::format("duplicate key in [{}]", sec.name), line_no, key);
    sec.entries.emplace(key, Entry{value, line_no});
    sec.order.push_back(key);
  }
  return sections;
}

InitialDensity parse_initial(const Reader& r, double mass) {
  const auto& kind = r.entry("initial");
  const double floor = r.number_or("floor", 0.0);
  try {
    if (kind.value == "uniform") return InitialDensity::uniform(mass);
    if (kind.value == "mixture") {
      const auto& e = r.entry("mixture");
      std::vector<GaussianComponent> comps;
      for (auto part : split(e.value, ',')) {
        const auto f = split(part, ':');
        if (f.size() != 3) throw ConfigError("mixture component must be weight:center:std", e.line, "mixture");
        comps.push_back({Reader::parse_number(f[0], e.line, "mixture"), Reader::parse_number(f[1], e.line, "mixture"),
                         Reader::parse_number(f[2], e.line, "mixture")});
      }
      return InitialDensity::gaussian_mixture(std::move(comps), floor);
    }
    if (kind.value == "tabulated") {
      const auto& e = r.entry("values");
      std::vector<double> vals;
      for (auto part : split(e.value, ',')) vals.push_back(Reader::parse_number(part, e.line, "values"));
      return InitialDensity::tabulated(std::move(vals), floor);
    }
  } catch (const DomainError& ex) {
    throw ConfigError(ex.what(), kind.line, "initial");
  }
  throw ConfigError(fmt::format("unknown initial density '{}' (uniform|mixture|tabulated)", kind.value), kind.line,
                    "initial");
}

SpeciesSpec parse_species(const Section& sec, std::string tag) {
  Reader r(sec);
  SpeciesSpec s;
  s.tag = std::move(tag);
  s.sigma = r.number("mass");
  s.half_lambda_sq = r.number_or("half_lambda_sq", 0.0);
  s.mobility.alpha = r.number_or("alpha", 1.0);
  const std::string nl = r.has("nonlinearity") ? r.str("nonlinearity") : "linear";
  if (nl == "linear") {
    s.nonlinearity = DiffusionNonlinearity::linear();
  } else if (nl == "power_law") {
    s.nonlinearity = DiffusionNonlinearity::power_law(r.number("gamma"));
  } else {
    throw ConfigError(fmt::format("unknown nonlinearity '{}' (linear|power_law)", nl), r.entry("nonlinearity").line,
                      "nonlinearity");
  }
  s.initial = parse_initial(r, s.sigma);
  r.finish();
  return s;
}

CompromiseKernel parse_kernel(const Entry& e, const std::string& key) {
  const auto parts = split(e.value, ':');
  const auto kind = kernel_kind_from_name(parts[0]);
  if (!kind) throw ConfigError(fmt::format("unknown kernel kind '{}'", parts[0]), e.line, key);
  if (*kind == KernelKind::ScaledOneMinusWSq) {
    if (parts.size() != 2) throw ConfigError("scaled_one_minus_w_sq needs a scale, e.g. scaled_one_minus_w_sq:0.001", e.line, key);
    return CompromiseKernel::scaled_one_minus_w_sq(Reader::parse_number(parts[1], e.line, key));
  }
  if (parts.size() != 1) throw ConfigError(fmt::format("kernel '{}' takes no parameter", parts[0]), e.line, key);
  return {*kind, 1.0};
}

}  // namespace

std::string serialize(const Scenario& s) {
  std::string out;
  out += "[scenario]\n";
  out += fmt::format("name = {}\n", s.name);
  out += fmt::format("particles = {}\n", s.N);

  for (const auto& sp : s.model.species) {
    out += fmt::format("\n[species.{}]\n", sp.tag);
    out += fmt::format("mass = {}\n", num(sp.sigma));
    out += fmt::format("half_lambda_sq = {}\n", num(sp.half_lambda_sq));
    out += fmt::format("alpha = {}\n", num(sp.mobility.alpha));
    if (sp.nonlinearity.kind == DiffusionNonlinearity::Kind::PowerLaw) {
      out += "nonlinearity = power_law\n";
      out += fmt::format("gamma = {}\n", num(sp.nonlinearity.gamma));
    } else {
      out += "nonlinearity = linear\n";
    }
    const auto& init = sp.initial;
    switch (init.kind()) {
      case InitialDensity::Kind::Uniform:
        out += "initial = uniform\n";
        break;
      case InitialDensity::Kind::GaussianMixture: {
        out += "initial = mixture\n";
        std::vector<std::string> parts;
        for (const auto& c : init.components()) {
          parts.push_back(fmt::format("{}:{}:{}", num(c.weight), num(c.center), num(c.std)));
        }
        out += fmt::format("mixture = {}\n", fmt::join(parts, ", "));
        out += fmt::format("floor = {}\n", num(init.floor()));
        break;
      }
      case InitialDensity::Kind::TabulatedPositive: {
        out += "initial = tabulated\n";
        std::vector<std::string> parts;
        for (double v : init.cell_values()) parts.push_back(num(v));
        out += fmt::format("values = {}\n", fmt::join(parts, ", "));
        out += fmt::format("floor = {}\n", num(init.floor()));
        break;
      }
    }
  }

  out += "\n[kernels]\n";
  for (const auto& u : s.model.species) {
    for (const auto& h : s.model.species) {
      out += fmt::format("{},{} = {}\n", u.tag, h.tag, kernel_text(s.model.kernel(u.tag, h.tag)));
    }
  }

  const auto& ic = s.integrator;
  out += "\n[integrator]\n";
  out += fmt::format("scheme = {}\n", ic.scheme == Scheme::RK4 ? "rk4" : "euler");
  if (const auto* f = std::get_if<FixedStep>(&ic.dt_policy)) {
    out += fmt::format("dt = {}\n", num(f->dt));
  } else {
    out += fmt::format("c_cfl = {}\n", num(std::get<AdaptiveSpacing>(ic.dt_policy).c_cfl));
  }
  out += fmt::format("t_final = {}\n", num(ic.t_final));
  out += fmt::format("snapshot_stride = {}\n", ic.snapshot_stride);
  out += fmt::format("snapshot_interval = {}\n", num(ic.snapshot_interval));

  out += "\n[outputs]\n";
  out += fmt::format("trajectories = {}\n", s.outputs.trajectories);
  out += fmt::format("densities = {}\n", s.outputs.densities);
  out += fmt::format("diagnostics = {}\n", s.outputs.diagnostics);
  return out;
}

LoadedConfig parse_config(std::string_view text, std::string_view name) {
  const auto sections = tokenize(text);
  LoadedConfig cfg;
  Scenario& sc = cfg.scenario;
  sc.name = std::string(name);

  const Section* kernels = nullptr;
  for (const auto& sec : sections) {
    if (sec.name == "scenario") {
      Reader r(sec);
      if (r.has("name")) sc.name = r.str("name");
      if (r.has("particles")) sc.N = r.count("particles");
      r.finish();
    } else if (sec.name.rfind("species.", 0) == 0) {
      auto tag = sec.name.substr(8);
      if (tag.empty() || tag.find_first_of(", \t") != std::string::npos) {
        throw ConfigError(fmt::format("invalid species tag '{}'", tag), sec.line, sec.name);
      }
      sc.model.species.push_back(parse_species(sec, std::move(tag)));
    } else if (sec.name == "kernels") {
      kernels = &sec;
    } else if (sec.name == "integrator") {
      Reader r(sec);
      auto& ic = sc.integrator;
      if (r.has("scheme")) {
        const auto scheme = r.str("scheme");
        if (scheme == "rk4") {
          ic.scheme = Scheme::RK4;
        } else if (scheme == "euler") {
          ic.scheme = Scheme::ExplicitEuler;
        } else {
          throw ConfigError(fmt::format("unknown scheme '{}' (euler|rk4)", scheme), r.entry("scheme").line, "scheme");
        }
      }
      if (r.has("dt") && r.has("c_cfl")) throw ConfigError("give either dt or c_cfl, not both", r.entry("dt").line, "dt");
      if (r.has("dt")) ic.dt_policy = FixedStep{r.number("dt")};
      if (r.has("c_cfl")) ic.dt_policy = AdaptiveSpacing{r.number("c_cfl")};
      ic.t_final = r.number_or("t_final", ic.t_final);
      if (r.has("snapshot_stride")) ic.snapshot_stride = r.count("snapshot_stride");
      ic.snapshot_interval = r.number_or("snapshot_interval", ic.snapshot_interval);
      r.finish();
    } else if (sec.name == "outputs") {
      Reader r(sec);
      if (r.has("trajectories")) sc.outputs.trajectories = r.boolean("trajectories");
      if (r.has("densities")) sc.outputs.densities = r.boolean("densities");
      if (r.has("diagnostics")) sc.outputs.diagnostics = r.boolean("diagnostics");
      r.finish();
    } else {
      throw ConfigError(fmt::format("unknown section [{}]", sec.name), sec.line, sec.name);
    }
  }
  if (sc.model.species.empty()) throw ConfigError("config defines no [species.<tag>] section", 0, "");

  if (kernels) {
    for (const auto& key : kernels->order) {
      const auto& e = kernels->entries.at(key);
      const auto pair = split(key, ',');
      if (pair.size() != 2) throw ConfigError("kernel key must be '<u>,<h>'", e.line, key);
      for (auto tag : pair) {
        if (!sc.model.index_of(tag)) throw ConfigError(fmt::format("kernel refers to unknown species '{}'", tag), e.line, key);
      }
      sc.model.set_kernel(pair[0], pair[1], parse_kernel(e, key));
    }
  }
  for (const auto& u : sc.model.species) {
    for (const auto& h : sc.model.species) {
      if (!sc.model.kernels.count({u.tag, h.tag})) {
        cfg.report.violations.push_back({"P", u.tag, fmt::format("kernel {},{} not given; defaults to zero", u.tag, h.tag),
                                         Violation::Severity::Warning});
      }
    }
  }

  const auto v = validate(sc.model);
  cfg.report.violations.insert(cfg.report.violations.end(), v.violations.begin(), v.violations.end());
  return cfg;
}

LoadedConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(fmt::format("cannot open config file '{}'", path.string()), 0, "");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.stem().string());
}

}  // namespace opinionflow
