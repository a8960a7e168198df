#include "opinionflow/validate.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/format.h>

namespace opinionflow {

bool ValidationReport::ok() const {
  return std::none_of(violations.begin(), violations.end(),
                      [](const Violation& v) { return v.severity == Violation::Severity::Error; });
}

bool ValidationReport::mentions(const std::string& assumption) const {
  return std::any_of(violations.begin(), violations.end(),
                     [&](const Violation& v) { return v.assumption == assumption; });
}

std::string ValidationReport::to_string() const {
  std::string out;
  for (const auto& v : violations) {
    out += fmt::format("{} ({}){}: {}\n", v.severity == Violation::Severity::Error ? "error" : "warning",
                       v.assumption, v.species.empty() ? "" : " [species " + v.species + "]", v.message);
  }
  return out;
}

namespace {

bool is_leader(const std::string& tag) { return tag == "l" || tag == "r"; }

void check_species(const SpeciesSpec& s, ValidationReport& r) {
  auto add = [&](std::string assumption, std::string msg,
                 Violation::Severity sev = Violation::Severity::Error) {
    r.violations.push_back({std::move(assumption), s.tag, std::move(msg), sev});
  };

  if (!(s.sigma > 0.0) || !std::isfinite(s.sigma)) {
    add("In1", fmt::format("mass must be positive, got {}", s.sigma));
  } else if (std::abs(s.initial.mass() - s.sigma) > 1e-9 * s.sigma) {
    add("In1", fmt::format("initial density carries mass {:.17g}, species mass is {:.17g}", s.initial.mass(),
                           s.sigma));
  }

  const auto b = s.initial.bounds();
  if (!(b.min > 0.0)) {
    add("In2", "initial density is not bounded away from zero on I (m_u = 0); set a positive floor");
  }
  if (!std::isfinite(b.max)) add("In2", "initial density is unbounded (M_u = inf)");

  if (!(s.mobility.alpha > 0.0)) {
    add("D1", fmt::format("mobility exponent must be positive, got {}", s.mobility.alpha));
  } else if (s.mobility.alpha < 1.0) {
    add("D2", fmt::format("alpha = {} < 1: d/dw D^2 is unbounded near w = +-1", s.mobility.alpha));
  }

  if (s.nonlinearity.kind == DiffusionNonlinearity::Kind::PowerLaw && !(s.nonlinearity.gamma > 1.0)) {
    add("Dif", fmt::format("porous-medium exponent must exceed 1, got {}", s.nonlinearity.gamma));
  }

  if (!(s.half_lambda_sq >= 0.0) || !std::isfinite(s.half_lambda_sq)) {
    add("Dif", fmt::format("diffusion coefficient must be nonnegative, got {}", s.half_lambda_sq));
  }
  if (s.is_troll() && s.half_lambda_sq != 0.0) {
    add("troll-diffusion", fmt::format("trolls cannot diffuse their opinion (half_lambda_sq = {})", s.half_lambda_sq));
  }
}

}  // namespace

ValidationReport validate(const ModelSpec& spec) {
  ValidationReport r;
  if (spec.species.empty()) {
    r.violations.push_back({"structure", "", "model has no species", Violation::Severity::Error});
    return r;
  }

  std::set<std::string> tags;
  for (const auto& s : spec.species) {
    if (s.tag.empty() || !tags.insert(s.tag).second) {
      r.violations.push_back({"structure", s.tag, "species tags must be unique and non-empty",
                              Violation::Severity::Error});
    }
  }
  for (const auto& [key, k] : spec.kernels) {
    if (!tags.contains(key.first) || !tags.contains(key.second)) {
      r.violations.push_back({"structure", key.first,
                              fmt::format("kernel ({},{}) refers to an unknown species", key.first, key.second),
                              Violation::Severity::Error});
    }
  }

  for (const auto& s : spec.species) check_species(s, r);

  for (const auto& u : spec.species) {
    for (const auto& h : spec.species) {
      const auto& k = spec.kernel(u.tag, h.tag);
      if (k.kind == KernelKind::ScaledOneMinusWSq && !(k.scale >= 0.0)) {
        r.violations.push_back({"P", u.tag, fmt::format("kernel ({},{}) is negative (scale {})", u.tag, h.tag, k.scale),
                                Violation::Severity::Error});
      }
      if (std::isinf(kernel_constants(k).lip_d1)) {
        r.violations.push_back(
            {"P", u.tag,
             fmt::format("kernel ({},{}) = {} has a non-Lipschitz first partial; min-max bounds are not certified",
                         u.tag, h.tag, kernel_name(k.kind)),
             Violation::Severity::Warning});
      }
    }
  }

  // Leaders are not influenced by followers or trolls.
  const bool has_followers = tags.contains("f");
  for (const auto& u : spec.species) {
    if (!is_leader(u.tag)) continue;
    for (const char* other : {"f", "q"}) {
      if (tags.contains(other) && !spec.kernel(u.tag, other).is_zero()) {
        r.violations.push_back({"strong-leaders", u.tag,
                                fmt::format("P_{}{} must be zero: leaders are not affected by species '{}'", u.tag,
                                            other, other),
                                Violation::Severity::Error});
      }
    }
  }

  // Trolls interact with exactly one leader group.
  if (tags.contains(std::string(kTrollTag))) {
    std::size_t partners = 0;
    for (const auto& h : spec.species) {
      if (spec.kernel(kTrollTag, h.tag).is_zero()) continue;
      if (is_leader(h.tag)) {
        ++partners;
      } else {
        r.violations.push_back({"troll-interaction", std::string(kTrollTag),
                                fmt::format("trolls must not be influenced by species '{}'", h.tag),
                                Violation::Severity::Error});
      }
    }
    if (partners > 1) {
      r.violations.push_back({"troll-interaction", std::string(kTrollTag),
                              "trolls must follow a single reference leader group", Violation::Severity::Error});
    }
    if (has_followers && !(spec.kernel("f", kTrollTag) == spec.kernel("f", "f"))) {
      r.violations.push_back({"troll-interaction", "f",
                              "followers cannot distinguish trolls: P_fq must equal P_ff",
                              Violation::Severity::Warning});
    }
  }
  return r;
}

}  // namespace opinionflow
