// SVG rendering of a run directory: a density waterfall per species and the
// particle trajectories with the mean-opinion overlay.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <json.hpp>

#include "cli.hpp"
#include "opinionflow/error.hpp"
#include "opinionflow/model.hpp"

namespace opinionflow::cli {

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 500.0;
constexpr double kMargin = 50.0;
constexpr std::size_t kMaxCurves = 40;
constexpr std::size_t kMaxBands = 30;

using Table = std::vector<std::vector<double>>;

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(fmt::format("cannot read '{}'", p.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Numeric CSV with a header. Column `text_col` is collected into `text` and
// returned as NaN.
Table read_csv(const std::filesystem::path& p, std::size_t expected_cols, std::size_t text_col = SIZE_MAX,
               std::vector<std::string>* text = nullptr) {
  std::istringstream in(read_file(p));
  std::string line;
  if (!std::getline(in, line)) throw Error(fmt::format("'{}' is empty", p.string()));
  Table rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<double> row;
    std::size_t pos = 0;
    for (std::size_t c = 0; c < expected_cols; ++c) {
      const auto comma = line.find(',', pos);
      const auto cell = line.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
      if (c == text_col) {
        if (text) text->push_back(cell);
        row.push_back(std::nan(""));
      } else {
        try {
          std::size_t used = 0;
          row.push_back(cell == "nan" ? std::nan("") : std::stod(cell, &used));
          if (cell != "nan" && used != cell.size()) throw std::invalid_argument(cell);
        } catch (const std::exception&) {
          throw Error(fmt::format("'{}' line {}: bad value '{}'", p.string(), line_no, cell));
        }
      }
      if (comma == std::string::npos && c + 1 < expected_cols) {
        throw Error(fmt::format("'{}' line {}: expected {} columns", p.string(), line_no, expected_cols));
      }
      pos = comma + 1;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

struct Frame {
  double x0, x1, y0, y1;

  double px(double x) const { return kMargin + (x - x0) / (x1 - x0) * (kWidth - 2 * kMargin); }
  double py(double y) const { return kHeight - kMargin - (y - y0) / (y1 - y0) * (kHeight - 2 * kMargin); }
};

class Svg {
public:
  Svg(const std::string& title) {
    body_ += fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n"
        "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        "<text x=\"{}\" y=\"25\" font-family=\"sans-serif\" font-size=\"16\">{}</text>\n",
        kWidth, kHeight, kWidth, kHeight, kMargin, title);
  }

  void axes(const Frame& f, const std::string& xlabel, const std::string& ylabel) {
    body_ += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n",
                         kMargin, kMargin, kWidth - 2 * kMargin, kHeight - 2 * kMargin);
    body_ += fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"12\">{:.3g}</text>\n", kMargin, kHeight - kMargin + 15,
                         f.x0);
    body_ += fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"end\">{:.3g}</text>\n",
                         kWidth - kMargin, kHeight - kMargin + 15, f.x1);
    body_ += fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"end\">{:.3g}</text>\n", kMargin - 4,
                         kHeight - kMargin, f.y0);
    body_ += fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"end\">{:.3g}</text>\n", kMargin - 4,
                         kMargin + 10, f.y1);
    body_ += fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"13\" text-anchor=\"middle\">{}</text>\n", kWidth / 2,
                         kHeight - 12, xlabel);
    body_ += fmt::format("<text x=\"15\" y=\"{}\" font-size=\"13\" transform=\"rotate(-90 15 {})\" "
                         "text-anchor=\"middle\">{}</text>\n",
                         kHeight / 2, kHeight / 2, ylabel);
  }

  void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& color, const std::string& cls,
                double width = 1.0, bool dashed = false) {
    if (pts.empty()) return;
    std::string s;
    for (const auto& [x, y] : pts) s += fmt::format("{:.2f},{:.2f} ", x, y);
    body_ += fmt::format("<polyline class=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"{}\"{} points=\"{}\"/>\n",
                         cls, color, width, dashed ? " stroke-dasharray=\"4,3\"" : "", s);
  }

  void star(double x, double y, const std::string& color) {
    body_ += fmt::format(
        "<text class=\"mean-opinion\" x=\"{:.2f}\" y=\"{:.2f}\" fill=\"{}\" font-size=\"14\" "
        "text-anchor=\"middle\" dominant-baseline=\"central\">*</text>\n",
        x, y, color);
  }

  void legend(std::size_t row, const std::string& label, const std::string& color) {
    const double y = kMargin + 15 + 15 * static_cast<double>(row);
    body_ += fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"12\" fill=\"{}\">{}</text>\n", kWidth - kMargin - 120, y,
                         color, label);
  }

  void save(const std::filesystem::path& p) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(fmt::format("cannot write '{}'", p.string()));
    out << body_ << "</svg>\n";
  }

private:
  std::string body_;
};

std::string series_color(const std::string& tag, std::size_t index) {
  if (tag == kTrollTag) return "#2ca02c";
  static const char* palette[] = {"#000000", "#d62728", "#1f77b4", "#9467bd", "#8c564b", "#ff7f0e"};
  return palette[index % 6];
}

// Particle index -> list of (t, W), for a subsample of particles.
std::map<std::size_t, std::vector<std::pair<double, double>>> load_paths(const std::filesystem::path& p) {
  const auto rows = read_csv(p, 3);
  std::size_t n_max = 0;
  for (const auto& r : rows) n_max = std::max(n_max, static_cast<std::size_t>(r[1]));
  const std::size_t stride = std::max<std::size_t>(1, (n_max + 1) / kMaxCurves);
  std::map<std::size_t, std::vector<std::pair<double, double>>> paths;
  for (const auto& r : rows) {
    const auto i = static_cast<std::size_t>(r[1]);
    if (i % stride == 0 || i == n_max) paths[i].push_back({r[0], r[2]});
  }
  return paths;
}

void draw_paths(Svg& svg, const Frame& f, const std::map<std::size_t, std::vector<std::pair<double, double>>>& paths,
                const std::string& color, const std::string& cls, bool dashed) {
  for (const auto& [i, pts] : paths) {
    std::vector<std::pair<double, double>> px;
    for (const auto& [t, w] : pts) px.push_back({f.px(t), f.py(w)});
    svg.polyline(px, color, cls, 0.8, dashed);
  }
}

}  // namespace

std::vector<std::filesystem::path> emit_plots(const std::filesystem::path& dir) {
  const auto meta = nlohmann::json::parse(read_file(dir / "run.json"), nullptr, false);
  if (meta.is_discarded() || !meta.contains("species")) {
    throw Error(fmt::format("'{}' is not a valid run.json", (dir / "run.json").string()));
  }
  const auto tags = meta["species"].get<std::vector<std::string>>();

  // Mean opinion per species (may be empty).
  std::map<std::string, std::vector<std::pair<double, double>>> m1;
  if (std::filesystem::exists(dir / "diagnostics.csv")) {
    std::vector<std::string> names;
    const auto rows = read_csv(dir / "diagnostics.csv", 6, 1, &names);
    for (std::size_t k = 0; k < rows.size(); ++k) m1[names[k]].push_back({rows[k][0], rows[k][2]});
  }

  std::vector<std::filesystem::path> written;
  double t_max = 0.0;
  std::map<std::string, std::map<std::size_t, std::vector<std::pair<double, double>>>> all_paths;

  for (std::size_t s = 0; s < tags.size(); ++s) {
    const auto& tag = tags[s];
    const auto color = series_color(tag, s);
    const bool troll = tag == kTrollTag;

    // Density waterfall.
    std::vector<Table> frames;
    for (std::size_t k = 0;; ++k) {
      const auto p = dir / fmt::format("density_{}_{}.csv", tag, k);
      if (!std::filesystem::exists(p)) break;
      frames.push_back(read_csv(p, 3));
    }
    if (!frames.empty()) {
      const std::size_t stride = std::max<std::size_t>(1, frames.size() / kMaxBands);
      double u_max = 0.0;
      for (const auto& fr : frames) {
        for (const auto& r : fr) u_max = std::max(u_max, r[2]);
      }
      const std::size_t bands = (frames.size() - 1) / stride + 1;
      const double band = 3.0;  // height of one density curve in units of the offset
      Frame f{-1.0, 1.0, 0.0, static_cast<double>(bands - 1) + band};
      Svg svg(fmt::format("density evolution, species {}", tag));
      svg.axes(f, "opinion w", "snapshot (offset), density");
      std::size_t band_index = 0;
      for (std::size_t k = 0; k < frames.size(); k += stride, ++band_index) {
        std::vector<std::pair<double, double>> pts;
        const double base = static_cast<double>(band_index);
        for (const auto& r : frames[k]) {
          const double y = base + band * (u_max > 0.0 ? std::min(r[2], u_max) / u_max : 0.0);
          pts.push_back({f.px(r[0]), f.py(y)});
          pts.push_back({f.px(r[1]), f.py(y)});
        }
        svg.polyline(pts, color, troll ? "troll density" : "density");
      }
      const auto out = dir / fmt::format("density_{}.svg", tag);
      svg.save(out);
      written.push_back(out);
    }

    // Trajectories.
    const auto traj_path = dir / fmt::format("trajectories_{}.csv", tag);
    if (!std::filesystem::exists(traj_path)) continue;
    auto paths = load_paths(traj_path);
    for (const auto& [i, pts] : paths) {
      if (!pts.empty()) t_max = std::max(t_max, pts.back().first);
    }
    const Frame f{0.0, t_max > 0.0 ? t_max : 1.0, -1.0, 1.0};
    Svg svg(fmt::format("opinion trajectories, species {}", tag));
    svg.axes(f, "time t", "opinion w");
    draw_paths(svg, f, paths, color, troll ? "troll trajectory" : "trajectory", troll);
    for (const auto& [t, v] : m1[tag]) svg.star(f.px(t), f.py(v), "#e377c2");
    const auto out = dir / fmt::format("trajectories_{}.svg", tag);
    svg.save(out);
    written.push_back(out);
    all_paths[tag] = std::move(paths);
  }

  if (!all_paths.empty()) {
    const Frame f{0.0, t_max > 0.0 ? t_max : 1.0, -1.0, 1.0};
    Svg svg("opinion trajectories, all species");
    svg.axes(f, "time t", "opinion w");
    for (std::size_t s = 0; s < tags.size(); ++s) {
      const auto it = all_paths.find(tags[s]);
      if (it == all_paths.end()) continue;
      const bool troll = tags[s] == kTrollTag;
      const auto color = series_color(tags[s], s);
      draw_paths(svg, f, it->second, color, troll ? "troll trajectory" : "trajectory", troll);
      svg.legend(s, troll ? "q (trolls)" : tags[s], color);
    }
    const auto out = dir / "trajectories_all.svg";
    svg.save(out);
    written.push_back(out);
  }
  return written;
}

}  // namespace opinionflow::cli
