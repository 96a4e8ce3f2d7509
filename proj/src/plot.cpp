#include "gwreg/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

// Static SVG emission for the per-group regret curves: algorithm and baseline
// regret against the fraction of the group seen, averaged across seeds.

namespace gwreg {

namespace fs = std::filesystem;

namespace {

struct Curve {
  std::vector<double> frac;
  std::vector<double> alg;
  std::vector<double> baseline;
};

Curve read_curve(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("plot: cannot read '" + path.string() + "'");
  Curve curve;
  std::string line;
  bool header_seen = false;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;  // column order is fixed by the writer
      continue;
    }
    std::istringstream row(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(row, cell, ',')) cells.push_back(cell);
    if (cells.size() != 5) {
      throw DataError("plot: bad row in '" + path.string() + "' line " +
                      std::to_string(line_no));
    }
    try {
      curve.frac.push_back(std::stod(cells[2]));
      curve.alg.push_back(std::stod(cells[3]));
      curve.baseline.push_back(std::stod(cells[4]));
    } catch (const std::exception&) {
      throw DataError("plot: unparseable row in '" + path.string() + "' line " +
                      std::to_string(line_no));
    }
  }
  if (curve.frac.empty()) {
    throw DataError("plot: no data rows in '" + path.string() + "'");
  }
  return curve;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (const char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

// round a span to a tidy tick step (1/2/5 times a power of ten)
double nice_step(double span, int target_ticks) {
  const double raw = span / std::max(1, target_ticks);
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (const double m : {1.0, 2.0, 5.0, 10.0}) {
    if (raw <= m * mag) return m * mag;
  }
  return 10.0 * mag;
}

void render_svg(std::ostream& out, const std::string& title, const Curve& curve) {
  const double width = 720, height = 480;
  const double left = 80, right = 24, top = 48, bottom = 64;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;

  double ymin = 0.0, ymax = 0.0;
  for (size_t i = 0; i < curve.frac.size(); ++i) {
    ymin = std::min({ymin, curve.alg[i], curve.baseline[i]});
    ymax = std::max({ymax, curve.alg[i], curve.baseline[i]});
  }
  if (ymax == ymin) ymax = ymin + 1.0;
  const double pad = 0.05 * (ymax - ymin);
  ymin -= pad;
  ymax += pad;

  auto sx = [&](double frac) { return left + frac * plot_w; };
  auto sy = [&](double y) {
    return top + (ymax - y) / (ymax - ymin) * plot_h;
  };
  auto polyline = [&](const std::vector<double>& ys, const char* color) {
    out << "  <polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.5\" points=\"";
    for (size_t i = 0; i < ys.size(); ++i) {
      if (i) out << ' ';
      out << num(sx(curve.frac[i])) << ',' << num(sy(ys[i]));
    }
    out << "\"/>\n";
  };

  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << ' '
      << height << "\">\n";
  out << "  <rect width=\"" << width << "\" height=\"" << height
      << "\" fill=\"white\"/>\n";
  out << "  <text x=\"" << width / 2 << "\" y=\"28\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"16\">"
      << xml_escape(title) << "</text>\n";

  // frame
  out << "  <rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << plot_w
      << "\" height=\"" << plot_h
      << "\" fill=\"none\" stroke=\"#444444\" stroke-width=\"1\"/>\n";

  // x ticks at fixed fractions
  for (int i = 0; i <= 5; ++i) {
    const double frac = i / 5.0;
    out << "  <line x1=\"" << num(sx(frac)) << "\" y1=\"" << top + plot_h
        << "\" x2=\"" << num(sx(frac)) << "\" y2=\"" << top + plot_h + 5
        << "\" stroke=\"#444444\"/>\n";
    out << "  <text x=\"" << num(sx(frac)) << "\" y=\"" << top + plot_h + 20
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"11\">"
        << num(frac) << "</text>\n";
  }
  // y ticks on a tidy grid
  const double step = nice_step(ymax - ymin, 5);
  for (double y = std::ceil(ymin / step) * step; y <= ymax + 1e-12; y += step) {
    out << "  <line x1=\"" << left - 5 << "\" y1=\"" << num(sy(y)) << "\" x2=\""
        << left << "\" y2=\"" << num(sy(y)) << "\" stroke=\"#444444\"/>\n";
    out << "  <text x=\"" << left - 9 << "\" y=\"" << num(sy(y) + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
        << num(std::abs(y) < 1e-12 ? 0.0 : y) << "</text>\n";
  }
  if (ymin < 0.0 && ymax > 0.0) {
    out << "  <line x1=\"" << left << "\" y1=\"" << num(sy(0.0)) << "\" x2=\""
        << left + plot_w << "\" y2=\"" << num(sy(0.0))
        << "\" stroke=\"#bbbbbb\" stroke-dasharray=\"4 3\"/>\n";
  }

  polyline(curve.baseline, "#1f77b4");
  polyline(curve.alg, "#ff7f0e");

  // legend
  const double lx = left + 12, ly = top + 14;
  out << "  <line x1=\"" << lx << "\" y1=\"" << ly << "\" x2=\"" << lx + 26
      << "\" y2=\"" << ly << "\" stroke=\"#1f77b4\" stroke-width=\"1.5\"/>\n";
  out << "  <text x=\"" << lx + 32 << "\" y=\"" << ly + 4
      << "\" font-family=\"sans-serif\" font-size=\"12\">baseline_regret"
         "</text>\n";
  out << "  <line x1=\"" << lx << "\" y1=\"" << ly + 18 << "\" x2=\"" << lx + 26
      << "\" y2=\"" << ly + 18
      << "\" stroke=\"#ff7f0e\" stroke-width=\"1.5\"/>\n";
  out << "  <text x=\"" << lx + 32 << "\" y=\"" << ly + 22
      << "\" font-family=\"sans-serif\" font-size=\"12\">alg_regret</text>\n";

  // axis labels matching the curve CSV columns
  out << "  <text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 18
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"13\">frac_of_group_seen</text>\n";
  out << "  <text x=\"20\" y=\"" << top + plot_h / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"13\" transform=\"rotate(-90 20 "
      << top + plot_h / 2 << ")\">regret</text>\n";
  out << "</svg>\n";
}

}  // namespace

void cmd_plot(const std::string& run_dir) {
  const fs::path curves_dir = fs::path(run_dir) / "curves";
  if (!fs::is_directory(curves_dir)) {
    throw DataError("plot: no curves directory under '" + run_dir + "'");
  }
  std::vector<fs::path> seed_dirs;
  for (const auto& entry : fs::directory_iterator(curves_dir)) {
    if (entry.is_directory()) seed_dirs.push_back(entry.path());
  }
  if (seed_dirs.empty()) throw DataError("plot: no per-seed curve directories");
  std::sort(seed_dirs.begin(), seed_dirs.end());

  std::vector<fs::path> group_files;
  for (const auto& entry : fs::directory_iterator(seed_dirs.front())) {
    if (entry.path().extension() == ".csv") group_files.push_back(entry.path());
  }
  if (group_files.empty()) throw DataError("plot: no curve files");
  std::sort(group_files.begin(), group_files.end());

  const fs::path plots_dir = fs::path(run_dir) / "plots";
  fs::create_directories(plots_dir);

  for (const auto& file : group_files) {
    const std::string name = file.stem().string();
    Curve mean;
    size_t n_seeds = 0;
    for (const auto& dir : seed_dirs) {
      const fs::path path = dir / file.filename();
      if (!fs::exists(path)) {
        throw DataError("plot: '" + path.string() + "' missing (seed dirs disagree)");
      }
      Curve c = read_curve(path);
      if (mean.frac.empty()) {
        mean = c;
      } else {
        if (c.frac.size() != mean.frac.size()) {
          throw DataError("plot: curve length mismatch for group '" + name + "'");
        }
        for (size_t i = 0; i < c.frac.size(); ++i) {
          mean.alg[i] += c.alg[i];
          mean.baseline[i] += c.baseline[i];
        }
      }
      ++n_seeds;
    }
    for (size_t i = 0; i < mean.frac.size(); ++i) {
      mean.alg[i] /= static_cast<double>(n_seeds);
      mean.baseline[i] /= static_cast<double>(n_seeds);
    }

    std::ofstream out(plots_dir / (name + ".svg"), std::ios::binary);
    if (!out) {
      throw DataError("plot: cannot write '" +
                      (plots_dir / (name + ".svg")).string() + "'");
    }
    render_svg(out, name, mean);
  }
}

}  // namespace gwreg
