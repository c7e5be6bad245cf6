#include "fuzzy/app/output.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace fuzzy::app {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  return cells;
}

double parse_double(const std::string& s) {
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc{} || ptr != s.data() + s.size()) throw std::invalid_argument("csv: bad number '" + s + "'");
  return x;
}

// Maps t in [0, 1] onto a dark-blue to yellow ramp.
std::string colour(double t) {
  t = std::clamp(t, 0.0, 1.0);
  const double stops[][3] = {{13, 8, 135}, {126, 3, 168}, {204, 71, 120}, {248, 149, 64}, {240, 249, 33}};
  const double x = t * 4.0;
  const auto k = std::min<std::size_t>(3, static_cast<std::size_t>(x));
  const double f = x - static_cast<double>(k);
  char buf[8];
  int rgb[3];
  for (int c = 0; c < 3; ++c) rgb[c] = static_cast<int>(std::lround(stops[k][c] + f * (stops[k + 1][c] - stops[k][c])));
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", rgb[0], rgb[1], rgb[2]);
  return buf;
}

}  // namespace

void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw std::runtime_error("cannot create output directory " + dir.string());
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::string format_double(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

void write_samples_csv(std::ostream& os, const SampleBatch& batch) {
  os << "U,V\n";
  for (const auto& s : batch.samples) os << format_double(s.U) << ',' << format_double(s.V) << '\n';
}

std::vector<UVSample> read_samples_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != "U,V") throw std::invalid_argument("samples csv: missing header");
  std::vector<UVSample> out;
  while (std::getline(is, line)) {
    const auto cells = split_csv_line(line);
    if (cells.size() != 2) throw std::invalid_argument("samples csv: expected two columns");
    out.push_back({parse_double(cells[0]), parse_double(cells[1])});
  }
  return out;
}

double HeatmapGrid::riemann_mass() const {
  const double du = u[1] - u[0];
  const double dv = v[1] - v[0];
  num::CompensatedSum s;
  for (double d : density) s += d;
  return s.value() * du * dv;
}

HeatmapGrid evaluate_heatmap(const GroundStateModel& model, const HeatmapSettings& settings) {
  HeatmapGrid g;
  g.u.resize(settings.u_points);
  g.v.resize(settings.v_points);
  for (std::size_t i = 0; i < settings.u_points; ++i)
    g.u[i] = settings.u_max * static_cast<double>(i) / static_cast<double>(settings.u_points - 1);
  for (std::size_t j = 0; j < settings.v_points; ++j)
    g.v[j] = settings.v_max * static_cast<double>(j) / static_cast<double>(settings.v_points - 1);
  g.density.reserve(settings.u_points * settings.v_points);
  for (double U : g.u)
    for (double V : g.v) g.density.push_back(pdf(model, U, V));
  return g;
}

void write_heatmap_csv(std::ostream& os, const HeatmapGrid& grid) {
  os << "U,V,density\n";
  for (std::size_t i = 0; i < grid.u.size(); ++i) {
    for (std::size_t j = 0; j < grid.v.size(); ++j) {
      os << format_double(grid.u[i]) << ',' << format_double(grid.v[j]) << ',' << format_double(grid.at(i, j))
         << '\n';
    }
  }
}

HeatmapGrid read_heatmap_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != "U,V,density") throw std::invalid_argument("heatmap csv: missing header");
  HeatmapGrid g;
  while (std::getline(is, line)) {
    const auto cells = split_csv_line(line);
    if (cells.size() != 3) throw std::invalid_argument("heatmap csv: expected three columns");
    const double U = parse_double(cells[0]);
    const double V = parse_double(cells[1]);
    if (g.u.empty() || g.u.back() != U) g.u.push_back(U);
    if (g.u.size() == 1) g.v.push_back(V);
    g.density.push_back(parse_double(cells[2]));
  }
  if (g.u.size() < 2 || g.v.size() < 2 || g.density.size() != g.u.size() * g.v.size()) {
    throw std::invalid_argument("heatmap csv: not a rectangular grid");
  }
  return g;
}

std::string heatmap_svg(const HeatmapGrid& grid) {
  const double width = 480.0;
  const double height = 480.0;
  const double margin = 60.0;
  const std::size_t nu = grid.u.size();
  const std::size_t nv = grid.v.size();
  const double u_max = grid.u.back();
  const double v_max = grid.v.back();
  const double cw = width / static_cast<double>(nu);
  const double ch = height / static_cast<double>(nv);
  const double peak = grid.at(0, 0) > 0.0 ? grid.at(0, 0) : *std::max_element(grid.density.begin(), grid.density.end());

  std::ostringstream os;
  os << std::fixed << std::setprecision(2);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width + 2 * margin << "\" height=\""
     << height + 2 * margin << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<g shape-rendering=\"crispEdges\">\n";
  for (std::size_t i = 0; i < nu; ++i) {
    for (std::size_t j = 0; j < nv; ++j) {
      const double d = grid.at(i, j);
      if (d <= 0.0) continue;
      const double x = margin + static_cast<double>(i) * cw;
      const double y = margin + height - static_cast<double>(j + 1) * ch;
      os << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cw + 0.01 << "\" height=\"" << ch + 0.01
         << "\" fill=\"" << colour(d / peak) << "\"/>\n";
    }
  }
  os << "</g>\n";

  // Boundary V = U^2.
  os << "<polyline fill=\"none\" stroke=\"white\" stroke-width=\"2\" points=\"";
  for (int k = 0; k <= 200; ++k) {
    const double U = u_max * k / 200.0;
    const double V = U * U;
    if (V > v_max) break;
    os << margin + U / u_max * width << ',' << margin + height - V / v_max * height << ' ';
  }
  const double u_edge = std::min(u_max, std::sqrt(v_max));
  os << margin + u_edge / u_max * width << ',' << margin + height - u_edge * u_edge / v_max * height;
  os << "\"/>\n";

  os << "<rect x=\"" << margin << "\" y=\"" << margin << "\" width=\"" << width << "\" height=\"" << height
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double x = margin + width * k / 4.0;
    const double y = margin + height - height * k / 4.0;
    os << "<text x=\"" << x << "\" y=\"" << margin + height + 18 << "\" text-anchor=\"middle\">"
       << std::setprecision(2) << u_max * k / 4.0 << "</text>\n";
    os << "<text x=\"" << margin - 8 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\">" << v_max * k / 4.0
       << "</text>\n";
  }
  os << "<text x=\"" << margin + width / 2 << "\" y=\"" << margin + height + 40 << "\" text-anchor=\"middle\">U</text>\n";
  os << "<text x=\"" << margin - 40 << "\" y=\"" << margin + height / 2 << "\" text-anchor=\"middle\">V</text>\n";
  os << "<text x=\"" << margin + width / 2 << "\" y=\"" << margin - 20
     << "\" text-anchor=\"middle\">ground-state density P(U, V), V &lt;= U^2</text>\n";
  os << "</svg>\n";
  return os.str();
}

std::string typical_svg(const EllipseGeometry& geom, double shape, std::size_t points) {
  const auto outline = boundary_polyline(geom, points);
  const double ratio = geom.b > 0.0 ? geom.a / geom.b : std::numeric_limits<double>::infinity();
  const double size = 520.0;
  const double scale = 0.45 * size / std::max(geom.a, 1e-300);
  const double cx = size / 2.0;
  const double cy = size / 2.0;

  std::ostringstream os;
  os << std::setprecision(6);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size + 40
     << "\" font-family=\"sans-serif\" font-size=\"14\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<polygon fill=\"#cfe0f5\" stroke=\"#1f4e8c\" stroke-width=\"2\" points=\"";
  for (const auto& p : outline) os << cx + scale * p.X << ',' << cy - scale * p.Y << ' ';
  os << "\"/>\n";
  os << "<line x1=\"" << cx - scale * geom.a << "\" y1=\"" << cy << "\" x2=\"" << cx + scale * geom.a << "\" y2=\""
     << cy << "\" stroke=\"#888\" stroke-dasharray=\"4 4\"/>\n";
  os << "<line x1=\"" << cx << "\" y1=\"" << cy - scale * geom.b << "\" x2=\"" << cx << "\" y2=\""
     << cy + scale * geom.b << "\" stroke=\"#888\" stroke-dasharray=\"4 4\"/>\n";
  os << std::fixed << std::setprecision(3);
  os << "<text x=\"" << cx << "\" y=\"" << size + 10 << "\" text-anchor=\"middle\">aspect ratio a/b = " << ratio
     << ", shape parameter S = " << shape << "</text>\n";
  os << "</svg>\n";
  return os.str();
}

void write_dmc_trace_csv(std::ostream& os, const dmc::DmcResult& result) {
  os << "step,phase,population,e_ref";
  if (result.guided) os << ",mixed";
  os << '\n';
  for (std::size_t k = 0; k < result.population.size(); ++k) {
    os << k << ',' << (k < result.equilibration_steps ? "equilibration" : "measurement") << ','
       << result.population[k] << ',' << format_double(result.e_ref_trace[k]);
    if (result.guided) os << ',' << format_double(result.mixed_trace[k]);
    os << '\n';
  }
}

void write_dmc_histogram_csv(std::ostream& os, const dmc::Histogram2D& hist) {
  os << "u_lo,u_hi,v_lo,v_hi,mass\n";
  for (std::size_t iu = 0; iu < hist.spec.u_bins; ++iu) {
    for (std::size_t iv = 0; iv < hist.spec.v_bins; ++iv) {
      os << format_double(hist.u_width() * static_cast<double>(iu)) << ','
         << format_double(hist.u_width() * static_cast<double>(iu + 1)) << ','
         << format_double(hist.v_width() * static_cast<double>(iv)) << ','
         << format_double(hist.v_width() * static_cast<double>(iv + 1)) << ',' << format_double(hist.at(iu, iv))
         << '\n';
    }
  }
}

}  // namespace fuzzy::app
