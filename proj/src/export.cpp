#include "stargeo/export.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "stargeo/error.hpp"

namespace stargeo {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

void boundary_rows(const StarBody& k, const std::string& prefix, std::ostringstream& out) {
  const auto& grid = k.grid();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Vec& u = grid.direction(i);
    const double r = k.profile()[i];
    out << prefix;
    if (grid.dim() == 2) {
      out << format_double(grid.angle(i)) << ',' << format_double(r) << ','
          << format_double(r * u[0]) << ',' << format_double(r * u[1]) << '\n';
    } else {
      out << format_double(r * u[0]) << ',' << format_double(r * u[1]) << ','
          << format_double(r * u[2]) << ',' << format_double(r) << '\n';
    }
  }
}

const char* header(int dim) { return dim == 2 ? "theta,rho,x,y" : "x,y,z,rho"; }

}  // namespace

std::string boundary_csv(const StarBody& k) {
  std::ostringstream out;
  out << header(k.dim()) << '\n';
  boundary_rows(k, "", out);
  return out.str();
}

std::string bodies_csv(const std::vector<StarBody>& bodies) {
  std::ostringstream out;
  if (bodies.empty()) return "body\n";
  out << "body," << header(bodies.front().dim()) << '\n';
  for (const auto& b : bodies) boundary_rows(b, b.label() + ",", out);
  return out.str();
}

std::string erm_trace_csv(const std::vector<ErmTraceRow>& trace) {
  std::ostringstream out;
  out << "step,loss,volume,radial_gap\n";
  for (const auto& r : trace) {
    out << r.step << ',' << format_double(r.loss) << ',' << format_double(r.volume) << ','
        << format_double(r.radial_gap) << '\n';
  }
  return out.str();
}

std::string train_trace_csv(const std::vector<TrainTraceRow>& trace) {
  std::ostringstream out;
  out << "step,loss,critic,penalty\n";
  for (const auto& r : trace) {
    out << r.step << ',' << format_double(r.loss) << ',' << format_double(r.critic) << ','
        << format_double(r.penalty) << '\n';
  }
  return out.str();
}

std::string weak_convexity_csv(const WeakConvexityReport& r) {
  std::ostringstream out;
  out << "rho,is_convex\n";
  for (const auto& [rho, convex] : r.probes) out << format_double(rho) << ',' << (convex ? 1 : 0) << '\n';
  out << "# rho_star=" << (r.rho_star ? format_double(*r.rho_star) : "not found below cap")
      << " cap=" << format_double(r.cap) << " tol=" << format_double(r.tol)
      << " grid=" << r.grid_size << '\n';
  return out.str();
}

std::string figure_svg(const std::vector<StarBody>& bodies, const std::string& title) {
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                 "#9467bd", "#8c564b", "#e377c2", "#17becf"};
  constexpr int kSize = 600;
  constexpr int kMargin = 40;
  constexpr int kLegend = 180;

  // Polylines in the plane; 3-D bodies use the equatorial section.
  std::vector<std::vector<std::pair<double, double>>> lines;
  double extent = 0.0;
  for (const auto& b : bodies) {
    std::vector<std::pair<double, double>> pts;
    const std::size_t n = b.dim() == 2 ? b.grid().size() : 720;
    for (std::size_t i = 0; i < n; ++i) {
      double x, y;
      if (b.dim() == 2) {
        const Vec& u = b.grid().direction(i);
        const double r = b.profile()[i];
        x = r * u[0];
        y = r * u[1];
      } else {
        const double t = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
        Vec u(3);
        u << std::cos(t), std::sin(t), 0.0;
        const double r = b.radius(u);
        x = r * u[0];
        y = r * u[1];
      }
      extent = std::max({extent, std::abs(x), std::abs(y)});
      pts.emplace_back(x, y);
    }
    lines.push_back(std::move(pts));
  }
  if (extent == 0.0) extent = 1.0;
  extent *= 1.05;
  const double scale = (kSize - 2 * kMargin) / (2.0 * extent);
  auto px = [&](double x) { return kMargin + (x + extent) * scale; };
  auto py = [&](double y) { return kMargin + (extent - y) * scale; };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kSize + kLegend
      << "\" height=\"" << kSize << "\" viewBox=\"0 0 " << kSize + kLegend << ' ' << kSize
      << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << kMargin << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\">"
      << title << "</text>\n";
  out << "<line x1=\"" << px(-extent) << "\" y1=\"" << py(0) << "\" x2=\"" << px(extent)
      << "\" y2=\"" << py(0) << "\" stroke=\"#bbb\" stroke-width=\"1\"/>\n";
  out << "<line x1=\"" << px(0) << "\" y1=\"" << py(-extent) << "\" x2=\"" << px(0)
      << "\" y2=\"" << py(extent) << "\" stroke=\"#bbb\" stroke-width=\"1\"/>\n";
  char buf[64];
  for (std::size_t k = 0; k < lines.size(); ++k) {
    const char* color = colors[k % 8];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i <= lines[k].size(); ++i) {
      const auto& [x, y] = lines[k][i % lines[k].size()];
      std::snprintf(buf, sizeof buf, "%.3f,%.3f ", px(x), py(y));
      out << buf;
    }
    out << "\"/>\n";
    const int ly = kMargin + 24 * static_cast<int>(k);
    out << "<line x1=\"" << kSize << "\" y1=\"" << ly << "\" x2=\"" << kSize + 24 << "\" y2=\""
        << ly << "\" stroke=\"" << color << "\" stroke-width=\"3\"/>\n";
    out << "<text x=\"" << kSize + 30 << "\" y=\"" << ly + 5
        << "\" font-family=\"sans-serif\" font-size=\"14\">" << bodies[k].label() << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::InvalidArgument, "cannot open " + path + " for writing");
  f << text;
  if (!f) throw Error(ErrorCode::InvalidArgument, "failed writing " + path);
}

}  // namespace stargeo
