#include "quantlets/svg.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "quantlets/errors.hpp"

namespace quantlets {

namespace {

constexpr double kW = 640, kH = 400, kPad = 48;

double map_x(double x, double lo, double hi) {
  return kPad + (x - lo) / (hi - lo) * (kW - 2 * kPad);
}
double map_y(double y, double lo, double hi) {
  return kH - kPad - (y - lo) / (hi - lo) * (kH - 2 * kPad);
}

}  // namespace

void write_svg_plot(const std::string& path, const std::string& title,
                    const Eigen::VectorXd& x,
                    const std::vector<SvgCurve>& curves,
                    const Eigen::VectorXd& band_lo,
                    const Eigen::VectorXd& band_hi) {
  if (x.size() == 0) throw ValidationError("write_svg_plot: empty grid");
  double ylo = 1e300, yhi = -1e300;
  for (const auto& c : curves) {
    ylo = std::min(ylo, c.y.minCoeff());
    yhi = std::max(yhi, c.y.maxCoeff());
  }
  if (band_lo.size()) {
    ylo = std::min(ylo, band_lo.minCoeff());
    yhi = std::max(yhi, band_hi.maxCoeff());
  }
  if (!(yhi > ylo)) {
    yhi = ylo + 1.0;
    ylo -= 1.0;
  }
  const double pad = 0.05 * (yhi - ylo);
  ylo -= pad;
  yhi += pad;
  const double xlo = x.minCoeff(), xhi = x.maxCoeff();

  std::ostringstream svg;
  svg.precision(6);
  svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << kW
      << "' height='" << kH << "' viewBox='0 0 " << kW << " " << kH << "'>\n"
      << "<rect width='100%' height='100%' fill='white'/>\n"
      << "<text x='" << kW / 2 << "' y='20' text-anchor='middle' "
      << "font-family='sans-serif' font-size='14'>" << title << "</text>\n";

  if (band_lo.size() == x.size() && band_hi.size() == x.size()) {
    svg << "<polygon fill='#9ecae1' fill-opacity='0.45' stroke='none' points='";
    for (Eigen::Index i = 0; i < x.size(); ++i)
      svg << map_x(x[i], xlo, xhi) << "," << map_y(band_hi[i], ylo, yhi) << " ";
    for (Eigen::Index i = x.size() - 1; i >= 0; --i)
      svg << map_x(x[i], xlo, xhi) << "," << map_y(band_lo[i], ylo, yhi) << " ";
    svg << "'/>\n";
  }

  // axes
  svg << "<line x1='" << kPad << "' y1='" << kH - kPad << "' x2='" << kW - kPad
      << "' y2='" << kH - kPad << "' stroke='black'/>\n"
      << "<line x1='" << kPad << "' y1='" << kPad << "' x2='" << kPad
      << "' y2='" << kH - kPad << "' stroke='black'/>\n";

  for (const auto& c : curves) {
    if (c.y.size() != x.size()) continue;
    svg << "<polyline fill='none' stroke='" << c.color << "' stroke-width='"
        << c.width << "'";
    if (c.dashed) svg << " stroke-dasharray='6 4'";
    svg << " points='";
    for (Eigen::Index i = 0; i < x.size(); ++i)
      svg << map_x(x[i], xlo, xhi) << "," << map_y(c.y[i], ylo, yhi) << " ";
    svg << "'/>\n";
  }
  svg << "</svg>\n";

  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write file: " + path);
  out << svg.str();
}

}  // namespace quantlets
