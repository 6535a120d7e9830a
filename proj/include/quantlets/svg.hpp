#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace quantlets {

struct SvgCurve {
  Eigen::VectorXd y;
  std::string color = "#1f6fb2";
  double width = 1.5;
  bool dashed = false;
};

// Minimal line chart: curves over a shared x grid, optional shaded band.
void write_svg_plot(const std::string& path, const std::string& title,
                    const Eigen::VectorXd& x, const std::vector<SvgCurve>& curves,
                    const Eigen::VectorXd& band_lo = Eigen::VectorXd(),
                    const Eigen::VectorXd& band_hi = Eigen::VectorXd());

}  // namespace quantlets
