#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace quantlets {

struct DesignMatrix {
  Eigen::MatrixXd X;  // n x A, full column rank
  std::vector<std::string> names;

  enum class ColKind { Intercept, Binary, Continuous };
  std::vector<ColKind> kinds;

  Eigen::Index n() const { return X.rows(); }
  Eigen::Index A() const { return X.cols(); }
};

// Validates rank (pivoted QR, tolerance 1e-10) and tags column kinds.
DesignMatrix make_design(Eigen::MatrixXd X, std::vector<std::string> names);

}  // namespace quantlets
