#include "quantlets/design.hpp"

#include "quantlets/errors.hpp"

namespace quantlets {

DesignMatrix make_design(Eigen::MatrixXd X, std::vector<std::string> names) {
  if (X.rows() == 0 || X.cols() == 0)
    throw ValidationError("make_design: empty design matrix");
  if (names.size() != static_cast<std::size_t>(X.cols()))
    throw ValidationError("make_design: name/column count mismatch");

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  qr.setThreshold(1e-10);
  if (qr.rank() < X.cols())
    throw ValidationError("make_design: design matrix is rank deficient");

  DesignMatrix d;
  d.X = std::move(X);
  d.names = std::move(names);
  d.kinds.reserve(d.X.cols());
  for (Eigen::Index a = 0; a < d.X.cols(); ++a) {
    const auto col = d.X.col(a);
    if ((col.array() == 1.0).all()) {
      d.kinds.push_back(DesignMatrix::ColKind::Intercept);
    } else if (((col.array() == 0.0) || (col.array() == 1.0)).all()) {
      d.kinds.push_back(DesignMatrix::ColKind::Binary);
    } else {
      d.kinds.push_back(DesignMatrix::ColKind::Continuous);
    }
  }
  return d;
}

}  // namespace quantlets
