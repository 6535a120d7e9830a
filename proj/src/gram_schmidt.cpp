#include "quantlets/gram_schmidt.hpp"

#include <cmath>

namespace quantlets {

GramSchmidtResult gram_schmidt(const GridMeasure& measure,
                               const Eigen::MatrixXd& columns) {
  const Eigen::VectorXd& w = measure.weights();
  GramSchmidtResult out;
  out.q.resize(columns.rows(), columns.cols());
  Eigen::Index nq = 0;

  for (Eigen::Index c = 0; c < columns.cols(); ++c) {
    Eigen::VectorXd v = columns.col(c);
    const double orig = std::sqrt((w.array() * v.array().square()).sum());
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index j = 0; j < nq; ++j) {
        const double proj = (w.array() * v.array() * out.q.col(j).array()).sum();
        v.noalias() -= proj * out.q.col(j);
      }
    }
    const double nrm = std::sqrt((w.array() * v.array().square()).sum());
    if (nrm < 1e-10 * orig || nrm == 0.0) {
      out.dropped.push_back(static_cast<int>(c));
      continue;
    }
    out.q.col(nq++) = v / nrm;
    out.kept.push_back(static_cast<int>(c));
  }
  out.q.conservativeResize(Eigen::NoChange, nq);
  return out;
}

}  // namespace quantlets
