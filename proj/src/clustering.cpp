#include "quantlets/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "quantlets/errors.hpp"

namespace quantlets {

namespace {

Eigen::VectorXd variability_diag(const QuantletBasis& basis) {
  if (basis.variability.size() == basis.K()) return basis.variability;
  // Lambda = Phi Pi^T Pi Phi^T with Phi = D_perp^T, Pi = D_C^T (K x J each)
  const Eigen::MatrixXd M = basis.psi_perp.transpose() * basis.dc;  // K x K
  return M.rowwise().squaredNorm();
}

// complete-linkage agglomerative clustering of scalar values
std::vector<int> complete_linkage_1d(const std::vector<double>& x,
                                     int target) {
  const int n = static_cast<int>(x.size());
  std::vector<std::vector<int>> clusters(n);
  for (int i = 0; i < n; ++i) clusters[i] = {i};
  auto dist = [&](const std::vector<int>& a, const std::vector<int>& b) {
    double d = 0.0;
    for (int i : a)
      for (int j : b) d = std::max(d, std::fabs(x[i] - x[j]));
    return d;
  };
  while (static_cast<int>(clusters.size()) > target) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = 0, bj = 1;
    for (std::size_t i = 0; i < clusters.size(); ++i) {
      for (std::size_t j = i + 1; j < clusters.size(); ++j) {
        const double d = dist(clusters[i], clusters[j]);
        if (d < best) {
          best = d;
          bi = i;
          bj = j;
        }
      }
    }
    clusters[bi].insert(clusters[bi].end(), clusters[bj].begin(),
                        clusters[bj].end());
    clusters.erase(clusters.begin() + bj);
  }
  // order clusters by descending mean value so labels are stable
  std::sort(clusters.begin(), clusters.end(),
            [&](const std::vector<int>& a, const std::vector<int>& b) {
              double ma = 0.0, mb = 0.0;
              for (int i : a) ma += x[i];
              for (int i : b) mb += x[i];
              return ma / a.size() > mb / b.size();
            });
  std::vector<int> label(n, 0);
  for (std::size_t c = 0; c < clusters.size(); ++c)
    for (int i : clusters[c]) label[i] = static_cast<int>(c);
  return label;
}

}  // namespace

int default_cluster_count(const QuantletBasis& basis) {
  const Eigen::VectorXd v = variability_diag(basis);
  if (v.size() <= 2) return 1;
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (Eigen::Index k = 2; k < v.size(); ++k) {
    const double lv = std::log10(std::max(v[k], 1e-300));
    lo = std::min(lo, lv);
    hi = std::max(hi, lv);
  }
  const int decades = std::max(1, static_cast<int>(std::ceil(hi - lo)));
  return std::min(decades, 5) + 1;
}

ClusterPartition cluster_from_variability(const Eigen::VectorXd& variability,
                                          int n_pinned, int n_clusters) {
  const int K = static_cast<int>(variability.size());
  if (n_clusters < 2) throw ConfigError("cluster_bases: need H >= 2");
  if (K < n_clusters) throw ConfigError("cluster_bases: K < H");

  ClusterPartition part;
  part.variability = variability;
  part.label.assign(K, 0);
  if (K <= n_pinned) {
    part.n_clusters = 1;
    return part;
  }

  std::vector<double> logv(K - n_pinned);
  for (int k = n_pinned; k < K; ++k)
    logv[k - n_pinned] = std::log10(std::max(variability[k], 1e-300));

  const double spread = *std::max_element(logv.begin(), logv.end()) -
                        *std::min_element(logv.begin(), logv.end());
  if (spread < 1e-12) {
    // indistinguishable variabilities: one non-pinned cluster
    part.degenerate_warning = true;
    for (int k = n_pinned; k < K; ++k) part.label[k] = 1;
    part.n_clusters = 2;
    return part;
  }

  const int target = std::min(n_clusters - 1, K - n_pinned);
  const std::vector<int> sub = complete_linkage_1d(logv, target);
  for (int k = n_pinned; k < K; ++k) part.label[k] = sub[k - n_pinned] + 1;
  part.n_clusters = 1 + *std::max_element(sub.begin(), sub.end()) + 1;
  return part;
}

ClusterPartition cluster_bases(const QuantletBasis& basis, int n_clusters) {
  return cluster_from_variability(variability_diag(basis), 2, n_clusters);
}

ClusterPartition single_cluster(int K) {
  ClusterPartition part;
  part.label.assign(K, 0);
  part.n_clusters = 1;
  part.variability = Eigen::VectorXd::Ones(K);
  return part;
}

}  // namespace quantlets
