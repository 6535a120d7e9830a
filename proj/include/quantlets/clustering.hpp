#pragma once

#include <Eigen/Dense>
#include <vector>

#include "quantlets/quantlet_basis.hpp"

namespace quantlets {

struct ClusterPartition {
  std::vector<int> label;      // per quantlet, 0-based cluster id
  int n_clusters = 1;
  Eigen::VectorXd variability; // diag(Phi Pi^T Pi Phi^T)
  bool degenerate_warning = false;

  std::vector<std::vector<int>> members() const {
    std::vector<std::vector<int>> m(n_clusters);
    for (std::size_t k = 0; k < label.size(); ++k) m[label[k]].push_back(int(k));
    return m;
  }
};

// Gaussian pair pinned to cluster 0; remaining quantlets grouped by
// complete-linkage agglomerative clustering of log10 variability into H - 1
// clusters ("similar order of magnitude").
ClusterPartition cluster_bases(const QuantletBasis& basis, int n_clusters);

// Same grouping rule for an arbitrary variability vector: the first n_pinned
// entries form cluster 0, the rest are clustered on the log10 scale.
ClusterPartition cluster_from_variability(const Eigen::VectorXd& variability,
                                          int n_pinned, int n_clusters);

ClusterPartition single_cluster(int K);

// Decades spanned by the non-Gaussian variabilities, capped at 5, plus one
// for the Gaussian pair.
int default_cluster_count(const QuantletBasis& basis);

}  // namespace quantlets
