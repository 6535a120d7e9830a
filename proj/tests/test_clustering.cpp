#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "quantlets/clustering.hpp"
#include "quantlets/errors.hpp"

using namespace quantlets;

TEST_CASE("H = 2 puts the pair alone and the rest together") {
  Eigen::VectorXd v(6);
  v << 100, 90, 5, 4, 3, 2;
  const ClusterPartition p = cluster_from_variability(v, 2, 2);
  CHECK(p.label == std::vector<int>{0, 0, 1, 1, 1, 1});
  CHECK(p.n_clusters == 2);
}

TEST_CASE("decade-separated variabilities align with log binning") {
  Eigen::VectorXd v(8);
  v << 1e6, 1e6, 1000.0, 900.0, 10.0, 9.0, 0.01, 0.011;
  const ClusterPartition p = cluster_from_variability(v, 2, 4);
  CHECK(p.n_clusters == 4);
  CHECK(p.label[0] == 0);
  CHECK(p.label[1] == 0);
  // direct log-binning oracle: groups {1000,900}, {10,9}, {0.01,0.011}
  CHECK(p.label[2] == p.label[3]);
  CHECK(p.label[4] == p.label[5]);
  CHECK(p.label[6] == p.label[7]);
  CHECK(p.label[2] != p.label[4]);
  CHECK(p.label[4] != p.label[6]);
}

TEST_CASE("equal variabilities collapse to one cluster with a warning") {
  Eigen::VectorXd v(7);
  v << 5, 5, 1, 1, 1, 1, 1;
  const ClusterPartition p = cluster_from_variability(v, 2, 4);
  CHECK(p.degenerate_warning);
  CHECK(p.n_clusters == 2);
  for (int k = 2; k < 7; ++k) CHECK(p.label[k] == 1);
}

TEST_CASE("guards") {
  Eigen::VectorXd v(3);
  v << 1, 1, 1;
  CHECK_THROWS_AS(cluster_from_variability(v, 2, 1), ConfigError);
  CHECK_THROWS_AS(cluster_from_variability(v, 2, 5), ConfigError);
}

TEST_CASE("members partition the index set") {
  Eigen::VectorXd v(9);
  v << 9, 9, 200, 150, 8, 7, 0.3, 0.2, 0.25;
  const ClusterPartition p = cluster_from_variability(v, 2, 4);
  const auto members = p.members();
  int total = 0;
  for (const auto& m : members) total += static_cast<int>(m.size());
  CHECK(total == 9);
  CHECK(members[0] == std::vector<int>{0, 1});
}
