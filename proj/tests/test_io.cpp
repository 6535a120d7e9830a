#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "quantlets/errors.hpp"
#include "quantlets/io.hpp"
#include "quantlets/rng.hpp"

using namespace quantlets;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path dir;
  TempDir() {
    dir = fs::temp_directory_path() /
          ("quantlets_io_test_" + std::to_string(::getpid()));
    fs::create_directories(dir);
  }
  ~TempDir() { fs::remove_all(dir); }
  std::string operator/(const std::string& name) const {
    return (dir / name).string();
  }
};

}  // namespace

TEST_CASE("samples csv round trip preserves subjects and order") {
  TempDir tmp;
  std::vector<SampleSet> samples(2);
  samples[0].subject_id = "alice";
  samples[0].values = Eigen::Vector3d(3.0, 1.0, 2.0);
  samples[1].subject_id = "bob";
  samples[1].values = Eigen::Vector2d(5.5, -1.25);
  write_samples_csv(tmp / "s.csv", samples);
  const auto back = read_samples_csv(tmp / "s.csv");
  REQUIRE(back.size() == 2);
  CHECK(back[0].subject_id == "alice");
  CHECK((back[0].values - samples[0].values).norm() == 0.0);
  CHECK((back[1].values - samples[1].values).norm() == 0.0);
}

TEST_CASE("samples csv rejects malformed input") {
  TempDir tmp;
  write_text(tmp / "bad_header.csv", "id,value\na,1\n");
  CHECK_THROWS_AS(read_samples_csv(tmp / "bad_header.csv"), ValidationError);
  write_text(tmp / "bad_cell.csv", "subject_id,value\na,1\na,zebra\n");
  CHECK_THROWS_WITH_AS(read_samples_csv(tmp / "bad_cell.csv"),
                       doctest::Contains("row 3"), ValidationError);
}

TEST_CASE("ingest joins subjects and prepends an intercept") {
  TempDir tmp;
  write_text(tmp / "s.csv",
             "subject_id,value\na,1\na,2\na,3\nb,4\nb,5\nb,6\n");
  write_text(tmp / "c.csv", "subject_id,dose\na,0.5\nb,1.5\n");
  const auto [samples, design] = ingest(tmp / "s.csv", tmp / "c.csv");
  CHECK(samples.size() == 2);
  REQUIRE(design.A() == 2);
  CHECK(design.names[0] == "intercept");
  CHECK(design.names[1] == "dose");
  CHECK(design.X(0, 0) == 1.0);
  CHECK(design.X(0, 1) == 0.5);
  CHECK(design.kinds[1] == DesignMatrix::ColKind::Continuous);
}

TEST_CASE("ingest names missing subjects") {
  TempDir tmp;
  write_text(tmp / "s.csv", "subject_id,value\na,1\na,2\nzed,4\nzed,2\n");
  write_text(tmp / "c.csv", "subject_id,dose\na,0.5\nb,1.5\n");
  CHECK_THROWS_WITH_AS(ingest(tmp / "s.csv", tmp / "c.csv"),
                       doctest::Contains("zed"), ValidationError);
  write_text(tmp / "c2.csv", "subject_id,dose\na,0.5\nzed,1.0\nb,1.5\n");
  CHECK_THROWS_WITH_AS(ingest(tmp / "s.csv", tmp / "c2.csv"),
                       doctest::Contains("b"), ValidationError);
}

TEST_CASE("selection manifest round trip") {
  TempDir tmp;
  std::vector<SelectionResult> sel(2);
  sel[0].subject_id = "a";
  sel[0].lambda = 0.25;
  sel[0].coefficients = Eigen::VectorXd::Zero(10);
  sel[0].coefficients[0] = 1.5;
  sel[0].coefficients[7] = -0.3;
  sel[0].selected = {0, 7};
  sel[1].subject_id = "b";
  sel[1].lambda = 0.5;
  sel[1].coefficients = Eigen::VectorXd::Zero(10);
  sel[1].coefficients[2] = 2.0;
  sel[1].selected = {2};
  write_selection_csv(tmp / "sel.csv", sel);
  const auto back = read_selection_csv(tmp / "sel.csv", 10);
  REQUIRE(back.size() == 2);
  CHECK(back[0].lambda == 0.25);
  CHECK(back[0].selected == std::vector<int>{0, 7});
  CHECK(back[0].coefficients[7] == -0.3);
  CHECK(back[1].selected == std::vector<int>{2});
}

TEST_CASE("curve csv round trip") {
  TempDir tmp;
  LosslessnessCurve c;
  c.threshold = {1, 2};
  c.k_c = {20, 11};
  c.rho_min = {0.999, 0.99};
  c.rho_mean = {0.9999, 0.995};
  write_curve_csv(tmp / "c.csv", c);
  const auto back = read_curve_csv(tmp / "c.csv");
  CHECK(back.threshold == c.threshold);
  CHECK(back.k_c == c.k_c);
  CHECK(back.rho_min == c.rho_min);
}

TEST_CASE("matrix csv round trip with keys") {
  TempDir tmp;
  Eigen::MatrixXd m(2, 3);
  m << 1.5, -2.25, 1e-7, 3.125, 0.0, 42.0;
  write_matrix_csv(tmp / "m.csv", m, {"x", "y", "z"}, {"r1", "r2"}, "key");
  std::vector<std::string> cols, keys;
  const Eigen::MatrixXd back = read_matrix_csv(tmp / "m.csv", &cols, &keys);
  CHECK(cols == std::vector<std::string>{"x", "y", "z"});
  CHECK(keys == std::vector<std::string>{"r1", "r2"});
  CHECK((back - m).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("file hash is stable and content sensitive") {
  TempDir tmp;
  write_text(tmp / "a.txt", "hello");
  write_text(tmp / "b.txt", "hello");
  write_text(tmp / "c.txt", "hellp");
  CHECK(file_hash(tmp / "a.txt") == file_hash(tmp / "b.txt"));
  CHECK(file_hash(tmp / "a.txt") != file_hash(tmp / "c.txt"));
}
