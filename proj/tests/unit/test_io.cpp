#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "roughheat/error.hpp"
#include "roughheat/io.hpp"

using namespace roughheat;

TEST_CASE("field round trip") {
  const auto basis = SpectralBasis::make(4, 1.0, 0.0, 8);
  const Field f = basis.complete(Field::from_coefficients({0.1, -0.3, 1.0 / 3.0, 2e-17}));
  std::stringstream ss;
  write_field_csv(ss, basis, f);
  const Field g = read_field_csv(ss, basis);
  CHECK(g.has_coefficients());
  CHECK(g.has_grid());
  CHECK(g.coefficients() == f.coefficients());
  CHECK(g.grid() == f.grid());

  std::stringstream only;
  write_field_csv(only, basis, Field::from_grid(std::vector<double>(8, 0.25)));
  CHECK(read_field_csv(only, basis).grid() == std::vector<double>(8, 0.25));

  std::stringstream wrong;
  write_field_csv(wrong, SpectralBasis::make(5, 1.0, 0.0, 10), Field::from_coefficients(std::vector<double>(5)));
  CHECK_THROWS_AS(read_field_csv(wrong, basis), ShapeError);
}

TEST_CASE("path round trip") {
  const auto p = sample_fbm(0.5, 2, 6, 12);
  std::stringstream ss;
  write_path_csv(ss, p);
  const auto q = read_path_csv(ss, 6, "test");
  CHECK(q.channels() == 2);
  for (int i = 0; i < 2; ++i) {
    const auto a = p.samples(i), b = q.samples(i);
    CHECK(std::equal(a.begin(), a.end(), b.begin(), b.end()));
  }
  CHECK(std::get<SampledSpec>(q.spec()).origin == "test");

  std::stringstream short_file("t,x1\n0,0\n0.25,1\n");
  CHECK_THROWS_AS(read_path_csv(short_file, 2, "s"), ShapeError);
  std::stringstream off_grid("t,x1\n0,0\n0.3,1\n");
  CHECK_THROWS_AS(read_path_csv(off_grid, 1, "s"), DyadicError);
}

TEST_CASE("trajectory file and sidecar") {
  const auto basis = SpectralBasis::make(3, 1.0, 0.0, 6);
  const Trajectory tr(1, {{1, 2, 3}, {4, 5, 6}, {7, 8, 9}});
  const auto dir = std::filesystem::temp_directory_path() / "roughheat_io_test";
  std::filesystem::create_directories(dir);
  const std::string file = (dir / "traj.csv").string();
  write_trajectory_csv(file, basis, tr, TrajectoryMeta{0.45, 0.75, "fbm(H=0.5)", 7});
  std::ifstream in(file);
  std::string header, row;
  std::getline(in, header);
  CHECK(header == "t,c1,c2,c3");
  std::getline(in, row);
  std::getline(in, row);
  CHECK(row == "0.5,4,5,6");
  std::ifstream side(file + ".meta.json");
  const auto meta = nlohmann::json::parse(side);
  CHECK(meta["n"] == 1);
  CHECK(meta["seed"] == 7);
  CHECK(meta["gamma_prime"] == 0.75);
  CHECK(meta["driver"] == "fbm(H=0.5)");
  std::filesystem::remove_all(dir);
}
