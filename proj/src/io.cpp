#include "roughheat/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "roughheat/error.hpp"

namespace roughheat {
namespace {

std::vector<double> split_doubles(const std::string& line, std::size_t expect, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(cell, &used));
    } catch (const std::exception&) {
      throw ShapeError(what + ": malformed number '" + cell + "'");
    }
  }
  if (expect != 0 && out.size() != expect) throw ShapeError(what + ": wrong column count");
  return out;
}

}  // namespace

void write_field_csv(std::ostream& os, const SpectralBasis& basis, const Field& f) {
  const char* rep = f.has_coefficients() && f.has_grid() ? "both" : (f.has_coefficients() ? "coefficients" : "grid");
  os << "# K=" << basis.modes() << " G=" << basis.grid_size() << " representation=" << rep << '\n';
  os << std::setprecision(17);
  if (f.has_coefficients()) {
    for (double v : f.coefficients()) os << v << '\n';
  }
  if (f.has_grid()) {
    for (double v : f.grid()) os << v << '\n';
  }
}

Field read_field_csv(std::istream& is, const SpectralBasis& basis) {
  std::string header;
  if (!std::getline(is, header)) throw ShapeError("field file: missing header");
  int K = 0, G = 0;
  char rep[32] = {0};
  if (std::sscanf(header.c_str(), "# K=%d G=%d representation=%31s", &K, &G, rep) != 3) {
    throw ShapeError("field file: malformed header");
  }
  if (K != basis.modes() || G != basis.grid_size()) throw ShapeError("field file: basis mismatch");
  std::vector<double> vals;
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty()) vals.push_back(std::stod(line));
  }
  const std::string r(rep);
  const auto k = static_cast<std::size_t>(K), g = static_cast<std::size_t>(G);
  if (r == "coefficients" && vals.size() == k) return Field::from_coefficients(std::move(vals));
  if (r == "grid" && vals.size() == g) return Field::from_grid(std::move(vals));
  if (r == "both" && vals.size() == k + g) {
    std::vector<double> c(vals.begin(), vals.begin() + static_cast<std::ptrdiff_t>(k));
    std::vector<double> v(vals.begin() + static_cast<std::ptrdiff_t>(k), vals.end());
    return Field::from_both(std::move(c), std::move(v));
  }
  throw ShapeError("field file: value count does not match representation");
}

void write_path_csv(std::ostream& os, const DriverPath& path) {
  os << 't';
  for (int i = 0; i < path.channels(); ++i) os << ",x" << (i + 1);
  os << '\n' << std::setprecision(17);
  for (std::int64_t j = 0; j <= path.steps(); ++j) {
    os << static_cast<double>(j) * path.step();
    for (int i = 0; i < path.channels(); ++i) os << ',' << path.samples(i)[static_cast<std::size_t>(j)];
    os << '\n';
  }
}

DriverPath read_path_csv(std::istream& is, int fine_level, const std::string& origin) {
  if (fine_level < 0 || fine_level > 22) throw ParameterError("fine level must lie in [0, 22]");
  std::string header;
  if (!std::getline(is, header)) throw ShapeError("path file: missing header");
  std::size_t cols = 1;
  for (char ch : header) cols += ch == ',';
  if (cols < 2 || header.rfind("t,", 0) != 0) throw ShapeError("path file: header must be t,x1,...");
  const std::size_t m = cols - 1;
  const std::int64_t N = std::int64_t{1} << fine_level;
  std::vector<std::vector<double>> samples(m);
  std::string line;
  std::int64_t row = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto v = split_doubles(line, cols, "path file");
    if (row > N) throw ShapeError("path file: more rows than 2^n_f + 1");
    if (std::abs(v[0] - static_cast<double>(row) / static_cast<double>(N)) > 1e-12) {
      throw DyadicError("path file: row " + std::to_string(row) + " is not at t = j 2^-n_f");
    }
    for (std::size_t i = 0; i < m; ++i) samples[i].push_back(v[i + 1]);
    ++row;
  }
  if (row != N + 1) throw ShapeError("path file: expected 2^n_f + 1 rows");
  return DriverPath(fine_level, std::move(samples), SampledSpec{origin});
}

DriverPath read_path_csv_file(const std::string& file, int fine_level) {
  std::ifstream in(file);
  if (!in) throw ParameterError("cannot open path file '" + file + "'");
  return read_path_csv(in, fine_level, "file:" + file);
}

void write_trajectory_csv(const std::string& file, const SpectralBasis& basis, const Trajectory& traj,
                          const TrajectoryMeta& meta) {
  std::ofstream os(file);
  if (!os) throw ParameterError("cannot write '" + file + "'");
  os << 't';
  for (int k = 1; k <= basis.modes(); ++k) os << ",c" << k;
  os << '\n' << std::setprecision(17);
  const double h = std::ldexp(1.0, -traj.level());
  for (std::int64_t j = 0; j <= traj.steps(); ++j) {
    os << h * static_cast<double>(j);
    for (double v : traj.at(j)) os << ',' << v;
    os << '\n';
  }
  nlohmann::ordered_json m;
  m["n"] = traj.level();
  m["K"] = basis.modes();
  m["G"] = basis.grid_size();
  m["gamma"] = meta.gamma;
  m["gamma_prime"] = meta.gamma_prime;
  m["driver"] = meta.driver;
  m["seed"] = meta.seed;
  std::ofstream side(file + ".meta.json");
  side << m.dump(2) << '\n';
}

void write_multipliers_csv(std::ostream& os, const SpectralBasis& basis, const OperatorSet& ops) {
  os << "kind,channel_i,channel_j,mode,lambda,multiplier\n" << std::setprecision(17);
  const auto lam = basis.eigenvalues();
  const auto m = ops.x.size();
  auto dump = [&](const char* kind, const ModeDiagonalOperator& op, std::size_t i, std::size_t j) {
    for (std::size_t k = 0; k < op.multipliers.size(); ++k) {
      os << kind << ',' << i + 1 << ',' << j + 1 << ',' << k + 1 << ',' << lam[k] << ',' << op.multipliers[k]
         << '\n';
    }
  };
  for (std::size_t i = 0; i < m; ++i) dump("x", ops.x[i], i, i);
  for (std::size_t i = 0; i < m; ++i) dump("ax", ops.ax[i], i, i);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) dump("xx", ops.xx[i * m + j], i, j);
  }
}

}  // namespace roughheat
