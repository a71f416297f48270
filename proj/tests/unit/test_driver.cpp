#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "roughheat/driver.hpp"
#include "roughheat/error.hpp"

using namespace roughheat;

namespace {

PathPtr share(DriverPath p) { return std::make_shared<const DriverPath>(std::move(p)); }

double sample_variance(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

}  // namespace

TEST_CASE("fbm variance at t = 1 and t = 1/2") {
  std::vector<double> end05, end075, half075;
  for (std::uint64_t seed = 0; seed < 10000; ++seed) {
    end05.push_back(sample_fbm(0.5, 1, 10, seed).samples(0).back());
    const auto p = sample_fbm(0.75, 1, 10, seed + 777777);
    end075.push_back(p.samples(0).back());
    half075.push_back(p.samples(0)[512]);
  }
  const double v05 = sample_variance(end05);
  const double v075 = sample_variance(end075);
  CHECK(v05 >= 0.94);
  CHECK(v05 <= 1.06);
  CHECK(v075 >= 0.94);
  CHECK(v075 <= 1.06);
  CHECK(std::abs(sample_variance(half075) / std::pow(0.5, 1.5) - 1.0) <= 0.06);
}

TEST_CASE("fbm parameters and determinism") {
  CHECK_THROWS_AS(sample_fbm(0.2, 1, 8, 1), ParameterError);
  CHECK_THROWS_AS(sample_fbm(0.5, 0, 8, 1), ParameterError);
  CHECK_THROWS_AS(sample_fbm(0.5, 1, 23, 1), ParameterError);
  const auto a = sample_fbm(0.6, 2, 9, 42), b = sample_fbm(0.6, 2, 9, 42);
  for (int i = 0; i < 2; ++i) {
    const auto sa = a.samples(i), sb = b.samples(i);
    CHECK(std::equal(sa.begin(), sa.end(), sb.begin()));
    CHECK(sa.size() == 513);
    CHECK(sa[0] == 0.0);
  }
  CHECK(std::get<FbmSpec>(a.spec()).method == FbmMethod::circulant);
  const auto c = sample_fbm(0.6, 1, 6, 3, FbmMethod::cholesky);
  CHECK(std::get<FbmSpec>(c.spec()).method == FbmMethod::cholesky);
}

TEST_CASE("deterministic drivers") {
  const auto lin = make_deterministic("linear", std::vector<double>{1.0}, 1, 6);
  for (std::int64_t j = 0; j <= lin.steps(); ++j) {
    CHECK(lin.samples(0)[static_cast<std::size_t>(j)] == static_cast<double>(j) * lin.step());
  }
  const auto sn = make_deterministic("sinusoid", std::vector<double>{1.0, 1.0}, 1, 10);
  double worst = 0.0;
  for (std::int64_t j = 0; j <= sn.steps(); ++j) {
    const double t = static_cast<double>(j) * sn.step();
    worst = std::max(worst, std::abs(sn.samples(0)[static_cast<std::size_t>(j)] - sn.exact_value(0, t)));
  }
  CHECK(worst == 0.0);
  CHECK_THROWS_AS(make_deterministic("linear", std::vector<double>{1.0}, 0, 6), ParameterError);
  CHECK_THROWS_AS(make_deterministic("spline", std::vector<double>{1.0}, 1, 6), ParameterError);
  CHECK_FALSE(sample_fbm(0.5, 1, 4, 1).has_closed_form());
}

TEST_CASE("geometric enhancement") {
  SUBCASE("one channel: area is half the squared increment") {
    const EnhancedDriver e = enhance_geometric(share(sample_fbm(0.5, 1, 8, 5)));
    const double h = e.path().step();
    for (int a = 0; a < 256; a += 17) {
      for (int b = a; b <= 256; b += 23) {
        const double dx = e.increment(0, a * h, b * h);
        CHECK(e.area(0, 0, a * h, b * h) == doctest::Approx(0.5 * dx * dx).epsilon(1e-13));
      }
    }
  }
  SUBCASE("linear two channels") {
    const EnhancedDriver e = enhance_geometric(share(make_linear({1.0, 1.0}, 6)));
    CHECK(e.area(0, 1, 0.0, 1.0) == doctest::Approx(0.5).epsilon(1e-14));
    for (double v : e.area_matrix(0.25, 0.25)) CHECK(v == 0.0);
  }
  SUBCASE("symmetric part and scaling") {
    const auto p = sample_fbm(0.5, 3, 8, 9);
    const EnhancedDriver e = enhance_geometric(share(p));
    std::vector<std::vector<double>> scaled;
    for (int i = 0; i < 3; ++i) {
      std::vector<double> s(p.samples(i).begin(), p.samples(i).end());
      for (double& v : s) v *= 2.0;
      scaled.push_back(std::move(s));
    }
    const EnhancedDriver e2 = enhance_geometric(share(DriverPath(8, std::move(scaled), SampledSpec{"x2"})));
    for (auto [s, t] : {std::pair{0.0, 1.0}, {0.125, 0.5}, {0.25, 0.2578125}}) {
      const auto A = e.area_matrix(s, t);
      const auto A2 = e2.area_matrix(s, t);
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
          const double sym = 0.5 * (A[i * 3 + j] + A[j * 3 + i]);
          CHECK(sym == doctest::Approx(0.5 * e.increment(i, s, t) * e.increment(j, s, t)).epsilon(1e-12));
          CHECK(A2[i * 3 + j] == doctest::Approx(4.0 * A[i * 3 + j]).epsilon(1e-13));
        }
      }
    }
  }
}

TEST_CASE("Chen relation on random dyadic triples") {
  std::mt19937_64 rng(1);
  for (auto make : {0, 1}) {
    const auto path = share(sample_fbm(0.5, 2, 10, 13));
    const EnhancedDriver e = make == 0 ? enhance_geometric(path) : enhance_ito(path);
    std::uniform_int_distribution<int> pick(0, 1024);
    double scale = 1.0;
    for (int i = 0; i < 2; ++i) {
      for (double v : path->samples(i)) scale = std::max(scale, 1.0 + v * v);
    }
    for (int trial = 0; trial < 100; ++trial) {
      int a = pick(rng), b = pick(rng), c = pick(rng);
      if (a > b) std::swap(a, b);
      if (b > c) std::swap(b, c);
      if (a > b) std::swap(a, b);
      const double h = 1.0 / 1024;
      for (double d : chen_defect(e, a * h, b * h, c * h)) CHECK(std::abs(d) <= 1e-10 * scale);
      for (double d : chen_defect(e, a * h, a * h, c * h)) CHECK(std::abs(d) <= 1e-15 * scale);
    }
  }
  const EnhancedDriver e = enhance_geometric(share(make_linear({1.0}, 4)));
  CHECK_THROWS_AS(chen_defect(e, 0.0, 0.3, 1.0), DyadicError);
  CHECK_THROWS_AS(chen_defect(e, 0.5, 0.25, 1.0), ParameterError);
}

TEST_CASE("Ito enhancement") {
  const auto path = share(sample_fbm(0.5, 2, 10, 21));
  const EnhancedDriver ito = enhance_ito(path);
  const EnhancedDriver geo = enhance_geometric(path);
  const double s = 0.25, t = 0.75;
  const double dx = ito.increment(0, s, t);
  CHECK(ito.area(0, 0, s, t) == doctest::Approx(0.5 * (dx * dx - (t - s))).epsilon(1e-12));
  CHECK(ito.area(0, 1, s, t) == geo.area(0, 1, s, t));
  // Ito Riemann sums on the fine grid
  const auto x = path->samples(0);
  const auto y = path->samples(1);
  double riemann00 = 0.0, riemann01 = 0.0;
  for (int k = 256; k < 768; ++k) {
    riemann00 += (x[k + 1] - x[k]) * (x[k] - x[256]);
    riemann01 += (x[k + 1] - x[k]) * (y[k] - y[256]);
  }
  CHECK(std::abs(ito.area(0, 0, s, t) - riemann00) <= 0.05);
  // the off-diagonal Riemann sum misses the Stratonovich half-product of each step
  double half = 0.0;
  for (int k = 256; k < 768; ++k) half += 0.5 * (x[k + 1] - x[k]) * (y[k + 1] - y[k]);
  CHECK(ito.area(0, 1, s, t) == doctest::Approx(riemann01 + half).epsilon(1e-12));

  double mean = 0.0;
  for (std::uint64_t seed = 0; seed < 10000; ++seed) {
    mean += enhance_ito(share(sample_fbm(0.5, 1, 6, seed))).area(0, 0, 0.0, 1.0);
  }
  mean /= 10000.0;
  CHECK(std::abs(mean) <= 0.02);
  CHECK_THROWS_AS(enhance_ito(share(sample_fbm(0.7, 1, 6, 1))), ParameterError);
  CHECK_THROWS_AS(enhance_ito(share(make_linear({1.0}, 6))), ParameterError);
}

TEST_CASE("exact lift of smooth drivers") {
  const auto p = share(make_sinusoid({1.0, 0.5}, {1.0, 2.0}, 12));
  const EnhancedDriver ex = enhance_geometric(p, Lift::exact);
  const EnhancedDriver pl = enhance_geometric(p);
  for (double v : chen_defect(ex, 0.125, 0.375, 0.875)) CHECK(std::abs(v) <= 1e-12);
  CHECK(ex.area(0, 1, 0.1, 0.9) == doctest::Approx(pl.area(0, 1, 0.1, 0.9)).epsilon(1e-5));
  CHECK_THROWS_AS(enhance_geometric(share(sample_fbm(0.5, 1, 4, 1)), Lift::exact), ParameterError);
}

TEST_CASE("Hoelder norms and distances") {
  const EnhancedDriver lin = enhance_geometric(share(make_linear({1.0}, 10)));
  for (int L : {2, 5, 8}) CHECK(holder_norms(lin, 0.45, L).path == doctest::Approx(1.0).epsilon(1e-12));
  const EnhancedDriver zero = enhance_geometric(share(make_linear({0.0}, 6)));
  const auto z = holder_norms(zero, 0.45, 6);
  CHECK(z.path == 0.0);
  CHECK(z.area == 0.0);
  CHECK(z.total == 0.0);
  CHECK_THROWS_AS(holder_norms(lin, 0.3, 4), ParameterError);
  CHECK_THROWS_AS(holder_norms(lin, 0.45, 11), ParameterError);

  const auto base = sample_fbm(0.5, 1, 12, 3);
  const EnhancedDriver e = enhance_geometric(share(base));
  const double n8 = holder_norms(e, 0.45, 8).total, n12 = holder_norms(e, 0.45, 12).total;
  CHECK(n8 > 0.0);
  CHECK(n12 / n8 <= 2.0);

  CHECK(driver_distance(e, e, 0.45, 8) == 0.0);
  const double eps = 0.01;
  const auto scaled = perturbed(base, [&](double t) { return base.interpolate(0, t); }, eps);
  const EnhancedDriver es = enhance_geometric(share(scaled));
  const auto hn = holder_norms(e, 0.45, 8);
  CHECK(driver_distance(e, es, 0.45, 8) <= eps * hn.path + (2 * eps + eps * eps) * hn.area + 1e-12);
  const EnhancedDriver two = enhance_geometric(share(sample_fbm(0.5, 2, 12, 3)));
  CHECK_THROWS_AS(driver_distance(e, two, 0.45, 8), ShapeError);
}

TEST_CASE("dyadic indices") {
  CHECK(dyadic_index(0.375, 3) == 3);
  CHECK(dyadic_index(1.0, 5) == 32);
  CHECK_THROWS_AS(dyadic_index(0.3, 10), DyadicError);
  CHECK_THROWS_AS(dyadic_index(1.5, 2), DyadicError);
}
