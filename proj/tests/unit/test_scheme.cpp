#include <doctest.h>

#include <cmath>

#include "roughheat/error.hpp"
#include "roughheat/scheme.hpp"

using namespace roughheat;

namespace {

DriverPtr geo(DriverPath p) {
  return std::make_shared<const EnhancedDriver>(enhance_geometric(std::make_shared<const DriverPath>(std::move(p))));
}

BasisPtr sine(int K) { return std::make_shared<const SpectralBasis>(SpectralBasis::make(K, 1.0, 0.0, 2 * K)); }

Field low_modes(int K) {
  std::vector<double> c(static_cast<std::size_t>(K), 0.0);
  c[0] = 1.0;
  c[1] = 0.5;
  return Field::from_coefficients(c);
}

Problem fbm_problem(const char* field, int K = 16, int nf = 9, std::uint64_t seed = 3, int m = 1) {
  return make_problem(sine(K), geo(sample_fbm(0.5, m, nf, seed)), VectorField::parse(field, m), low_modes(K),
                      0.45, 0.75);
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

TEST_CASE("zero field follows the semigroup") {
  const Problem p = fbm_problem("zero");
  const Trajectory tr = solve(p, 6);
  const auto y0 = p.basis->coefficients_of(p.psi);
  for (std::int64_t k = 0; k <= tr.steps(); k += 7) {
    const auto d = p.basis->decay(static_cast<double>(k) / 64.0);
    for (std::size_t i = 0; i < y0.size(); ++i) {
      CHECK(tr.at(k)[i] == doctest::Approx(d[i] * y0[i]).epsilon(1e-13).scale(1e-300));
    }
  }
}

TEST_CASE("constant driver follows the semigroup") {
  const Problem p = make_problem(sine(8), geo(make_linear({0.0}, 6)), VectorField::parse("sin:1", 1), low_modes(8),
                                 0.45, 0.75);
  const Trajectory tr = solve(p, 6);
  const auto d = p.basis->decay(1.0);
  CHECK(tr.at(64)[0] == doctest::Approx(d[0]).epsilon(1e-13));
  CHECK(tr.at(64)[1] == doctest::Approx(0.5 * d[1]).epsilon(1e-13));
}

TEST_CASE("linear scalar step is the Milstein step") {
  auto basis = std::make_shared<const SpectralBasis>(SpectralBasis::pointwise({0.0}));
  auto drv = geo(sample_fbm(0.5, 1, 8, 17));
  const Problem p = make_problem(basis, drv, VectorField::parse("linear:0.7", 1),
                                 Field::from_coefficients({1.3}), 0.45, 0.75);
  std::vector<double> y{1.3};
  for (std::int64_t k = 0; k < 32; ++k) {
    const double dx = drv->increment(0, k / 32.0, (k + 1) / 32.0);
    const double expect = y[0] * (1.0 + 0.7 * dx + 0.49 * 0.5 * dx * dx);
    const auto next = step(p, y, k, 5);
    CHECK(next[0] == doctest::Approx(expect).epsilon(1e-14));
    y = next;
  }
}

TEST_CASE("scalar ODE at second order") {
  auto basis = std::make_shared<const SpectralBasis>(SpectralBasis::pointwise({0.0}));
  auto drv = geo(make_linear({1.0}, 12));
  const double y0 = 0.8;
  const Problem p = make_problem(basis, drv, VectorField::parse("sin:1", 1), Field::from_coefficients({y0}),
                                 0.45, 0.75);
  const double exact = 2.0 * std::atan(std::tan(y0 / 2.0) * std::exp(1.0));
  std::vector<double> err;
  for (int n = 4; n <= 9; ++n) err.push_back(std::abs(solve(p, n).at(std::int64_t{1} << n)[0] - exact));
  for (std::size_t i = 0; i + 1 < err.size(); ++i) {
    CHECK(err[i] / err[i + 1] >= 3.5);
    CHECK(err[i] / err[i + 1] <= 4.5);
  }
  CHECK(err.back() <= 1e-5);
}

TEST_CASE("residuals on the solution grid") {
  const Problem p = fbm_problem("tanh:1;sin:1", 16, 9, 5, 2);
  const Trajectory tr = solve(p, 7);
  const double h = 1.0 / 128;
  SUBCASE("J vanishes on consecutive points") {
    for (int k = 0; k < 128; k += 5) {
      const double scale = 1.0 + max_abs(tr.at(k));
      CHECK(max_abs(p.basis->coefficients_of(residual_J(p, tr, k * h, (k + 1) * h))) <= 1e-12 * scale);
    }
  }
  SUBCASE("K - J is the area term") {
    const double s = 10 * h, t = 30 * h;
    const auto J = p.basis->coefficients_of(residual_J(p, tr, s, t));
    const auto K = p.basis->coefficients_of(residual_K(p, tr, s, t));
    const auto ops = p.conv->operators_at(s, t);
    std::vector<double> area(16, 0.0);
    const Field ys = Field::from_coefficients(tr.at(10));
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        ops->xx[i * 2 + j].accumulate(p.basis->coefficients_of(F_pair(*p.basis, p.f, i, j, ys)), area);
      }
    }
    for (int k = 0; k < 16; ++k) CHECK(K[k] - J[k] == doctest::Approx(area[k]).epsilon(1e-10).scale(1e-14));
  }
  SUBCASE("twisted increments form a cochain and telescope") {
    auto dh = [&](int a, int b) {
      return p.basis->coefficients_of(delta_hat(p, tr.field(a), tr.field(b), a * h, b * h));
    };
    const auto ts = dh(3, 90), tu = dh(40, 90), us = dh(3, 40);
    const auto d = p.basis->decay(50 * h);
    for (int k = 0; k < 16; ++k) CHECK(std::abs(ts[k] - tu[k] - d[k] * us[k]) <= 1e-14);
    std::vector<double> sum(16, 0.0);
    for (int a = 0; a < 128; ++a) {
      const auto inc = dh(a, a + 1);
      const auto w = p.basis->decay(1.0 - (a + 1) * h);
      for (int k = 0; k < 16; ++k) sum[k] += w[k] * inc[k];
    }
    const auto whole = dh(0, 128);
    for (int k = 0; k < 16; ++k) CHECK(std::abs(sum[k] - whole[k]) <= 1e-13);
  }
  SUBCASE("compensated J") {
    const double s = 8 * h, t = 72 * h;
    std::vector<double> full;
    for (int k = 0; k <= 128; ++k) full.push_back(k * h);
    const auto J = p.basis->coefficients_of(residual_J(p, tr, s, t));
    const auto cf = p.basis->coefficients_of(compensated_J(p, tr, full, s, t));
    for (int k = 0; k < 16; ++k) CHECK(std::abs(cf[k] - J[k]) <= 1e-12);
    for (double v : p.basis->coefficients_of(compensated_J(p, tr, {0.0, 1.0}, s, t))) CHECK(v == 0.0);
    const double u = 40 * h;
    const auto one = p.basis->coefficients_of(compensated_J(p, tr, {u}, s, t));
    const auto Jtu = p.basis->coefficients_of(residual_J(p, tr, u, t));
    const auto Jus = p.basis->coefficients_of(residual_J(p, tr, s, u));
    const auto d = p.basis->decay(t - u);
    for (int k = 0; k < 16; ++k) CHECK(one[k] == doctest::Approx(J[k] - Jtu[k] - d[k] * Jus[k]).epsilon(1e-12));
    CHECK_THROWS_AS(compensated_J(p, tr, {0.3}, s, t), DyadicError);
  }
}

TEST_CASE("divergence names the step") {
  auto basis = std::make_shared<const SpectralBasis>(SpectralBasis::pointwise({0.0}));
  const double beta = 1e20;
  const Problem p = make_problem(basis, geo(make_linear({1.0}, 4)), VectorField::parse("linear:1e20", 1),
                                 Field::from_coefficients({1.0}), 0.45, 0.75);
  double y = 1.0;
  std::int64_t expect = -1;
  for (std::int64_t k = 0; k < 16; ++k) {
    y *= 1.0 + beta / 16.0 + beta * beta / 512.0;
    if (!std::isfinite(y) || std::abs(y) > 1e150) {
      expect = k;
      break;
    }
  }
  REQUIRE(expect >= 0);
  try {
    (void)solve(p, 4);
    FAIL("expected divergence");
  } catch (const DivergenceError& e) {
    CHECK(e.step() == expect);
  }
}

TEST_CASE("Nemytskii maps") {
  auto basis = sine(8);
  std::vector<double> c{0.3, -0.2, 0.1, 0, 0, 0, 0, 0.05};
  const Field phi = Field::from_coefficients(c);
  const auto lin = basis->coefficients_of(nemytskii(*basis, ScalarField::parse("linear:2"), phi));
  for (int k = 0; k < 8; ++k) CHECK(std::abs(lin[k] - 2.0 * c[k]) <= 1e-14);
  for (double v : basis->coefficients_of(nemytskii(*basis, ScalarField::parse("zero"), phi))) CHECK(v == 0.0);
  // sin' sin = sin(2v) / 2
  const auto F = basis->coefficients_of(F_pair(*basis, VectorField::parse("sin:1", 1), 0, 0, phi));
  const auto s2 = basis->coefficients_of(nemytskii(*basis, ScalarField::parse("sin:2"), phi));
  for (int k = 0; k < 8; ++k) CHECK(std::abs(F[k] - 0.5 * s2[k]) <= 1e-14);
}

TEST_CASE("problem validation") {
  auto basis = sine(16);
  auto drv = geo(sample_fbm(0.5, 1, 6, 1));
  const VectorField f = VectorField::parse("sin:1", 1);
  CHECK_THROWS_AS(make_problem(basis, drv, f, low_modes(16), 0.45, 0.5), ParameterError);
  CHECK_THROWS_AS(make_problem(basis, drv, f, low_modes(16), 0.45, 0.96), ParameterError);
  CHECK_THROWS_AS(make_problem(basis, drv, f, low_modes(16), 0.3, 0.75), ParameterError);
  CHECK_THROWS_AS(make_problem(basis, drv, VectorField::parse("sin:1", 2), low_modes(16), 0.45, 0.75), ShapeError);
  CHECK_THROWS_AS(make_problem(basis, drv, f, low_modes(8), 0.45, 0.75), ShapeError);
  std::vector<double> rough(16, 1.0);
  CHECK_THROWS_AS(make_problem(basis, drv, f, Field::from_coefficients(rough), 0.45, 0.75), ParameterError);
  const Problem p = make_problem(basis, drv, f, low_modes(16), 0.45, 0.75);
  CHECK(p.beta_max() == doctest::Approx(0.2));
  CHECK_THROWS_AS(solve(p, 7), ParameterError);
  CHECK_THROWS_AS(step(p, std::vector<double>(3), 0, 4), ShapeError);
}
