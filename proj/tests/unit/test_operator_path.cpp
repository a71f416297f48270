#include <doctest.h>

#include <cmath>
#include <numbers>

#include "roughheat/error.hpp"
#include "roughheat/operator_path.hpp"

using namespace roughheat;

namespace {

BasisPtr sine(int K) { return std::make_shared<const SpectralBasis>(SpectralBasis::make(K, 1.0, 0.0, 2 * K)); }

DriverPtr geo(DriverPath p, Lift lift = Lift::piecewise_linear) {
  return std::make_shared<const EnhancedDriver>(
      enhance_geometric(std::make_shared<const DriverPath>(std::move(p)), lift));
}

}  // namespace

TEST_CASE("quadrature weights integrate quadratics exactly") {
  const std::vector<double> lam{0.0, 1e-3, 0.7, 3.0, 50.0, 4e4};
  const double h = 0.01;
  const auto w = exp_quadrature_weights(lam, h);
  for (std::size_t k = 0; k < lam.size(); ++k) {
    const double z = lam[k] * h;
    CHECK(w.decay[k] == doctest::Approx(std::exp(-z)).epsilon(1e-15));
    // int_0^h lambda e^{-lambda r} dr
    CHECK(w.right[k] + w.mid[k] + w.left[k] == doctest::Approx(-std::expm1(-z)).epsilon(1e-12).scale(1e-300));
    // int_0^h lambda e^{-lambda r} (r/h) dr
    const double m1 = z < 1e-2 ? z / 2 - z * z / 3 + z * z * z / 8 - z * z * z * z / 30
                               : (1.0 - std::exp(-z) * (1.0 + z)) / z;
    CHECK(0.5 * w.mid[k] + w.left[k] == doctest::Approx(m1).epsilon(1e-10).scale(1e-300));
  }
  CHECK(w.right[0] == 0.0);
}

TEST_CASE("lambda = 0 reduces to the driver itself") {
  auto basis = std::make_shared<const SpectralBasis>(SpectralBasis::pointwise({0.0}));
  auto drv = geo(sample_fbm(0.5, 2, 8, 4));
  const ConvRoughPath crp(basis, drv, 2);
  for (auto [a, b] : {std::pair{0, 256}, {13, 14}, {100, 164}}) {
    const double s = a / 256.0, t = b / 256.0;
    const auto ops = crp.operators(a, b);
    for (int i = 0; i < 2; ++i) {
      CHECK(ops->x[i].multipliers[0] == doctest::Approx(drv->increment(i, s, t)).epsilon(1e-14));
      CHECK(ops->ax[i].multipliers[0] == 0.0);
      for (int j = 0; j < 2; ++j) {
        CHECK(ops->xx[i * 2 + j].multipliers[0] == doctest::Approx(drv->area(i, j, s, t)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("X^x - X^ax is the increment") {
  auto basis = sine(32);
  auto drv = geo(sample_fbm(0.45, 2, 9, 8));
  const ConvRoughPath crp(basis, drv, 2);
  const auto ops = crp.operators(37, 301);
  for (int i = 0; i < 2; ++i) {
    const double dx = drv->increment(i, 37 / 512.0, 301 / 512.0);
    for (std::size_t k = 0; k < 32; ++k) {
      CHECK(ops->x[i].multipliers[k] - ops->ax[i].multipliers[k] == doctest::Approx(dx).epsilon(1e-12));
    }
  }
}

TEST_CASE("closed forms for x = t") {
  auto basis = sine(16);
  const ConvRoughPath crp(basis, geo(make_linear({1.0}, 7)), 2);
  const double s = 0.25, t = 0.875, tau = t - s;
  const auto ops = crp.operators_at(s, t);
  for (int k = 0; k < 16; ++k) {
    const double lam = basis->eigenvalue(k);
    const double e = std::exp(-lam * tau);
    const double x = (1.0 - e) / lam;
    const double ax = x - tau;
    const double xx = tau / lam - (1.0 - e) / (lam * lam);
    CHECK(ops->x[0].multipliers[k] == doctest::Approx(x).epsilon(1e-12));
    CHECK(ops->ax[0].multipliers[k] == doctest::Approx(ax).epsilon(1e-12));
    CHECK(ops->xx[0].multipliers[k] == doctest::Approx(xx).epsilon(1e-11));
  }
}

TEST_CASE("constant driver gives zero operators") {
  const ConvRoughPath crp(sine(8), geo(make_linear({0.0, 0.0}, 5)), 1);
  const auto ops = crp.operators(3, 29);
  for (const auto* group : {&ops->x, &ops->ax, &ops->xx}) {
    for (const auto& op : *group) {
      for (double v : op.multipliers) CHECK(v == 0.0);
    }
  }
}

TEST_CASE("cochain relations") {
  auto basis = sine(64);
  auto drv = geo(sample_fbm(0.5, 2, 9, 31));
  const ConvRoughPath crp(basis, drv, 2);
  const double h = 1.0 / 512;
  for (auto [a, b, c] : {std::tuple{0, 256, 512}, {10, 11, 12}, {17, 200, 480}, {64, 64, 128}, {5, 90, 90}}) {
    for (int i = 0; i < 2; ++i) {
      CHECK(cochain_defect_x(crp, i, a * h, b * h, c * h) <= 1e-12);
      for (int j = 0; j < 2; ++j) CHECK(cochain_defect_xx(crp, i, j, a * h, b * h, c * h) <= 1e-12);
    }
  }
  CHECK(cochain_defect_x(crp, 0, 0.5, 0.5, 0.5) == 0.0);
  CHECK_THROWS_AS(cochain_defect_x(crp, 0, 0.5, 0.25, 1.0), ParameterError);
  CHECK_THROWS_AS(crp.operators_at(0.0, 0.3), DyadicError);
  CHECK_THROWS_AS(crp.operators(5, 5), ParameterError);
  CHECK_THROWS_AS(crp.build_Xxx(2, 0, 0.0, 0.5), ParameterError);
}

TEST_CASE("regular driver against the independent oracle") {
  for (int K : {16, 128}) {
    auto basis = sine(K);
    for (int which = 0; which < 2; ++which) {
      DriverPath p = which == 0 ? make_linear({1.0}, 8) : make_sinusoid({1.0}, {1.0}, 8);
      const double sup_deriv = which == 0 ? 1.0 : 2.0 * std::numbers::pi;
      auto drv = geo(std::move(p), Lift::exact);
      const ConvRoughPath crp(basis, drv, 6);
      for (auto [s, t] : {std::pair{0.0, 1.0}, {0.25, 0.5}, {0.5, 0.5078125}}) {
        const auto got = crp.build_Xx(0, s, t);
        const auto ref = oracle_regular_Xx(*basis, drv->path(), 0, s, t, crp.quad_level());
        // measured against the size sup|x'| (1 - e^{-lambda tau}) / lambda of the mode
        for (int k = 0; k < K; ++k) {
          const double lam = basis->eigenvalue(k);
          const double scale = sup_deriv * -std::expm1(-lam * (t - s)) / lam;
          CHECK(std::abs(got.multipliers[k] - ref.multipliers[k]) <= 1e-6 * scale);
        }
      }
    }
  }
  auto fbm = sample_fbm(0.5, 1, 6, 1);
  CHECK_THROWS_AS(oracle_regular_Xx(*sine(4), fbm, 0, 0.0, 1.0, 6), ParameterError);
}

TEST_CASE("operator Hoelder norms") {
  auto basis = sine(32);
  const ConvRoughPath lin(basis, geo(make_linear({1.0}, 10)), 2);
  CHECK(operator_holder_norm(lin, OperatorKind::x, 0.45, 0.5, 0.0, 6) <= 1.0);
  const ConvRoughPath crp(basis, geo(sample_fbm(0.5, 1, 10, 6)), 2);
  const double x4 = operator_holder_norm(crp, OperatorKind::x, 0.45, 0.5, 0.2, 4);
  const double x7 = operator_holder_norm(crp, OperatorKind::x, 0.45, 0.5, 0.2, 7);
  CHECK(x4 > 0.0);
  CHECK(x7 >= x4);
  CHECK(x7 <= 3.0 * x4);
  CHECK(std::isfinite(operator_holder_norm(crp, OperatorKind::ax, 0.45, 0.2, 0.0, 7)));
  CHECK(std::isfinite(operator_holder_norm(crp, OperatorKind::xx, 0.45, 0.2, 0.3, 7)));
  CHECK_THROWS_AS(operator_holder_norm(crp, OperatorKind::x, 0.45, 0.5, 0.45, 4), ParameterError);
  CHECK_THROWS_AS(operator_holder_norm(crp, OperatorKind::x, 0.45, 0.5, 0.0, 11), ParameterError);
}

TEST_CASE("cache returns the same operators and rebuilds bitwise") {
  const ConvRoughPath crp(sine(24), geo(sample_fbm(0.5, 2, 8, 2)), 2);
  const auto a = crp.operators(16, 48);
  CHECK(crp.operators(16, 48).get() == a.get());
  CHECK(crp.cache_size() == 1);
  crp.clear_cache();
  CHECK(crp.cache_size() == 0);
  const auto b = crp.operators(16, 48);
  CHECK(b.get() != a.get());
  for (std::size_t n = 0; n < a->xx.size(); ++n) CHECK(a->xx[n].multipliers == b->xx[n].multipliers);
  for (std::size_t n = 0; n < a->x.size(); ++n) CHECK(a->x[n].multipliers == b->x[n].multipliers);
}

TEST_CASE("operators commute with the semigroup") {
  auto basis = sine(16);
  const ConvRoughPath crp(basis, geo(sample_fbm(0.5, 1, 6, 3)), 1);
  const auto X = crp.build_Xx(0, 0.25, 0.75);
  std::vector<double> c(16);
  for (int k = 0; k < 16; ++k) c[k] = 1.0 / (1.0 + k);
  const Field phi = Field::from_coefficients(c);
  const auto lhs = basis->coefficients_of(basis->semigroup_apply(0.1, X.apply(*basis, phi)));
  const auto rhs = basis->coefficients_of(X.apply(*basis, basis->semigroup_apply(0.1, phi)));
  for (int k = 0; k < 16; ++k) CHECK(lhs[k] == doctest::Approx(rhs[k]).epsilon(1e-15));
  std::vector<double> out(16, 1.0);
  X.accumulate(c, out);
  for (int k = 0; k < 16; ++k) CHECK(out[k] == doctest::Approx(1.0 + X.multipliers[k] * c[k]).epsilon(1e-15));
  std::vector<double> bad(3);
  CHECK_THROWS_AS(X.accumulate(bad, out), ShapeError);
}
