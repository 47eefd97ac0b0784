#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "qtrace/errors.hpp"
#include "qtrace/quadrature.hpp"
#include "qtrace/special_functions.hpp"

using namespace qtrace;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr long double kEuler = 0.577215664901532860606512090082402431L;

// Power series in long double; adequate for x <= 12, where terms peak near 1e4.
double si_series(double x) {
  const long double X = x;
  long double term = X, sum = X;
  for (int n = 1; n < 80; ++n) {
    term *= -X * X / ((2.0L * n) * (2.0L * n + 1.0L));
    sum += term / (2.0L * n + 1.0L);
  }
  return static_cast<double>(sum);
}

double ci_series(double x) {
  const long double X = x;
  long double term = 1.0L, sum = 0.0L;
  for (int n = 1; n < 80; ++n) {
    term *= -X * X / ((2.0L * n - 1.0L) * (2.0L * n));
    sum += term / (2.0L * n);
  }
  return static_cast<double>(kEuler + std::log(X) + sum);
}

// Leading asymptotics, valid to about 1e-11 once x >= 60.
double si_asymptotic(double x) {
  double f = 0.0, g = 0.0, t = 1.0 / x;
  for (int k = 0; k < 8; ++k) {
    f += (k % 2 ? -1.0 : 1.0) * t;
    t *= (2.0 * k + 1.0) / x;
    g += (k % 2 ? -1.0 : 1.0) * t;
    t *= (2.0 * k + 2.0) / x;
  }
  return kPi / 2.0 - f * std::cos(x) - g * std::sin(x);
}

}  // namespace

TEST(SineCosineIntegrals, MatchSeriesOracle) {
  for (double x = 0.05; x <= 12.0; x += 0.0625) {
    ASSERT_NEAR(sin_integral(x), si_series(x), 1e-10) << x;
    ASSERT_NEAR(cos_integral(x), ci_series(x), 1e-10) << x;
  }
}

TEST(SineCosineIntegrals, MatchAsymptoticOracle) {
  for (double x = 60.0; x <= 5000.0; x *= 1.37) ASSERT_NEAR(sin_integral(x), si_asymptotic(x), 1e-10) << x;
}

TEST(SineCosineIntegrals, SiLimit) {
  EXPECT_NEAR(sin_integral(1e8), kPi / 2.0, 1e-7);
  EXPECT_NEAR(sin_integral(-2.0), -sin_integral(2.0), 1e-15);
  EXPECT_EQ(sin_integral(0.0), 0.0);
}

TEST(SineCosineIntegrals, CiDerivative) {
  // Ci'(x) = cos x / x, checked by central differences across the series/asymptotic switch.
  for (const double x : {0.5, 2.0, 3.9, 4.0, 4.1, 10.0, 40.0}) {
    const double h = 1e-5;
    EXPECT_NEAR((cos_integral(x + h) - cos_integral(x - h)) / (2 * h), std::cos(x) / x, 1e-7) << x;
  }
  EXPECT_THROW(cos_integral(0.0), DomainError);
}

TEST(KernelF, ValueAtHalfPi) {
  EXPECT_NEAR(kernel_f(kPi / 2.0), ci_series(kPi) + std::log(2.0), 1e-10);
  EXPECT_NEAR(kernel_f(kPi / 2.0), 0.7668150926, 1e-9);
}

TEST(KernelF, MatchesDefinition) {
  for (double x = 0.01; x < 6.0; x += 0.03) {
    const double expect = ci_series(2 * x) * std::sin(x) - si_series(2 * x) * std::cos(x) + std::log(2.0) * std::sin(x);
    ASSERT_NEAR(kernel_f(x), expect, 1e-10) << x;
  }
}

TEST(KernelF, EnvelopeBound) {
  for (double x = 1e-6; x < 1e4; x *= 1.05) {
    const double envelope = std::min(1.0, x * std::abs(std::log(x)) + x);
    ASSERT_LE(std::abs(kernel_f(x)), 3.0 * envelope) << x;
  }
  EXPECT_LT(std::abs(kernel_f(1e-8)), 1e-6);
}

TEST(Quadrature, SmoothIntegrands) {
  QuadratureSpec spec;
  spec.abs_tol = 1e-12;
  const auto f = [](double x) { return cplx(std::exp(x), std::sin(x)); };
  const cplx exact(std::exp(1.0) - 1.0, 1.0 - std::cos(1.0));
  for (const auto s : {QuadratureScheme::adaptive_gauss, QuadratureScheme::composite_gauss}) {
    spec.scheme = s;
    const QuadResult r = integrate(f, 0.0, 1.0, spec);
    EXPECT_LT(std::abs(r.value - exact), 1e-12) << to_string(s);
    EXPECT_GT(r.nodes, 0u);
  }
}

TEST(Quadrature, OscillatoryIntegrandConverges) {
  const auto f = [](double x) { return cplx(std::cos(200.0 * x), 0.0); };
  const QuadResult r = adaptive_gauss_kronrod(f, 0.0, 1.0, 1e-11, 1'000'000);
  EXPECT_NEAR(r.value.real(), std::sin(200.0) / 200.0, 1e-11);
}

TEST(Quadrature, BudgetExhaustionRaises) {
  const auto f = [](double x) { return cplx(std::cos(5000.0 * x), 0.0); };
  EXPECT_THROW(adaptive_gauss_kronrod(f, 0.0, 1.0, 1e-12, 200), AccuracyError);
  EXPECT_THROW(composite_gauss(f, 0.0, 1.0, 1e-12, 200), AccuracyError);
}

TEST(Quadrature, SpecValidation) {
  QuadratureSpec spec;
  spec.abs_tol = 0.0;
  EXPECT_THROW(spec.validate(), DomainError);
  spec.abs_tol = 1e-8;
  spec.max_nodes = 0;
  EXPECT_THROW(spec.validate(), DomainError);
  EXPECT_EQ(parse_scheme(to_string(QuadratureScheme::composite_gauss)), QuadratureScheme::composite_gauss);
  EXPECT_EQ(parse_precision_mode(to_string(PrecisionMode::extended)), PrecisionMode::extended);
  EXPECT_THROW(parse_scheme("simpson"), DomainError);
}

TEST(Quadrature, TanhSinhEndpointSingularities) {
  const QuadResult a = tanh_sinh([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, 1e-12);
  EXPECT_NEAR(a.value.real(), 2.0, 1e-10);
  const QuadResult b = tanh_sinh([](double x) { return std::log(x); }, 0.0, 1.0, 1e-12);
  EXPECT_NEAR(b.value.real(), -1.0, 1e-10);
}
