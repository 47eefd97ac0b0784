#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include "qtrace/errors.hpp"
#include "qtrace/kloosterman.hpp"
#include "qtrace/ntheory.hpp"
#include "qtrace/spectral.hpp"

using namespace qtrace;

namespace {

constexpr double kPi = std::numbers::pi;

int jacobi(std::int64_t a, std::int64_t n) {
  a %= n;
  if (a < 0) a += n;
  int r = 1;
  while (a != 0) {
    while (a % 2 == 0) {
      a /= 2;
      if (n % 8 == 3 || n % 8 == 5) r = -r;
    }
    std::swap(a, n);
    if (a % 4 == 3 && n % 4 == 3) r = -r;
    a %= n;
  }
  return n == 1 ? r : 0;
}

// S^+_{1/2}(0, n, c) straight from its definition; the m = 0 term needs no inverse.
double s_plus_zero_oracle(std::int64_t n, std::int64_t c) {
  cplx s = 0.0;
  for (std::int64_t d = 1; d < c; d += 2) {
    if (std::gcd(d, c) != 1) continue;
    const cplx eps = d % 4 == 1 ? cplx(1, 0) : cplx(0, 1);
    s += static_cast<double>(jacobi(c, d)) * eps * std::polar(1.0, 2 * kPi * static_cast<double>(n * d % c) / c);
  }
  return (std::polar(1.0, -kPi / 4.0) * s * (c % 8 == 0 ? 1.0 : 2.0)).real();
}

// L(2, chi_5) summed over whole periods; the omitted tail is below 5 / (2 N^2).
double l2_chi5() {
  const std::int64_t N = 2'000'000;
  double s = 0.0;
  for (std::int64_t k = N; k >= 1; --k) s += kronecker(5, k) / (static_cast<double>(k) * static_cast<double>(k));
  return s;
}

}  // namespace

TEST(PhiPlusQuery, Validation) {
  EXPECT_NO_THROW(PhiPlusQuery::make(5, 1.25, 1e3));
  EXPECT_THROW(PhiPlusQuery::make(2, 1.25, 1e3), AdmissibilityError);
  EXPECT_THROW(PhiPlusQuery::make(0, 1.25, 1e3), AdmissibilityError);
  EXPECT_THROW(PhiPlusQuery::make(5, 0.75, 1e3), DomainError);
  const auto q = PhiPlusQuery::make(45, 1.25, 1e3);
  EXPECT_EQ(q.decomposition.d, 5);
  EXPECT_EQ(q.decomposition.w, 3);
}

TEST(PhiPlusSeries, SmallCutoffs) {
  const auto empty = phi_plus_series(PhiPlusQuery::make(5, 1.25, 3.9));
  EXPECT_EQ(empty.value, cplx(0.0, 0.0));
  EXPECT_EQ(empty.terms, 0u);
  EXPECT_GT(empty.tail_bound, 0.0);
  const auto one = phi_plus_series(PhiPlusQuery::make(5, 1.25, 4));
  EXPECT_EQ(one.terms, 1u);
  EXPECT_NEAR(one.value.real(), s_plus_zero_oracle(5, 4) / std::pow(4.0, 2.5), 1e-14);
  EXPECT_NEAR(one.value.imag(), 0.0, 1e-14);
}

TEST(PhiPlusSeries, TermsMatchDefinition) {
  for (const std::int64_t n : {1, 4, 5, 8, 13}) {
    for (std::int64_t c = 4; c <= 400; c += 4) {
      ASSERT_NEAR(s_plus(KloostermanQuery::make(Weight::plus_half(), 0, n, c)), s_plus_zero_oracle(n, c), 1e-9)
          << n << " " << c;
    }
  }
}

TEST(PhiPlusClosed, N5Example) {
  const double expect = std::pow(2.0, -3.5) * l2_chi5() / (std::pow(kPi, 4) / 90.0);
  EXPECT_NEAR(phi_plus_closed(5, 1.25).real(), expect, 1e-10);
  EXPECT_NEAR(phi_plus_closed(5, 1.25).imag(), 0.0, 1e-14);
}

TEST(PhiPlusClosed, DivisorFactor) {
  // n = 45: the w = 3 factor is 3^{-3/2} frak_S_5(3, 3/2) relative to n = 5.
  const cplx ratio = phi_plus_closed(45, 1.25) / phi_plus_closed(5, 1.25);
  EXPECT_LT(std::abs(ratio - std::pow(3.0, -1.5) * frak_S(5, 3, 1.5)), 1e-12);
}

TEST(PhiPlus, SeriesWithinTailBoundOfClosedForm) {
  for (const std::int64_t n : {5, 8, 13, 45}) {
    for (const double s : {1.25, 1.5}) {
      const cplx closed = phi_plus_closed(n, s);
      for (const double X : {1e3, 1e4, 1e5}) {
        const auto r = phi_plus_series(PhiPlusQuery::make(n, s, X), 2);
        EXPECT_LE(std::abs(r.value - closed), r.tail_bound) << n << " " << s << " " << X;
      }
    }
  }
}

TEST(PhiPlus, SeriesConverges) {
  for (const std::int64_t n : {5, 13}) {
    const auto a = phi_plus_series(PhiPlusQuery::make(n, 1.25, 1e5), 2);
    const auto b = phi_plus_series(PhiPlusQuery::make(n, 1.25, 2e5), 2);
    EXPECT_LT(std::abs(a.value - b.value), a.tail_bound) << n;
  }
}

TEST(PhiPlus, VerifyReport) {
  const PhiPlusReport r = phi_plus_verify(8, 1.5, 1e4);
  EXPECT_TRUE(r.pass);
  EXPECT_NEAR(r.difference, std::abs(r.series.value - r.closed), 1e-15);
}

TEST(Vanishing, Examples) {
  EXPECT_TRUE(vanishing_check(4, 8, Weight::plus_half()));
  EXPECT_TRUE(vanishing_check(1, 16, Weight::plus_half()));
  EXPECT_FALSE(vanishing_check(4, 4, Weight::plus_half()));
  EXPECT_THROW(vanishing_check(1, 6, Weight::plus_half()), DomainError);
  EXPECT_TRUE(vanishing_expected(4, 24));
  EXPECT_TRUE(vanishing_expected(5, 32));
  EXPECT_FALSE(vanishing_expected(5, 8));
}

TEST(Vanishing, ExhaustiveInForcedClasses) {
  int checked = 0;
  for (std::int64_t c = 4; c <= 512; c += 4) {
    for (std::int64_t n = 1; n <= 64; ++n) {
      if (n % 4 == 2 || n % 4 == 3 || !vanishing_expected(n, c)) continue;
      ASSERT_TRUE(vanishing_check(n, c, Weight::plus_half())) << n << " " << c;
      ++checked;
    }
  }
  EXPECT_EQ(checked, 1024);
}

TEST(Sigma0Constant, BoundHoldsUpToOneMillion) {
  const std::size_t N = 1'000'000;
  std::vector<int> tau(N + 1, 0);
  for (std::size_t d = 1; d <= N; ++d) {
    for (std::size_t c = d; c <= N; c += d) ++tau[c];
  }
  for (const double delta : {0.25, 0.3, 0.5}) {
    const double C = sigma0_constant(delta);
    for (std::size_t c = 1; c <= N; ++c) {
      ASSERT_LE(static_cast<double>(tau[c]), C * std::pow(static_cast<double>(c), delta) * (1 + 1e-12))
          << delta << " " << c;
    }
  }
  EXPECT_THROW(sigma0_constant(0.0), DomainError);
}

TEST(Sigma0Constant, CrudeExponentBoundFails) {
  // sigma_0(c) <= c^{0.3} is false at highly composite c, so the tail bound carries a constant.
  EXPECT_EQ(sigma0(720720), 240u);
  EXPECT_GT(240.0, std::pow(720720.0, 0.3));
  EXPECT_GT(sigma0_constant(0.3), 1.0);
}
