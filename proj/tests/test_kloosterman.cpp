#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "qtrace/errors.hpp"
#include "qtrace/kloosterman.hpp"

using namespace qtrace;

namespace {

constexpr double kPi = std::numbers::pi;

cplx e(double x) {
  return std::polar(1.0, 2.0 * kPi * x);
}

// Jacobi symbol (a/n) for odd n > 0, by reciprocity.
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

std::int64_t inverse_by_search(std::int64_t d, std::int64_t c) {
  for (std::int64_t x = 1; x < c; ++x) {
    if ((d * x) % c == 1) return x;
  }
  return 0;
}

// The defining sum, written out term by term.
cplx s_plus_oracle(double k, std::int64_t m, std::int64_t n, std::int64_t c) {
  cplx s = 0.0;
  for (std::int64_t d = 1; d < c; d += 2) {
    if (std::gcd(d, c) != 1) continue;
    const cplx eps = d % 4 == 1 ? cplx(1, 0) : cplx(0, 1);
    const cplx eps2k = k > 0 ? eps : std::conj(eps);
    const std::int64_t dbar = inverse_by_search(d, c);
    const double phase = static_cast<double>(((m * dbar + n * d) % c + c) % c) / static_cast<double>(c);
    s += static_cast<double>(jacobi(c, d)) * eps2k * e(phase);
  }
  return e(-k / 4.0) * s * (c % 8 == 0 ? 1.0 : 2.0);
}

bool admissible(Weight wt, std::int64_t n) {
  const auto r = ((wt.sign() * n) % 4 + 4) % 4;
  return r == 0 || r == 1;
}

}  // namespace

TEST(SPlus, Examples) {
  EXPECT_NEAR(s_plus(KloostermanQuery::make(Weight::plus_half(), 1, 1, 4)), -2.0 * std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(s_plus(KloostermanQuery::make(Weight::minus_half(), 3, 3, 4)), -2.0 * std::sqrt(2.0), 1e-12);
  EXPECT_THROW(KloostermanQuery::make(Weight::plus_half(), 2, 1, 4), AdmissibilityError);
  EXPECT_THROW(KloostermanQuery::make(Weight::plus_half(), 1, 1, 6), AdmissibilityError);
  EXPECT_THROW(KloostermanQuery::make(Weight::plus_half(), -1, 1, 4), DomainError);
}

TEST(SPlus, MatchesDefiningSum) {
  for (const double k : {0.5, -0.5}) {
    const Weight wt = Weight::from_k(k);
    for (std::int64_t m = 0; m <= 13; ++m) {
      if (!admissible(wt, m)) continue;
      for (std::int64_t n = 0; n <= 13; ++n) {
        if (!admissible(wt, n)) continue;
        for (std::int64_t c = 4; c <= 200; c += 4) {
          const auto q = KloostermanQuery::make(wt, m, n, c);
          const cplx o = s_plus_oracle(k, m, n, c);
          ASSERT_LT(std::abs(o.imag()), 1e-9);
          ASSERT_NEAR(s_plus(q), o.real(), 1e-9) << k << " " << m << " " << n << " " << c;
        }
      }
    }
  }
}

TEST(SPlus, FastPathAgreesWithNaiveUpTo4096) {
  const std::pair<std::int64_t, std::int64_t> half[] = {{1, 5}, {0, 5}, {4, 8}, {1, 1}, {12, 13}};
  const std::pair<std::int64_t, std::int64_t> minus[] = {{3, 3}, {3, 4}, {0, 7}};
  for (std::int64_t c = 4; c <= 4096; c += 4) {
    for (const auto& [m, n] : half) {
      const auto q = KloostermanQuery::make(Weight::plus_half(), m, n, c);
      ASSERT_NEAR(s_plus_fast(q), s_plus(q), 1e-8) << c;
    }
    for (const auto& [m, n] : minus) {
      const auto q = KloostermanQuery::make(Weight::minus_half(), m, n, c);
      ASSERT_NEAR(s_plus_fast(q), s_plus(q), 1e-8) << c;
    }
  }
}

TEST(SPlus, WeightFlip) {
  std::mt19937 rng(2024);
  std::uniform_int_distribution<std::int64_t> idx(1, 60), mod(1, 150);
  int done = 0;
  while (done < 100) {
    const Weight wt = rng() % 2 ? Weight::plus_half() : Weight::minus_half();
    const std::int64_t m = idx(rng), n = idx(rng), c = 4 * mod(rng);
    if (!admissible(wt, m) || !admissible(wt, n)) continue;
    const Weight flip = wt == Weight::plus_half() ? Weight::minus_half() : Weight::plus_half();
    const cplx lhs = s_plus_complex(KloostermanQuery::make(wt, m, n, c));
    const cplx rhs = KloostermanTable(c, flip).plus_sum(-m, -n);
    ASSERT_LT(std::abs(lhs - rhs), 1e-10) << m << " " << n << " " << c;
    ++done;
  }
}

TEST(SPlus, SymmetricInMN) {
  for (const Weight wt : {Weight::plus_half(), Weight::minus_half()}) {
    for (std::int64_t c = 4; c <= 400; c += 12) {
      const KloostermanTable t(c, wt);
      for (std::int64_t m = 0; m <= 30; ++m) {
        for (std::int64_t n = m; n <= 30; ++n) {
          if (!admissible(wt, m) || !admissible(wt, n)) continue;
          ASSERT_LT(std::abs(t.plus_sum(m, n) - t.plus_sum(n, m)), 1e-10);
        }
      }
    }
  }
}

TEST(SPlus, WeilBoundAndReality) {
  for (const Weight wt : {Weight::plus_half(), Weight::minus_half()}) {
    for (std::int64_t c = 4; c <= 600; c += 4) {
      const KloostermanTable t(c, wt);
      for (std::int64_t m = 1; m <= 40; ++m) {
        for (std::int64_t n = 1; n <= 40; ++n) {
          if (!admissible(wt, m) || !admissible(wt, n)) continue;
          const cplx s = t.plus_sum(m, n);
          ASSERT_LT(std::abs(s.imag()), 1e-10);
          ASSERT_LE(std::abs(s.real()), weil_bound(m, n, c) + 1e-9);
        }
      }
    }
  }
}

TEST(WeilBound, Examples) {
  EXPECT_DOUBLE_EQ(weil_bound(1, 1, 4), 12.0);
  EXPECT_DOUBLE_EQ(weil_bound(1, 1, 1), 2.0);
  EXPECT_DOUBLE_EQ(weil_bound(4, 8, 4), 24.0);
}

TEST(SThetaInfinity, Examples) {
  EXPECT_LT(std::abs(s_theta_infinity(0, 4, 4, Weight::plus_half()) - cplx(1, 1)), 1e-12);
  EXPECT_LT(std::abs(s_theta_infinity(0, 4, 8, Weight::plus_half())), 1e-12);
  EXPECT_LT(std::abs(s_theta_infinity(0, 0, 4, Weight::plus_half()) - cplx(1, 1)), 1e-12);
  EXPECT_THROW(s_theta_infinity(0, 1, 6, Weight::plus_half()), DomainError);
}

TEST(SqrtMod, CrtMatchesScan) {
  for (std::int64_t c = 1; c <= 3000; ++c) {
    for (const std::int64_t A : {5, 13, 21, 33, 1, -3, 0}) ASSERT_EQ(sqrt_mod(A, c), sqrt_mod_scan(A, c)) << A << " " << c;
  }
}

TEST(WeylSum, Examples) {
  EXPECT_NEAR(weyl_sum(1, GenusCharacterSpec::make(5, 5), 4), -2.0, 1e-12);
  EXPECT_NEAR(weyl_sum(1, GenusCharacterSpec::make(5, 1), 12), 0.0, 1e-12);
  const auto s21 = GenusCharacterSpec::make(21, -3);
  EXPECT_NEAR(weyl_sum(1, s21, 4), weyl_via_kohnen(1, s21, 4), 1e-12);
  EXPECT_NEAR(weyl_sum(2, s21, 8), weyl_via_kohnen(2, s21, 8), 1e-9);
  EXPECT_NEAR(weyl_via_kohnen(1, GenusCharacterSpec::make(5, 5), 4), -2.0, 1e-12);
}

TEST(WeylSum, CrtMatchesScanUpTo10000) {
  for (const auto& [D, d] : {std::pair<std::int64_t, std::int64_t>{5, 1}, {21, -3}, {65, 5}}) {
    const auto spec = GenusCharacterSpec::make(D, d);
    for (std::int64_t c = 4; c <= 10000; c += 4) {
      ASSERT_NEAR(weyl_sum(1, spec, c), weyl_sum_scan(1, spec, c), 1e-9) << D << " " << c;
    }
  }
}

TEST(WeylSum, KohnenIdentityGrid) {
  const std::pair<std::int64_t, std::int64_t> pairs[] = {{1, 5}, {5, 1}, {1, 13}, {13, 1}, {-3, -7}, {-7, -3}};
  for (const auto& [d, dp] : pairs) {
    const auto spec = GenusCharacterSpec::make(d * dp, d);
    for (std::int64_t m = 1; m <= 4; ++m) {
      for (std::int64_t c = 4; c <= 400; c += 4) {
        ASSERT_NEAR(weyl_sum(m, spec, c), weyl_via_kohnen(m, spec, c), 1e-9) << d << " " << m << " " << c;
      }
    }
  }
}

TEST(PartialSums, Examples) {
  const auto fam = SumFamily::kloosterman(Weight::plus_half(), 1, 5);
  EXPECT_TRUE(partial_sums(fam, 3.9, {}).empty());
  const auto one = partial_sums(fam, 4, {});
  ASSERT_EQ(one.size(), 1u);
  EXPECT_NEAR(one[0].value, -2.0 * std::sqrt(2.0) / 4.0, 1e-12);
  StreamOptions small;
  small.cap = 100;
  EXPECT_THROW(partial_sums(fam, 101, small), ResourceError);
}

TEST(PartialSums, SubWeilDecayAt10000) {
  const auto fam = SumFamily::kloosterman(Weight::plus_half(), 1, 5);
  const auto rows = partial_sums(fam, 1e4, {});
  EXPECT_LT(std::abs(rows.back().value), std::pow(1e4, 0.45));
}

TEST(PartialSums, IndependentOfWorkersAndChunking) {
  const auto fam = SumFamily::kloosterman(Weight::plus_half(), 1, 5);
  StreamOptions a, b;
  b.workers = 4;
  b.chunk = 37;
  const auto x = partial_sums(fam, 20000, a);
  const auto y = partial_sums(fam, 20000, b);
  ASSERT_EQ(x.size(), y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    ASSERT_EQ(x[i].c, y[i].c);
    ASSERT_EQ(x[i].value, y[i].value);
  }
}

TEST(PartialSums, WeightModes) {
  const auto fam = SumFamily::weyl(1, GenusCharacterSpec::make(5, 1));
  StreamOptions a;
  a.mode = WeightMode::inv_sqrt_c;
  double acc = 0.0;
  for (const auto& r : partial_sums(fam, 400, a)) {
    ASSERT_NEAR(r.term, r.sum / std::sqrt(static_cast<double>(r.c)), 1e-15);
    acc += r.term;
    ASSERT_NEAR(r.value, acc, 1e-12);
  }
}
