#pragma once

// The Dirichlet series phi^+(n, s) = sum_{4 | c} S^+(0, n, c) / c^{2s}, its
// closed form, and the vanishing of S_{infinity infinity}(0, n, c).

#include <cstdint>
#include <vector>

#include "qtrace/ntheory.hpp"

namespace qtrace {

struct PhiPlusQuery {
  std::int64_t n = 1;
  cplx s{1.25, 0.0};
  double X = 1e5;
  FundDecomposition decomposition{1, Weight::plus_half(), 1, 1};

  /// AdmissibilityError unless n >= 1 and n = 0,1 mod 4; DomainError unless Re s > 3/4.
  static PhiPlusQuery make(std::int64_t n, cplx s, double X);
};

struct PhiPlusSeries {
  cplx value{0.0, 0.0};
  /// Rigorous bound on |sum_{c > X}|.
  double tail_bound = 0.0;
  std::size_t terms = 0;
};

/// Explicit C with sigma_0(c) <= C c^delta for every c >= 1.
double sigma0_constant(double delta);

/// 2 sum_{4 | c > X} sigma_0(c) gcd(n, c)^{1/2} c^{1/2 - 2 sigma}, majorized in closed form.
double phi_plus_tail_bound(std::int64_t n, double sigma, double X);

PhiPlusSeries phi_plus_series(const PhiPlusQuery& q, unsigned workers = 1, bool fast = true);

/// 2^{3/2 - 4s} w^{1 - 2s} L(2s - 1/2, chi_d) / zeta(4s - 1) S_d(w, 2s - 1), n = w^2 d.
cplx phi_plus_closed(std::int64_t n, cplx s);

/// True iff |S_{infinity infinity}(0, n, c)| < 1e-10. DomainError unless 4 | c.
bool vanishing_check(std::int64_t n, std::int64_t c, Weight wt);

/// Residue classes in which the sum is forced to vanish:
/// n = 0 mod 4 with c = 8 mod 16, or n = 1 mod 4 with c = 0 mod 16.
bool vanishing_expected(std::int64_t n, std::int64_t c);

struct PhiPlusReport {
  PhiPlusQuery query{};
  PhiPlusSeries series{};
  cplx closed{0.0, 0.0};
  double difference = 0.0;
  bool pass = false;
};

PhiPlusReport phi_plus_verify(std::int64_t n, cplx s, double X, unsigned workers = 1);

}  // namespace qtrace
