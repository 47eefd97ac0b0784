#pragma once

// Exact q-expansions of j and j_m, Faber polynomials, reduction to the
// standard fundamental domain, pointwise evaluation and CM traces.

#include <gmpxx.h>

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "qtrace/ntheory.hpp"

namespace qtrace {

inline constexpr int kJSeriesCap = 256;
inline constexpr int kFaberCap = 32;

/// sum_{i} coeffs[i] q^{leading_exponent + i}.
struct QSeries {
  int leading_exponent = 0;
  std::vector<mpz_class> coeffs;

  /// Largest exponent carried.
  int max_exponent() const { return leading_exponent + static_cast<int>(coeffs.size()) - 1; }
  /// Coefficient of q^n; zero outside the stored range below max_exponent().
  mpz_class coefficient(int n) const;
};

/// j = q^{-1} + 744 + 196884 q + ... through q^N, via E4^3 / Delta.
/// ResourceError for N > cap. Memoized in process.
QSeries j_coefficients(int N, int cap = kJSeriesCap);

/// As above, reading and writing the JSON cache file under cache_dir.
QSeries j_coefficients(int N, const std::filesystem::path& cache_dir, int cap = kJSeriesCap);

std::filesystem::path j_cache_file(const std::filesystem::path& cache_dir, int N);

/// Flag value if nonempty, else $QTRACE_CACHE_DIR, else $XDG_CACHE_HOME/qtrace,
/// else $HOME/.cache/qtrace.
std::filesystem::path resolve_cache_dir(const std::string& flag);

struct FaberPolynomial {
  int m = 1;
  /// coeffs[i] multiplies X^i; coeffs[m] == 1.
  std::vector<mpz_class> coeffs;
};

/// Monic P_m with P_m(j) = q^{-m} + O(q). ResourceError for m > kFaberCap.
FaberPolynomial faber_polynomial(int m);

/// P_m(j) composed in exact arithmetic through q^N.
QSeries compose_faber(const FaberPolynomial& p, int N);

/// j_m through q^N from the Hecke relation c_m(n) = sum_{d | (m,n)} (m/d) c(mn/d^2).
QSeries jm_series(int m, int N);

struct DomainPoint {
  cplx z;
  cplx reduced;
  /// gamma = {a, b, c, d} in SL2(Z) with gamma z = reduced.
  std::array<std::int64_t, 4> word{1, 0, 0, 1};
};

/// PrecisionError when Im z <= 1e-8.
DomainPoint reduce_to_fundamental_domain(cplx z);

/// Terms of the j_m series needed at the lowest point of the fundamental domain.
int jm_truncation(int m);

/// j_m(z) through the q-expansion of j_m at the reduced point.
cplx eval_jm(int m, cplx z);

/// j_m(z) at a reduced point with an explicit truncation, for convergence checks.
cplx eval_jm_reduced(int m, cplx z, int N);

/// P_m(j(z)) with j from its own q-series; cross-check route.
cplx eval_jm_faber(int m, cplx z);

struct CmTrace {
  std::int64_t d = 0;
  int m = 1;
  double value = 0.0;
  /// Nearest integer and the distance to it, from the high-precision sum.
  mpz_class nearest;
  double distance = 0.0;
  std::size_t class_number = 0;
  int omega = 1;
};

/// (1/omega_d) sum over reduced forms of j_m(z_A), z_A = (-b + i sqrt|d|) / (2a),
/// evaluated in MPFR at a precision scaled to exp(pi m sqrt|d|).
CmTrace cm_trace_detailed(std::int64_t d, int m);

double cm_trace(std::int64_t d, int m);

/// Tr_d(j_1) - sum_{Im z_A > 1} e(-z_A), the q^{-1} term dropped form by form.
double cm_trace_deviation(std::int64_t d);

}  // namespace qtrace
