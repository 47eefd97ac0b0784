#pragma once

// Elementary arithmetic: Kronecker symbols, discriminants, divisor sums and
// real quadratic Dirichlet L-values.

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace qtrace {

using cplx = std::complex<double>;

/// Half-integral weight k = lambda + 1/2 with k in {+1/2, -1/2}.
class Weight {
 public:
  static constexpr Weight plus_half() { return Weight(0); }
  static constexpr Weight minus_half() { return Weight(-1); }
  /// Accepts exactly 0.5 or -0.5.
  static Weight from_k(double k);

  constexpr int lambda() const { return lambda_; }
  constexpr double k() const { return lambda_ + 0.5; }
  /// (-1)^lambda
  constexpr int sign() const { return lambda_ == 0 ? 1 : -1; }

  friend constexpr bool operator==(Weight, Weight) = default;

 private:
  constexpr explicit Weight(int lambda) : lambda_(lambda) {}
  int lambda_;
};

struct PrimePower {
  std::uint64_t p;
  int e;
  friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

/// Largest input accepted by trial-division factorization.
inline constexpr std::uint64_t kFactorizationCap = 100'000'000;

/// Trial division with a 2-3-5 wheel. Rejects n == 0 and n > kFactorizationCap.
std::vector<PrimePower> factorize(std::uint64_t n);
std::vector<std::uint64_t> divisors(std::uint64_t n);

/// Kronecker symbol (a/n), total on Z x Z.
///   (a/0)  = 1 if a = +-1, else 0
///   (a/-1) = -1 if a < 0, else 1
///   (a/2)  = 0 if a even, 1 if a = +-1 mod 8, -1 if a = +-3 mod 8
int kronecker(std::int64_t a, std::int64_t n);

/// epsilon_d = 1 if d = 1 mod 4, i if d = 3 mod 4. Throws DomainError for even d.
cplx eps_factor(std::int64_t d);

bool is_discriminant(std::int64_t D);
bool is_fundamental(std::int64_t d);
bool is_square(std::int64_t n);
std::int64_t isqrt(std::int64_t n);

int moebius(std::uint64_t n);
std::uint64_t sigma0(std::uint64_t n);
std::uint64_t sigma1(std::uint64_t n);

struct FundDecomposition {
  std::int64_t n;
  Weight weight;
  std::int64_t d;  // fundamental discriminant
  std::int64_t w;  // (-1)^lambda n = w^2 d
};

/// Unique (d, w) with (-1)^lambda n = w^2 d and d fundamental.
/// AdmissibilityError when (-1)^lambda n = 2,3 mod 4.
FundDecomposition fund_decompose(std::int64_t n, Weight wt);

/// sigma_s(n) = sum_{l | n} l^s, or tau_s(n) = sigma_{2s}(n) / n^s when normalized.
cplx divisor_power_sum(std::uint64_t n, cplx s, bool normalized = false);

/// S_d(w, s) = sum_{l | w} mu(l) chi_d(l) tau_s(w/l) / sqrt(l).
cplx frak_S(std::int64_t d, std::uint64_t w, cplx s);

/// Hurwitz zeta(s, a) for 0 < a <= 1 and s != 1 by Euler-Maclaurin.
cplx hurwitz_zeta(cplx s, double a, double tol = 1e-15);

/// L(s, chi_d) for a fundamental discriminant d (d = 1 gives zeta(s)),
/// via Hurwitz decomposition over residues mod |d|. Requires Re s > 1/2.
cplx dirichlet_L(std::int64_t d, cplx s, double tol = 1e-13);

inline cplx riemann_zeta(cplx s, double tol = 1e-13) { return dirichlet_L(1, s, tol); }

/// delta_d = 1 if d == 1 else 0.
constexpr int delta(std::int64_t d) { return d == 1 ? 1 : 0; }

enum class SpecialValueKind {
  sigma_s,
  tau_s,
  frakS,
  moebius,
  kronecker,
  eps,
  dirichletL,
  zeta,
  delta_d
};

std::string to_string(SpecialValueKind kind);

/// A named arithmetic quantity recorded alongside a verification.
struct SpecialValue {
  SpecialValueKind kind;
  std::string argument;
  cplx value;
};

}  // namespace qtrace
