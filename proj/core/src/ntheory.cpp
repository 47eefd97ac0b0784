#include "qtrace/ntheory.hpp"

#include <boost/math/special_functions/bernoulli.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "qtrace/errors.hpp"

namespace qtrace {

namespace {

std::int64_t mod(std::int64_t a, std::int64_t m) {
  std::int64_t r = a % m;
  return r < 0 ? r + m : r;
}

// Jacobi symbol (a/n) for odd n > 0, 0 <= a < n.
int jacobi(std::uint64_t a, std::uint64_t n) {
  int t = 1;
  while (a != 0) {
    while ((a & 1U) == 0) {
      a >>= 1;
      const std::uint64_t r = n & 7U;
      if (r == 3 || r == 5) t = -t;
    }
    std::swap(a, n);
    if ((a & 3U) == 3 && (n & 3U) == 3) t = -t;
    a %= n;
  }
  return n == 1 ? t : 0;
}

bool squarefree(std::uint64_t n) {
  if (n == 0) return false;
  for (const auto& [p, e] : factorize(n)) {
    if (e > 1) return false;
  }
  return true;
}

// (e^w - 1) / w, accurate near w = 0.
cplx expm1_ratio(cplx w) {
  if (std::abs(w) < 0.25) {
    cplx term = 1.0;
    cplx sum = 1.0;
    for (int k = 2; k < 30; ++k) {
      term *= w / static_cast<double>(k);
      sum += term;
      if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
  }
  return (std::exp(w) - 1.0) / w;
}

// Euler-Maclaurin tail for zeta(s, a) with the pole term 1/(s-1) removed,
// i.e. zeta(s, a) - 1/(s-1). Returns false if the asymptotic terms stall
// above the requested tolerance.
bool hurwitz_regular_part(cplx s, double a, int N, double tol, cplx& out) {
  cplx sum = 0.0;
  for (int k = 0; k < N; ++k) {
    sum += std::exp(-s * std::log(k + a));
  }
  const double x = N + a;
  const double lx = std::log(x);
  // (x^{1-s} - 1)/(s - 1) = -log x * expm1_ratio((1-s) log x)
  sum += -lx * expm1_ratio((1.0 - s) * lx);
  const cplx xs = std::exp(-s * lx);
  sum += 0.5 * xs;

  cplx rising = s;         // s (s+1) ... (s+2j-2)
  cplx power = xs / x;     // x^{-s-2j+1}
  double fact = 2.0;       // (2j)!
  double prev = INFINITY;
  for (int j = 1; j <= 40; ++j) {
    const double b2j = boost::math::bernoulli_b2n<double>(j);
    const cplx term = b2j / fact * rising * power;
    sum += term;
    const double mag = std::abs(term);
    if (mag < tol) {
      out = sum;
      return true;
    }
    if (mag > prev) return false;
    prev = mag;
    rising *= (s + static_cast<double>(2 * j - 1)) * (s + static_cast<double>(2 * j));
    power /= x * x;
    fact *= static_cast<double>((2 * j + 1) * (2 * j + 2));
  }
  return false;
}

cplx hurwitz_regular(cplx s, double a, double tol) {
  int N = std::max(8, static_cast<int>(std::abs(s.imag())) + 8);
  while (N <= 200000) {
    cplx out;
    if (hurwitz_regular_part(s, a, N, tol, out)) return out;
    N *= 2;
  }
  throw AccuracyError("hurwitz_zeta: tolerance unreachable");
}

}  // namespace

Weight Weight::from_k(double k) {
  if (k == 0.5) return plus_half();
  if (k == -0.5) return minus_half();
  throw DomainError("weight must be +1/2 or -1/2");
}

std::vector<PrimePower> factorize(std::uint64_t n) {
  if (n == 0) throw DomainError("factorize: n must be positive");
  if (n > kFactorizationCap) throw ResourceError("factorize: input exceeds trial-division cap");
  std::vector<PrimePower> out;
  auto take = [&](std::uint64_t p) {
    if (n % p != 0) return;
    int e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    out.push_back({p, e});
  };
  take(2);
  take(3);
  take(5);
  static constexpr std::array<std::uint64_t, 8> kGaps = {4, 2, 4, 2, 4, 6, 2, 6};
  std::uint64_t p = 7;
  for (std::size_t i = 0; p * p <= n; p += kGaps[i], i = (i + 1) % kGaps.size()) {
    take(p);
  }
  if (n > 1) out.push_back({n, 1});
  return out;
}

std::vector<std::uint64_t> divisors(std::uint64_t n) {
  std::vector<std::uint64_t> out{1};
  for (const auto& [p, e] : factorize(n)) {
    const std::size_t base = out.size();
    std::uint64_t pk = 1;
    for (int k = 1; k <= e; ++k) {
      pk *= p;
      for (std::size_t i = 0; i < base; ++i) out.push_back(out[i] * pk);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

int kronecker(std::int64_t a, std::int64_t n) {
  if (n == 0) return (a == 1 || a == -1) ? 1 : 0;
  int result = 1;
  if (n < 0) {
    n = -n;
    if (a < 0) result = -result;
  }
  int v = 0;
  while ((n & 1) == 0) {
    n >>= 1;
    ++v;
  }
  if (v > 0) {
    if ((a & 1) == 0) return 0;
    if (v & 1) {
      const std::int64_t r = mod(a, 8);
      if (r == 3 || r == 5) result = -result;
    }
  }
  if (n == 1) return result;
  return result * jacobi(static_cast<std::uint64_t>(mod(a, n)), static_cast<std::uint64_t>(n));
}

cplx eps_factor(std::int64_t d) {
  if ((d & 1) == 0) throw DomainError("eps_factor: d must be odd");
  return mod(d, 4) == 1 ? cplx(1.0, 0.0) : cplx(0.0, 1.0);
}

bool is_discriminant(std::int64_t D) {
  const std::int64_t r = mod(D, 4);
  return r == 0 || r == 1;
}

bool is_fundamental(std::int64_t d) {
  if (d == 0) return false;
  const std::int64_t r = mod(d, 4);
  const auto ad = static_cast<std::uint64_t>(d < 0 ? -d : d);
  if (r == 1) return squarefree(ad);
  if (r != 0) return false;
  const std::int64_t m = d / 4;
  const std::int64_t rm = mod(m, 4);
  return (rm == 2 || rm == 3) && squarefree(ad / 4);
}

std::int64_t isqrt(std::int64_t n) {
  if (n < 0) throw DomainError("isqrt of negative");
  auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

bool is_square(std::int64_t n) {
  if (n < 0) return false;
  const std::int64_t r = isqrt(n);
  return r * r == n;
}

int moebius(std::uint64_t n) {
  int mu = 1;
  for (const auto& [p, e] : factorize(n)) {
    if (e > 1) return 0;
    mu = -mu;
  }
  return mu;
}

std::uint64_t sigma0(std::uint64_t n) {
  std::uint64_t r = 1;
  for (const auto& [p, e] : factorize(n)) r *= static_cast<std::uint64_t>(e + 1);
  return r;
}

std::uint64_t sigma1(std::uint64_t n) {
  std::uint64_t r = 1;
  for (const auto& [p, e] : factorize(n)) {
    std::uint64_t s = 1, pk = 1;
    for (int k = 0; k < e; ++k) {
      pk *= p;
      s += pk;
    }
    r *= s;
  }
  return r;
}

FundDecomposition fund_decompose(std::int64_t n, Weight wt) {
  if (n <= 0) throw DomainError("fund_decompose: n must be positive");
  const std::int64_t N = wt.sign() * n;
  if (!is_discriminant(N)) throw AdmissibilityError("plus-space condition violated: (-1)^lambda n = 2,3 mod 4");
  std::int64_t core = 1;
  std::int64_t f = 1;
  for (const auto& [p, e] : factorize(static_cast<std::uint64_t>(n))) {
    for (int k = 0; k < e / 2; ++k) f *= static_cast<std::int64_t>(p);
    if (e % 2) core *= static_cast<std::int64_t>(p);
  }
  core *= wt.sign();
  if (mod(core, 4) == 1) return {n, wt, core, f};
  // core = 2,3 mod 4 forces f even since N = 0 mod 4
  return {n, wt, 4 * core, f / 2};
}

cplx divisor_power_sum(std::uint64_t n, cplx s, bool normalized) {
  if (n == 0) throw DomainError("divisor_power_sum: n must be positive");
  cplx sum = 0.0;
  const double ln = std::log(static_cast<double>(n));
  for (const std::uint64_t l : divisors(n)) {
    const double ll = std::log(static_cast<double>(l));
    sum += normalized ? std::exp(s * (2.0 * ll - ln)) : std::exp(s * ll);
  }
  return sum;
}

cplx frak_S(std::int64_t d, std::uint64_t w, cplx s) {
  if (!is_fundamental(d)) throw DomainError("frak_S: d must be a fundamental discriminant");
  if (w == 0) throw DomainError("frak_S: w must be positive");
  cplx sum = 0.0;
  for (const std::uint64_t l : divisors(w)) {
    const int mu = moebius(l);
    if (mu == 0) continue;
    const int chi = kronecker(d, static_cast<std::int64_t>(l));
    if (chi == 0) continue;
    sum += static_cast<double>(mu * chi) * divisor_power_sum(w / l, s, true) /
           std::sqrt(static_cast<double>(l));
  }
  return sum;
}

cplx hurwitz_zeta(cplx s, double a, double tol) {
  if (s == cplx(1.0, 0.0)) throw DomainError("hurwitz_zeta: pole at s = 1");
  if (!(a > 0.0 && a <= 1.0)) throw DomainError("hurwitz_zeta: a must lie in (0, 1]");
  return hurwitz_regular(s, a, tol) + 1.0 / (s - 1.0);
}

cplx dirichlet_L(std::int64_t d, cplx s, double tol) {
  if (!is_fundamental(d)) throw DomainError("dirichlet_L: d must be a fundamental discriminant");
  if (!(s.real() > 0.5)) throw DomainError("dirichlet_L: requires Re s > 1/2");
  if (!(tol > 0.0)) throw DomainError("dirichlet_L: tolerance must be positive");
  if (tol < 1e-15) throw AccuracyError("dirichlet_L: tolerance below double-precision floor");
  if (d == 1) {
    if (s == cplx(1.0, 0.0)) throw DomainError("dirichlet_L: zeta has a pole at s = 1");
    return hurwitz_zeta(s, 1.0, tol);
  }
  const std::int64_t q = d < 0 ? -d : d;
  const double qd = static_cast<double>(q);
  // Pole terms cancel since sum_a chi(a) = 0.
  cplx sum = 0.0;
  for (std::int64_t r = 1; r <= q; ++r) {
    const int chi = kronecker(d, r);
    if (chi == 0) continue;
    sum += static_cast<double>(chi) * hurwitz_regular(s, static_cast<double>(r) / qd, tol / qd);
  }
  return std::exp(-s * std::log(qd)) * sum;
}

std::string to_string(SpecialValueKind kind) {
  switch (kind) {
    case SpecialValueKind::sigma_s: return "sigma_s";
    case SpecialValueKind::tau_s: return "tau_s";
    case SpecialValueKind::frakS: return "frakS";
    case SpecialValueKind::moebius: return "moebius";
    case SpecialValueKind::kronecker: return "kronecker";
    case SpecialValueKind::eps: return "eps";
    case SpecialValueKind::dirichletL: return "dirichletL";
    case SpecialValueKind::zeta: return "zeta";
    case SpecialValueKind::delta_d: return "delta_d";
  }
  return "unknown";
}

}  // namespace qtrace
