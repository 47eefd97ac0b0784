#include "qtrace/kloosterman.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <numeric>
#include <thread>
#include <tuple>

#include "qtrace/errors.hpp"

namespace qtrace {

namespace {

__extension__ typedef __int128 i128;

std::int64_t mod(std::int64_t a, std::int64_t m) {
  const std::int64_t r = a % m;
  return r < 0 ? r + m : r;
}

std::int64_t mulmod(std::int64_t a, std::int64_t b, std::int64_t m) {
  return static_cast<std::int64_t>(static_cast<i128>(a) * b % m);
}

std::int64_t powmod(std::int64_t a, std::int64_t e, std::int64_t m) {
  std::int64_t r = 1 % m;
  a = mod(a, m);
  while (e > 0) {
    if (e & 1) r = mulmod(r, a, m);
    a = mulmod(a, a, m);
    e >>= 1;
  }
  return r;
}

// Inverse of a modulo m; a and m coprime.
std::int64_t invmod(std::int64_t a, std::int64_t m) {
  std::int64_t g = m, x = 0, x1 = 1, a1 = mod(a, m);
  while (a1 != 0) {
    const std::int64_t q = g / a1;
    std::tie(g, a1) = std::make_tuple(a1, g - q * a1);
    std::tie(x, x1) = std::make_tuple(x1, x - q * x1);
  }
  return mod(x, m);
}

cplx unit(std::int64_t j, std::int64_t c) {
  const double t = 2.0 * std::numbers::pi * static_cast<double>(mod(j, c)) / static_cast<double>(c);
  return {std::cos(t), std::sin(t)};
}

// e(-k/4) for k = +-1/2.
cplx eighth_root(Weight wt) {
  const double s = std::sqrt(0.5);
  return wt.lambda() == 0 ? cplx(s, -s) : cplx(s, s);
}

cplx multiplier_eps(std::int64_t d, Weight wt) {
  const bool three = mod(d, 4) == 3;
  if (!three) return 1.0;
  return wt.lambda() == 0 ? cplx(0.0, 1.0) : cplx(0.0, -1.0);
}

// Square root of a quadratic residue a mod odd prime p (Tonelli-Shanks).
std::int64_t tonelli(std::int64_t a, std::int64_t p) {
  a = mod(a, p);
  if (p % 4 == 3) return powmod(a, (p + 1) / 4, p);
  std::int64_t q = p - 1;
  int s = 0;
  while (q % 2 == 0) {
    q /= 2;
    ++s;
  }
  std::int64_t z = 2;
  while (powmod(z, (p - 1) / 2, p) != p - 1) ++z;
  std::int64_t m = s;
  std::int64_t c = powmod(z, q, p);
  std::int64_t t = powmod(a, q, p);
  std::int64_t r = powmod(a, (q + 1) / 2, p);
  while (t != 1) {
    std::int64_t i = 0;
    std::int64_t tt = t;
    while (tt != 1) {
      tt = mulmod(tt, tt, p);
      ++i;
    }
    std::int64_t b = c;
    for (std::int64_t j = 0; j < m - i - 1; ++j) b = mulmod(b, b, p);
    m = i;
    c = mulmod(b, b, p);
    t = mulmod(t, c, p);
    r = mulmod(r, b, p);
  }
  return r;
}

// Roots of y^2 = A mod p^e.
std::vector<std::int64_t> sqrt_mod_prime_power(std::int64_t A, std::int64_t p, int e) {
  std::int64_t pk = p;
  std::vector<std::int64_t> roots;
  const std::int64_t a1 = mod(A, p);
  if (p == 2) {
    roots = {a1};
  } else if (a1 == 0) {
    roots = {0};
  } else {
    if (powmod(a1, (p - 1) / 2, p) != 1) return {};
    const std::int64_t r = tonelli(a1, p);
    roots = {r, p - r};
  }
  for (int k = 1; k < e; ++k) {
    const std::int64_t next = pk * p;
    const std::int64_t target = mod(A, next);
    std::vector<std::int64_t> lifted;
    if (p != 2 && a1 != 0) {
      // Hensel: unique lift since 2y is a unit.
      for (const std::int64_t r : roots) {
        const std::int64_t f = mod(mulmod(r, r, next) - target, next);
        const std::int64_t step = mulmod(f, invmod(mod(2 * r, next), next), next);
        lifted.push_back(mod(r - step, next));
      }
    } else {
      for (const std::int64_t r : roots) {
        for (std::int64_t j = 0; j < p; ++j) {
          const std::int64_t y = r + j * pk;
          if (mulmod(y, y, next) == target) lifted.push_back(y);
        }
      }
    }
    std::sort(lifted.begin(), lifted.end());
    lifted.erase(std::unique(lifted.begin(), lifted.end()), lifted.end());
    roots = std::move(lifted);
    pk = next;
    if (roots.empty()) break;
  }
  return roots;
}

// Salie sum sum_{x mod P} (x/P) e((M xbar + N x)/P) for P = p^a, p odd.
cplx salie_prime_power(std::int64_t M, std::int64_t N, std::int64_t p, int a) {
  std::int64_t P = 1;
  for (int i = 0; i < a; ++i) P *= p;
  M = mod(M, P);
  N = mod(N, P);
  std::int64_t K = 0;
  if (M % p != 0) {
    K = M;
  } else if (N % p != 0) {
    K = N;
  } else {
    cplx s = 0.0;
    for (std::int64_t x = 1; x < P; ++x) {
      if (x % p == 0) continue;
      const int chi = (a % 2 == 0) ? 1 : kronecker(x, p);
      s += static_cast<double>(chi) * unit(mulmod(M, invmod(x, P), P) + mulmod(N, x, P), P);
    }
    return s;
  }
  cplx roots = 0.0;
  for (const std::int64_t y : sqrt_mod_prime_power(mulmod(M, N, P), p, a)) roots += unit(2 * y, P);
  const cplx eps = (P % 4 == 1) ? cplx(1.0) : cplx(0.0, 1.0);
  return eps * std::sqrt(static_cast<double>(P)) * static_cast<double>(kronecker(K, P)) * roots;
}

void require_mod4(std::int64_t c) {
  if (c <= 0 || c % 4 != 0) throw AdmissibilityError("modulus c must be a positive multiple of 4");
}

}  // namespace

KloostermanQuery KloostermanQuery::make(Weight wt, std::int64_t m, std::int64_t n, std::int64_t c) {
  require_mod4(c);
  if (m < 0 || n < 0) throw DomainError("m and n must be non-negative");
  const auto plus = [&](std::int64_t x) {
    const auto r = ((wt.sign() * x) % 4 + 4) % 4;
    return r == 0 || r == 1;
  };
  if (!plus(m) || !plus(n)) {
    throw AdmissibilityError("plus-space condition violated: (-1)^lambda m or n = 2,3 mod 4");
  }
  return {wt, m, n, c};
}

KloostermanTable::KloostermanTable(std::int64_t c, Weight wt) : c_(c), wt_(wt) {
  require_mod4(c);
  residues_.reserve(static_cast<std::size_t>(c / 2));
  for (std::int64_t d = 1; d < c; d += 2) {
    if (std::gcd(d, c) != 1) continue;
    residues_.push_back(d);
    inverses_.push_back(invmod(d, c));
    weights_.push_back(static_cast<double>(kronecker(c, d)) * multiplier_eps(d, wt));
  }
  roots_.resize(static_cast<std::size_t>(c));
  for (std::int64_t j = 0; j < c; ++j) roots_[static_cast<std::size_t>(j)] = unit(j, c);
}

cplx KloostermanTable::theta_sum(std::int64_t m, std::int64_t n) const {
  const std::int64_t mm = mod(m, c_);
  const std::int64_t nn = mod(n, c_);
  cplx s = 0.0;
  for (std::size_t i = 0; i < residues_.size(); ++i) {
    const std::int64_t idx = (mulmod(mm, inverses_[i], c_) + mulmod(nn, residues_[i], c_)) % c_;
    s += weights_[i] * roots_[static_cast<std::size_t>(idx)];
  }
  return s;
}

cplx KloostermanTable::plus_sum(std::int64_t m, std::int64_t n) const {
  const double factor = (c_ % 8 == 0) ? 1.0 : 2.0;
  return factor * eighth_root(wt_) * theta_sum(m, n);
}

cplx s_plus_complex(const KloostermanQuery& q) {
  return KloostermanTable(q.c, q.weight).plus_sum(q.m, q.n);
}

double s_plus(const KloostermanQuery& q) {
  const cplx v = s_plus_complex(q);
  if (std::abs(v.imag()) >= 1e-10) throw AccuracyError("s_plus: imaginary part exceeds 1e-10");
  return v.real();
}

double s_plus_fast(const KloostermanQuery& q) {
  require_mod4(q.c);
  std::int64_t r = q.c;
  int t = 0;
  while (r % 2 == 0) {
    r /= 2;
    ++t;
  }
  const std::int64_t T = std::int64_t{1} << t;

  // 2-part: d1 odd mod 2^t with the reciprocity sign from (r/d).
  const std::int64_t rbar = invmod(r, T);
  const std::int64_t mT = mulmod(mod(q.m, T), rbar, T);
  const std::int64_t nT = mulmod(mod(q.n, T), rbar, T);
  const int rhalf = static_cast<int>(((r - 1) / 2) & 1);
  cplx two = 0.0;
  for (std::int64_t d1 = 1; d1 < T; d1 += 2) {
    double sign = (t % 2 == 1) ? static_cast<double>(kronecker(2, d1)) : 1.0;
    if (rhalf && ((d1 - 1) / 2) % 2 == 1) sign = -sign;
    const std::int64_t idx = (mulmod(mT, invmod(d1, T), T) + mulmod(nT, d1, T)) % T;
    two += sign * multiplier_eps(d1, q.weight) * unit(idx, T);
  }

  // Odd part: twisted-multiplicative Salie sums.
  cplx odd = 1.0;
  if (r > 1) {
    const std::int64_t tbar = invmod(T % r, r);
    const std::int64_t M = mulmod(mod(q.m, r), tbar, r);
    const std::int64_t N = mulmod(mod(q.n, r), tbar, r);
    for (const auto& [p, e] : factorize(static_cast<std::uint64_t>(r))) {
      std::int64_t P = 1;
      for (int i = 0; i < e; ++i) P *= static_cast<std::int64_t>(p);
      const std::int64_t R = r / P;
      const std::int64_t Rbar = invmod(R % P, P);
      odd *= salie_prime_power(mulmod(M, Rbar, P), mulmod(N, Rbar, P), static_cast<std::int64_t>(p), e);
    }
  }
  const double factor = (q.c % 8 == 0) ? 1.0 : 2.0;
  const cplx v = factor * eighth_root(q.weight) * two * odd;
  if (std::abs(v.imag()) >= 1e-10 * std::max(1.0, std::abs(v))) {
    throw AccuracyError("s_plus_fast: imaginary part exceeds tolerance");
  }
  return v.real();
}

cplx s_theta_infinity(std::int64_t m, std::int64_t n, std::int64_t c, Weight wt) {
  if (c <= 0 || c % 4 != 0) throw DomainError("s_theta_infinity: 4 must divide c");
  return KloostermanTable(c, wt).theta_sum(m, n);
}

double weil_bound(std::int64_t m, std::int64_t n, std::int64_t c) {
  if (c < 1) throw DomainError("weil_bound: c must be positive");
  const std::int64_t g = std::gcd(std::gcd(m, n), c);
  return 2.0 * static_cast<double>(sigma0(static_cast<std::uint64_t>(c))) * std::sqrt(static_cast<double>(g)) *
         std::sqrt(static_cast<double>(c));
}

std::vector<std::int64_t> sqrt_mod(std::int64_t A, std::int64_t c) {
  if (c <= 0) throw DomainError("sqrt_mod: modulus must be positive");
  std::vector<std::int64_t> roots{0};
  std::int64_t modulus = 1;
  for (const auto& [p, e] : factorize(static_cast<std::uint64_t>(c))) {
    const auto pp = static_cast<std::int64_t>(p);
    std::int64_t P = 1;
    for (int i = 0; i < e; ++i) P *= pp;
    const auto local = sqrt_mod_prime_power(A, pp, e);
    if (local.empty()) return {};
    const std::int64_t inv = invmod(modulus % P, P);
    std::vector<std::int64_t> next;
    next.reserve(roots.size() * local.size());
    for (const std::int64_t r1 : roots) {
      for (const std::int64_t r2 : local) {
        const std::int64_t k = mulmod(mod(r2 - r1, P), inv, P);
        next.push_back(r1 + modulus * k);
      }
    }
    roots = std::move(next);
    modulus *= P;
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

std::vector<std::int64_t> sqrt_mod_scan(std::int64_t A, std::int64_t c) {
  if (c <= 0) throw DomainError("sqrt_mod_scan: modulus must be positive");
  std::vector<std::int64_t> roots;
  const std::int64_t target = mod(A, c);
  for (std::int64_t b = 0; b < c; ++b) {
    if (mulmod(b, b, c) == target) roots.push_back(b);
  }
  return roots;
}

namespace {

double weyl_from_roots(std::int64_t m, const GenusCharacterSpec& spec, std::int64_t c,
                       const std::vector<std::int64_t>& roots) {
  cplx s = 0.0;
  for (const std::int64_t b : roots) {
    const QuadForm q{c / 4, b, (b * b - spec.D) / c};
    const int chi = spec.d == 1 ? 1 : genus_character(spec, q);
    if (chi == 0) continue;
    s += static_cast<double>(chi) * unit(mulmod(mod(2 * m, c), b, c), c);
  }
  if (std::abs(s.imag()) >= 1e-10 * std::max<double>(1.0, static_cast<double>(roots.size()))) {
    throw AccuracyError("weyl_sum: imaginary part exceeds tolerance");
  }
  return s.real();
}

void require_weyl(std::int64_t m, const GenusCharacterSpec& spec, std::int64_t c) {
  if (m <= 0) throw DomainError("weyl_sum: m must be positive");
  if (spec.D <= 0 || is_square(spec.D)) throw DomainError("weyl_sum: D must be positive and nonsquare");
  if (c <= 0 || c % 4 != 0) throw AdmissibilityError("weyl_sum: 4 must divide c");
}

}  // namespace

double weyl_sum(std::int64_t m, const GenusCharacterSpec& spec, std::int64_t c) {
  require_weyl(m, spec, c);
  return weyl_from_roots(m, spec, c, sqrt_mod(spec.D, c));
}

double weyl_sum_scan(std::int64_t m, const GenusCharacterSpec& spec, std::int64_t c) {
  require_weyl(m, spec, c);
  return weyl_from_roots(m, spec, c, sqrt_mod_scan(spec.D, c));
}

double weyl_via_kohnen(std::int64_t m, const GenusCharacterSpec& spec, std::int64_t c) {
  require_weyl(m, spec, c);
  const std::int64_t g = std::gcd(m, c / 4);
  double total = 0.0;
  for (const std::uint64_t nu : divisors(static_cast<std::uint64_t>(g))) {
    const auto n = static_cast<std::int64_t>(nu);
    const int chi = kronecker(spec.d, n);
    if (chi == 0) continue;
    const std::int64_t A = spec.d_prime;
    const std::int64_t B = (m / n) * (m / n) * spec.d;
    const double s = A < 0 ? s_plus(KloostermanQuery::make(Weight::minus_half(), -A, -B, c / n))
                           : s_plus(KloostermanQuery::make(Weight::plus_half(), A, B, c / n));
    total += static_cast<double>(chi) * std::sqrt(2.0 * static_cast<double>(n) / static_cast<double>(c)) * s;
  }
  return total;
}

const char* to_string(WeightMode mode) {
  return mode == WeightMode::inv_c ? "inv_c" : "inv_sqrt_c";
}

SumFamily SumFamily::kloosterman(Weight wt, std::int64_t m, std::int64_t n) {
  KloostermanQuery::make(wt, m, n, 4);
  SumFamily f;
  f.kind = Kind::kloosterman;
  f.weight = wt;
  f.m = m;
  f.n = n;
  return f;
}

SumFamily SumFamily::weyl(std::int64_t m, const GenusCharacterSpec& spec) {
  if (m <= 0) throw DomainError("weyl family: m must be positive");
  SumFamily f;
  f.kind = Kind::weyl;
  f.m = m;
  f.spec = spec;
  return f;
}

double family_sum(const SumFamily& family, std::int64_t c, bool fast) {
  if (family.kind == SumFamily::Kind::weyl) return weyl_sum(family.m, family.spec, c);
  const auto q = KloostermanQuery::make(family.weight, family.m, family.n, c);
  return fast ? s_plus_fast(q) : s_plus(q);
}

namespace {

// f(c) for c = lo, lo + 4, ..., hi, chunked over workers.
std::vector<double> map_range(std::int64_t lo, std::int64_t hi, unsigned workers, std::int64_t chunk,
                              const std::function<double(std::int64_t)>& f) {
  if (hi < lo) return {};
  const auto count = static_cast<std::size_t>((hi - lo) / 4 + 1);
  std::vector<double> out(count);
  chunk = std::max<std::int64_t>(1, chunk);
  const std::size_t nchunks = (count + static_cast<std::size_t>(chunk) - 1) / static_cast<std::size_t>(chunk);
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= nchunks) return;
      const std::size_t begin = k * static_cast<std::size_t>(chunk);
      const std::size_t end = std::min(count, begin + static_cast<std::size_t>(chunk));
      try {
        for (std::size_t i = begin; i < end; ++i) out[i] = f(lo + 4 * static_cast<std::int64_t>(i));
      } catch (...) {
        const std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(nchunks);
        return;
      }
    }
  };
  workers = std::max(1U, std::min<unsigned>(workers, static_cast<unsigned>(nchunks)));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace

std::vector<double> map_moduli(std::int64_t X, unsigned workers, std::int64_t chunk,
                               const std::function<double(std::int64_t)>& f) {
  return map_range(4, X - X % 4, workers, chunk, f);
}

void partial_sum_stream(const SumFamily& family, double X, const StreamOptions& opts,
                        const std::function<void(const PartialSumRecord&)>& sink) {
  if (!(X >= 0.0)) throw DomainError("partial_sum_stream: X must be non-negative");
  if (X > static_cast<double>(opts.cap)) throw ResourceError("partial_sum_stream: X exceeds configured cap");
  const auto xmax = static_cast<std::int64_t>(std::floor(X));
  const std::int64_t last = xmax - xmax % 4;
  const std::int64_t block = 4 * std::max<std::int64_t>(1, opts.chunk) * std::max(1U, opts.workers);
  double cumulative = 0.0;
  auto f = [&](std::int64_t c) { return family_sum(family, c, opts.fast); };
  for (std::int64_t lo = 4; lo <= last; lo += block) {
    const std::int64_t hi = std::min(last, lo + block - 4);
    const auto sums = map_range(lo, hi, opts.workers, opts.chunk, f);
    for (std::size_t i = 0; i < sums.size(); ++i) {
      const std::int64_t c = lo + 4 * static_cast<std::int64_t>(i);
      const double w = opts.mode == WeightMode::inv_c ? 1.0 / static_cast<double>(c)
                                                      : 1.0 / std::sqrt(static_cast<double>(c));
      PartialSumRecord rec;
      rec.c = c;
      rec.sum = sums[i];
      rec.term = sums[i] * w;
      cumulative += rec.term;
      rec.value = cumulative;
      sink(rec);
    }
  }
}

std::vector<PartialSumRecord> partial_sums(const SumFamily& family, double X, const StreamOptions& opts) {
  std::vector<PartialSumRecord> out;
  partial_sum_stream(family, X, opts, [&](const PartialSumRecord& r) { out.push_back(r); });
  return out;
}

}  // namespace qtrace
