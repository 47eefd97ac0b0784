#include "qtrace/spectral.hpp"

#include <algorithm>
#include <cmath>

#include "qtrace/errors.hpp"
#include "qtrace/kloosterman.hpp"

namespace qtrace {

PhiPlusQuery PhiPlusQuery::make(std::int64_t n, cplx s, double X) {
  if (n < 1) throw AdmissibilityError("phi_plus: n must be positive");
  if (!(s.real() > 0.75)) throw DomainError("phi_plus: requires Re s > 3/4");
  if (!(X >= 0.0)) throw DomainError("phi_plus: truncation must be non-negative");
  PhiPlusQuery q;
  q.n = n;
  q.s = s;
  q.X = X;
  q.decomposition = fund_decompose(n, Weight::plus_half());
  return q;
}

double sigma0_constant(double delta) {
  if (!(delta > 0.0)) throw DomainError("sigma0_constant: delta must be positive");
  // sigma_0(c) / c^delta = prod_{p^k || c} (k + 1) / p^{k delta}; factors
  // with p >= 2^{1/delta} never exceed 1.
  const double limit = std::pow(2.0, 1.0 / delta);
  if (limit > 1e7) throw ResourceError("sigma0_constant: delta too small");
  const auto L = static_cast<std::size_t>(limit);
  std::vector<bool> composite(L + 1, false);
  double C = 1.0;
  for (std::size_t p = 2; p < L + 1; ++p) {
    if (composite[p]) continue;
    for (std::size_t q = p * p; q <= L; q += p) composite[q] = true;
    if (static_cast<double>(p) >= limit) break;
    double best = 1.0;
    for (int k = 1; k < 400; ++k) {
      const double v = (k + 1) / std::pow(static_cast<double>(p), k * delta);
      best = std::max(best, v);
      if (v < 1.0) break;
    }
    C *= best;
  }
  return C;
}

double phi_plus_tail_bound(std::int64_t n, double sigma, double X) {
  if (!(sigma > 0.75)) throw DomainError("phi_plus_tail_bound: requires Re s > 3/4");
  const double delta = std::min(0.25, sigma - 0.75);
  const double C = sigma0_constant(delta);
  const double beta = 2.0 * sigma - 0.5 - delta;
  const double K = std::floor(std::max(X, 0.0) / 4.0);
  // sum_{k > K} k^{-beta} <= K^{1 - beta} / (beta - 1), or zeta(beta) bound for K = 0.
  const double tail = K >= 1.0 ? std::pow(K, 1.0 - beta) / (beta - 1.0) : 1.0 + 1.0 / (beta - 1.0);
  return 2.0 * C * std::sqrt(static_cast<double>(n)) * std::pow(4.0, -beta) * tail;
}

PhiPlusSeries phi_plus_series(const PhiPlusQuery& q, unsigned workers, bool fast) {
  PhiPlusSeries out;
  out.tail_bound = phi_plus_tail_bound(q.n, q.s.real(), q.X);
  if (q.X < 4.0) return out;
  const auto X = static_cast<std::int64_t>(std::floor(q.X));
  const SumFamily family = SumFamily::kloosterman(Weight::plus_half(), 0, q.n);
  const std::vector<double> S = map_moduli(X, workers, 4096, [&](std::int64_t c) { return family_sum(family, c, fast); });
  for (std::size_t i = 0; i < S.size(); ++i) {
    const double c = 4.0 * static_cast<double>(i + 1);
    out.value += S[i] * std::exp(-2.0 * q.s * std::log(c));
  }
  out.terms = S.size();
  return out;
}

cplx phi_plus_closed(std::int64_t n, cplx s) {
  const PhiPlusQuery q = PhiPlusQuery::make(n, s, 0.0);
  const auto d = q.decomposition.d;
  const auto w = static_cast<double>(q.decomposition.w);
  const cplx L = dirichlet_L(d, 2.0 * s - 0.5);
  const cplx z = riemann_zeta(4.0 * s - 1.0);
  const cplx S = frak_S(d, static_cast<std::uint64_t>(q.decomposition.w), 2.0 * s - 1.0);
  return std::pow(2.0, 1.5 - 4.0 * s) * std::pow(w, 1.0 - 2.0 * s) * L / z * S;
}

bool vanishing_check(std::int64_t n, std::int64_t c, Weight wt) {
  return std::abs(s_theta_infinity(0, n, c, wt)) < 1e-10;
}

bool vanishing_expected(std::int64_t n, std::int64_t c) {
  const auto nm = ((n % 4) + 4) % 4;
  return (nm == 0 && c % 16 == 8) || (nm == 1 && c % 16 == 0);
}

PhiPlusReport phi_plus_verify(std::int64_t n, cplx s, double X, unsigned workers) {
  PhiPlusReport r;
  r.query = PhiPlusQuery::make(n, s, X);
  r.series = phi_plus_series(r.query, workers);
  r.closed = phi_plus_closed(n, s);
  r.difference = std::abs(r.series.value - r.closed);
  r.pass = r.difference <= r.series.tail_bound;
  return r;
}

}  // namespace qtrace
