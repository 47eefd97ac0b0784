#pragma once

// Plus-space Kloosterman sums, theta-multiplier sums at the cusp pair
// (infinity, infinity), quadratic Weyl sums and streaming partial sums.

#include <cstdint>
#include <functional>
#include <vector>

#include "qtrace/ntheory.hpp"
#include "qtrace/quadforms.hpp"

namespace qtrace {

/// Largest x accepted by partial_sum_stream unless overridden.
inline constexpr std::int64_t kPartialSumCap = 1'000'000;

struct KloostermanQuery {
  Weight weight = Weight::plus_half();
  std::int64_t m = 1;
  std::int64_t n = 1;
  std::int64_t c = 4;

  /// m, n >= 0; zero enters the constant-term sums S^+(0, n, c).
  /// Throws AdmissibilityError unless 4 | c and (-1)^lambda m, (-1)^lambda n = 0,1 mod 4.
  static KloostermanQuery make(Weight wt, std::int64_t m, std::int64_t n, std::int64_t c);
};

/// Per-modulus tables: inverses, multiplier weights (c/d) eps_d^{2k} and e(j/c).
/// Amortizes many (m, n) evaluations at a fixed (c, k).
class KloostermanTable {
 public:
  KloostermanTable(std::int64_t c, Weight wt);

  std::int64_t modulus() const { return c_; }
  Weight weight() const { return wt_; }
  /// sum_{d mod c, (d,c)=1} (c/d) eps_d^{2k} e((m dbar + n d) / c); any integers m, n.
  cplx theta_sum(std::int64_t m, std::int64_t n) const;
  /// e(-k/4) theta_sum times 2 when 4 || c. Unreal values are returned as is.
  cplx plus_sum(std::int64_t m, std::int64_t n) const;

 private:
  std::int64_t c_;
  Weight wt_;
  std::vector<std::int64_t> residues_;
  std::vector<std::int64_t> inverses_;
  std::vector<cplx> weights_;
  std::vector<cplx> roots_;
};

/// Complex value of S_k^+ before truncation to the real axis.
cplx s_plus_complex(const KloostermanQuery& q);

/// S_k^+(m, n, c); AccuracyError if |Im| >= 1e-10.
double s_plus(const KloostermanQuery& q);

/// S_k^+ via the CRT factorization into a 2-power sum and odd Salie sums.
double s_plus_fast(const KloostermanQuery& q);

/// S_infinity,infinity(m, n, c) for the multiplier nu_theta^{2k}; DomainError unless 4 | c.
cplx s_theta_infinity(std::int64_t m, std::int64_t n, std::int64_t c, Weight wt);

/// 2 sigma_0(c) gcd(m, n, c)^{1/2} sqrt(c).
double weil_bound(std::int64_t m, std::int64_t n, std::int64_t c);

/// All b mod c with b^2 = A mod c, sorted; CRT over prime powers of c.
std::vector<std::int64_t> sqrt_mod(std::int64_t A, std::int64_t c);

/// Roots of b^2 = A mod c by scanning every residue.
std::vector<std::int64_t> sqrt_mod_scan(std::int64_t A, std::int64_t c);

/// T_m = sum_{b mod c, b^2 = D mod c} chi_d([c/4, b, (b^2 - D)/c]) e(2 m b / c).
double weyl_sum(std::int64_t m, const GenusCharacterSpec& spec, std::int64_t c);

/// The same sum with roots found by scanning; oracle for the CRT path.
double weyl_sum_scan(std::int64_t m, const GenusCharacterSpec& spec, std::int64_t c);

/// sum_{n | (m, c/4)} (d/n) sqrt(2n/c) S_{1/2}^+(d', m^2 d / n^2, c/n), taking the
/// k = -1/2 sum at (-d', -m^2 d / n^2) when d' < 0.
double weyl_via_kohnen(std::int64_t m, const GenusCharacterSpec& spec, std::int64_t c);

enum class WeightMode { inv_c, inv_sqrt_c };

const char* to_string(WeightMode mode);

/// Either a Kloosterman family S_k^+(m, n, c) or a Weyl family T_m(d', d; c).
struct SumFamily {
  enum class Kind { kloosterman, weyl };
  Kind kind = Kind::kloosterman;
  Weight weight = Weight::plus_half();
  std::int64_t m = 1;
  std::int64_t n = 1;
  GenusCharacterSpec spec{};

  static SumFamily kloosterman(Weight wt, std::int64_t m, std::int64_t n);
  static SumFamily weyl(std::int64_t m, const GenusCharacterSpec& spec);
};

struct PartialSumRecord {
  std::int64_t c = 0;
  /// Raw S_k^+(m,n,c) or T_m(c) before the 1/c or 1/sqrt(c) weight.
  double sum = 0.0;
  double term = 0.0;
  double value = 0.0;
};

struct StreamOptions {
  WeightMode mode = WeightMode::inv_c;
  bool fast = true;
  unsigned workers = 1;
  std::int64_t cap = kPartialSumCap;
  std::int64_t chunk = 4096;
};

/// Raw summand at modulus c for the family.
double family_sum(const SumFamily& family, std::int64_t c, bool fast);

/// Cumulative sums over c = 4, 8, ..., <= X delivered in order to sink.
/// Terms are computed in parallel chunks and accumulated sequentially, so
/// results do not depend on the worker count. ResourceError if X > cap.
void partial_sum_stream(const SumFamily& family, double X, const StreamOptions& opts,
                        const std::function<void(const PartialSumRecord&)>& sink);

std::vector<PartialSumRecord> partial_sums(const SumFamily& family, double X, const StreamOptions& opts);

/// Evaluates f(c) for c = 4, 8, ..., <= X in parallel chunks, returned in c order.
std::vector<double> map_moduli(std::int64_t X, unsigned workers, std::int64_t chunk,
                               const std::function<double(std::int64_t)>& f);

}  // namespace qtrace
