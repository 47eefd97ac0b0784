#include "qtrace/modforms.hpp"

#include <mpfr.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <climits>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <nlohmann/json.hpp>
#include <numbers>
#include <sstream>
#include <thread>

#include "qtrace/errors.hpp"
#include "qtrace/quadforms.hpp"

namespace qtrace {

namespace {

using Coeffs = std::vector<mpz_class>;
using lcplx = std::complex<long double>;

Coeffs mul_trunc(const Coeffs& a, const Coeffs& b, std::size_t len) {
  Coeffs out(len, 0);
  for (std::size_t i = 0; i < a.size() && i < len; ++i) {
    if (a[i] == 0) continue;
    const std::size_t lim = std::min(b.size(), len - i);
    for (std::size_t k = 0; k < lim; ++k) {
      mpz_addmul(out[i + k].get_mpz_t(), a[i].get_mpz_t(), b[k].get_mpz_t());
    }
  }
  return out;
}

mpz_class sigma3(std::size_t n) {
  mpz_class s = 0;
  for (std::size_t d = 1; d * d <= n; ++d) {
    if (n % d != 0) continue;
    mpz_class t = static_cast<unsigned long>(d);
    s += t * t * t;
    const std::size_t e = n / d;
    if (e != d) {
      mpz_class u = static_cast<unsigned long>(e);
      s += u * u * u;
    }
  }
  return s;
}

// q * j through q^{len - 1}.
Coeffs compute_qj(std::size_t len) {
  Coeffs e4(len);
  e4[0] = 1;
  for (std::size_t n = 1; n < len; ++n) e4[n] = 240 * sigma3(n);
  const Coeffs e4sq = mul_trunc(e4, e4, len);
  const Coeffs e4cube = mul_trunc(e4sq, e4, len);

  // 1 / prod (1 - q^n) by the pentagonal recurrence.
  std::vector<std::pair<std::size_t, int>> pent;
  for (long k = 1;; ++k) {
    const auto g1 = static_cast<std::size_t>(k * (3 * k - 1) / 2);
    const auto g2 = static_cast<std::size_t>(k * (3 * k + 1) / 2);
    if (g1 >= len) break;
    const int sgn = (k % 2 == 1) ? 1 : -1;
    pent.emplace_back(g1, sgn);
    if (g2 < len) pent.emplace_back(g2, sgn);
  }
  Coeffs part(len, 0);
  part[0] = 1;
  for (std::size_t n = 1; n < len; ++n) {
    mpz_class s = 0;
    for (const auto& [g, sgn] : pent) {
      if (g > n) break;
      if (sgn > 0) {
        s += part[n - g];
      } else {
        s -= part[n - g];
      }
    }
    part[n] = s;
  }
  const Coeffs p2 = mul_trunc(part, part, len);
  const Coeffs p4 = mul_trunc(p2, p2, len);
  const Coeffs p8 = mul_trunc(p4, p4, len);
  const Coeffs p16 = mul_trunc(p8, p8, len);
  const Coeffs p24 = mul_trunc(p16, p8, len);
  return mul_trunc(e4cube, p24, len);
}

std::mutex& memo_mutex() {
  static std::mutex m;
  return m;
}

Coeffs& qj_memo() {
  static Coeffs memo;
  return memo;
}

// q * j through q^{N + 1}, unchecked against the public cap.
Coeffs qj_prefix(int N) {
  const auto len = static_cast<std::size_t>(N + 2);
  const std::lock_guard<std::mutex> lock(memo_mutex());
  Coeffs& memo = qj_memo();
  if (memo.size() < len) memo = compute_qj(std::max(len, memo.size() * 2));
  return Coeffs(memo.begin(), memo.begin() + static_cast<std::ptrdiff_t>(len));
}

QSeries j_series_unchecked(int N) {
  return {-1, qj_prefix(N)};
}

// Cached prefixes of q j are exact, so a longer one may replace the memo.
void seed_memo(const Coeffs& c) {
  const std::lock_guard<std::mutex> lock(memo_mutex());
  if (qj_memo().size() < c.size()) qj_memo() = c;
}

struct Laurent {
  int lead = 0;
  Coeffs c;
};

// Product truncated to exponents <= emax.
Laurent mul(const Laurent& a, const Laurent& b, int emax) {
  Laurent out;
  out.lead = a.lead + b.lead;
  const int len = emax - out.lead + 1;
  if (len <= 0) return out;
  out.c = mul_trunc(a.c, b.c, static_cast<std::size_t>(len));
  return out;
}

long double to_long_double(const mpz_class& z) {
  const std::size_t bits = mpz_sizeinbase(z.get_mpz_t(), 2);
  if (bits <= 63) return static_cast<long double>(z.get_si());
  mpz_class top;
  const std::size_t shift = bits - 63;
  mpz_tdiv_q_2exp(top.get_mpz_t(), z.get_mpz_t(), shift);
  return std::ldexp(static_cast<long double>(top.get_si()), static_cast<int>(shift));
}

const std::vector<long double>& jm_table(int m) {
  static std::map<int, std::vector<long double>> tables;
  static std::mutex mu;
  const std::lock_guard<std::mutex> lock(mu);
  auto it = tables.find(m);
  if (it != tables.end()) return it->second;
  const int N = jm_truncation(m);
  const QSeries s = jm_series(m, N);
  std::vector<long double> t(static_cast<std::size_t>(N + 1), 0.0L);
  for (int n = 1; n <= N; ++n) t[static_cast<std::size_t>(n)] = to_long_double(s.coefficient(n));
  return tables.emplace(m, std::move(t)).first->second;
}

const FaberPolynomial& faber_memo(int m) {
  static std::map<int, FaberPolynomial> memo;
  static std::mutex mu;
  const std::lock_guard<std::mutex> lock(mu);
  auto it = memo.find(m);
  if (it != memo.end()) return it->second;
  return memo.emplace(m, faber_polynomial(m)).first->second;
}

lcplx q_of(cplx z) {
  const long double pi2 = 2.0L * std::numbers::pi_v<long double>;
  const long double r = std::exp(-pi2 * static_cast<long double>(z.imag()));
  const long double t = pi2 * static_cast<long double>(z.real());
  return {r * std::cos(t), r * std::sin(t)};
}

}  // namespace

mpz_class QSeries::coefficient(int n) const {
  if (n < leading_exponent || n > max_exponent()) return 0;
  return coeffs[static_cast<std::size_t>(n - leading_exponent)];
}

QSeries j_coefficients(int N, int cap) {
  if (N < 0) throw DomainError("j_coefficients: N must be non-negative");
  if (N > cap) throw ResourceError("j_coefficients: N exceeds configured cap");
  return j_series_unchecked(N);
}

std::filesystem::path j_cache_file(const std::filesystem::path& cache_dir, int N) {
  return cache_dir / ("j_qexp_N" + std::to_string(N) + ".json");
}

QSeries j_coefficients(int N, const std::filesystem::path& cache_dir, int cap) {
  if (N < 0) throw DomainError("j_coefficients: N must be non-negative");
  if (N > cap) throw ResourceError("j_coefficients: N exceeds configured cap");
  const auto file = j_cache_file(cache_dir, N);
  {
    std::ifstream in(file);
    if (in) {
      try {
        const auto doc = nlohmann::json::parse(in);
        if (doc.at("kind") == "j_qexp" && doc.at("N").get<int>() == N && doc.at("coeffs").size() == static_cast<std::size_t>(N + 2)) {
          QSeries s{-1, {}};
          for (const auto& v : doc.at("coeffs")) s.coeffs.emplace_back(v.get<std::string>());
          if (s.coeffs[0] == 1 && s.coeffs[1] == 744 && (N < 1 || s.coeffs[2] == 196884)) {
            seed_memo(s.coeffs);
            return s;
          }
        }
      } catch (const std::exception&) {
        // malformed cache entries are recomputed and overwritten
      }
    }
  }
  QSeries s = j_series_unchecked(N);
  nlohmann::json doc;
  doc["kind"] = "j_qexp";
  doc["N"] = N;
  doc["coeffs"] = nlohmann::json::array();
  for (const auto& c : s.coeffs) doc["coeffs"].push_back(c.get_str());

  std::error_code ec;
  std::filesystem::create_directories(cache_dir, ec);
  static std::atomic<unsigned> counter{0};
  std::ostringstream tmpname;
  tmpname << file.filename().string() << ".tmp." << ::getpid() << '.'
          << std::hash<std::thread::id>{}(std::this_thread::get_id()) << '.' << counter.fetch_add(1);
  const auto tmp = cache_dir / tmpname.str();
  {
    std::ofstream out(tmp);
    if (!out) return s;
    out << doc.dump() << '\n';
    if (!out) {
      std::filesystem::remove(tmp, ec);
      return s;
    }
  }
  std::filesystem::rename(tmp, file, ec);
  if (ec) std::filesystem::remove(tmp, ec);
  return s;
}

std::filesystem::path resolve_cache_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("QTRACE_CACHE_DIR"); env && *env) return env;
  if (const char* xdg = std::getenv("XDG_CACHE_HOME"); xdg && *xdg) return std::filesystem::path(xdg) / "qtrace";
  if (const char* home = std::getenv("HOME"); home && *home) {
    return std::filesystem::path(home) / ".cache" / "qtrace";
  }
  return std::filesystem::temp_directory_path() / "qtrace";
}

FaberPolynomial faber_polynomial(int m) {
  if (m < 1) throw DomainError("faber_polynomial: m must be positive");
  if (m > kFaberCap) throw ResourceError("faber_polynomial: m exceeds cap");
  const QSeries js = j_series_unchecked(m + 1);
  const Laurent j{-1, js.coeffs};
  std::vector<Laurent> powers(static_cast<std::size_t>(m + 1));
  powers[0] = {0, {1}};
  // Exponents up to m stay exact through m products, which covers q^{<= 0}.
  for (int k = 1; k <= m; ++k) powers[static_cast<std::size_t>(k)] = mul(powers[static_cast<std::size_t>(k - 1)], j, m);

  FaberPolynomial p;
  p.m = m;
  p.coeffs.assign(static_cast<std::size_t>(m + 1), 0);
  p.coeffs[static_cast<std::size_t>(m)] = 1;
  Laurent F = powers[static_cast<std::size_t>(m)];
  auto coef = [&](int e) -> mpz_class& { return F.c[static_cast<std::size_t>(e - F.lead)]; };
  for (int k = m - 1; k >= 0; --k) {
    const mpz_class a = coef(-k);
    if (a == 0) continue;
    const Laurent& jk = powers[static_cast<std::size_t>(k)];
    for (std::size_t i = 0; i < jk.c.size(); ++i) coef(jk.lead + static_cast<int>(i)) -= a * jk.c[i];
    p.coeffs[static_cast<std::size_t>(k)] = -a;
  }
  return p;
}

QSeries compose_faber(const FaberPolynomial& p, int N) {
  const QSeries js = j_series_unchecked(N + p.m + 1);
  const Laurent j{-1, js.coeffs};
  Laurent acc{0, {p.coeffs[static_cast<std::size_t>(p.m)]}};
  // k further products by j (order -1) remain, so keep exponents <= N + k.
  for (int k = p.m - 1; k >= 0; --k) {
    acc = mul(acc, j, N + k);
    const int idx = -acc.lead;
    acc.c[static_cast<std::size_t>(idx)] += p.coeffs[static_cast<std::size_t>(k)];
  }
  acc.c.resize(static_cast<std::size_t>(N - acc.lead + 1));
  return {acc.lead, acc.c};
}

QSeries jm_series(int m, int N) {
  if (m < 1) throw DomainError("jm_series: m must be positive");
  if (N < 0) throw DomainError("jm_series: N must be non-negative");
  const QSeries js = j_series_unchecked(m * N);
  QSeries out;
  out.leading_exponent = -m;
  out.coeffs.assign(static_cast<std::size_t>(m + N + 1), 0);
  out.coeffs[0] = 1;
  for (int n = 1; n <= N; ++n) {
    mpz_class s = 0;
    const int g = std::gcd(m, n);
    for (int d = 1; d <= g; ++d) {
      if (g % d != 0) continue;
      s += (m / d) * js.coefficient(m * n / (d * d));
    }
    out.coeffs[static_cast<std::size_t>(n + m)] = s;
  }
  return out;
}

DomainPoint reduce_to_fundamental_domain(cplx z) {
  if (!(z.imag() > 1e-8)) throw PrecisionError("reduce_to_fundamental_domain: Im z too small");
  DomainPoint out;
  out.z = z;
  std::int64_t a = 1, b = 0, c = 0, d = 1;
  double x = z.real();
  double y = z.imag();
  for (int it = 0;; ++it) {
    if (it > 10000) throw PrecisionError("reduce_to_fundamental_domain: no convergence");
    const double n = std::floor(x + 0.5);
    if (std::abs(n) > 4e15) throw PrecisionError("reduce_to_fundamental_domain: Re z too large");
    const auto ni = static_cast<std::int64_t>(n);
    x -= n;
    a -= ni * c;
    b -= ni * d;
    if (x == -0.5) {
      x = 0.5;
      a += c;
      b += d;
    }
    const double r2 = x * x + y * y;
    if (r2 >= 1.0) break;
    x = -x / r2;
    y = y / r2;
    std::tie(a, b, c, d) = std::make_tuple(-c, -d, a, b);
  }
  // Recompute from the integer word to avoid drift.
  const cplx den = static_cast<double>(c) * z + static_cast<double>(d);
  const cplx num = static_cast<double>(a) * z + static_cast<double>(b);
  cplx w = num / den;
  w = {w.real(), z.imag() / std::norm(den)};
  if (w.real() <= -0.5 || w.real() > 0.5 || std::norm(w) < 1.0) w = {x, y};
  out.reduced = w;
  out.word = {a, b, c, d};
  return out;
}

int jm_truncation(int m) {
  if (m < 1) throw DomainError("jm_truncation: m must be positive");
  const double lsig = std::log(static_cast<double>(sigma1(static_cast<std::uint64_t>(m))));
  const double decay = std::numbers::pi * std::sqrt(3.0);
  for (int N = 1;; ++N) {
    const double bound = lsig + 4.0 * std::numbers::pi * std::sqrt(static_cast<double>(m) * N) - decay * N;
    if (bound < -48.0 && N > 2 * m) return N;
  }
}

cplx eval_jm_reduced(int m, cplx z, int N) {
  const QSeries s = jm_series(m, N);
  const lcplx q = q_of(z);
  lcplx acc = 0.0L;
  for (int n = N; n >= 1; --n) acc = (acc + to_long_double(s.coefficient(n))) * q;
  acc += std::pow(q, -m);
  return {static_cast<double>(acc.real()), static_cast<double>(acc.imag())};
}

cplx eval_jm(int m, cplx z) {
  if (m < 1) throw DomainError("eval_jm: m must be positive");
  if (!(z.imag() > 0.0)) throw DomainError("eval_jm: Im z must be positive");
  const cplx w = reduce_to_fundamental_domain(z).reduced;
  const auto& table = jm_table(m);
  const lcplx q = q_of(w);
  lcplx acc = 0.0L;
  for (std::size_t n = table.size() - 1; n >= 1; --n) acc = (acc + table[n]) * q;
  acc += std::pow(q, -m);
  return {static_cast<double>(acc.real()), static_cast<double>(acc.imag())};
}

cplx eval_jm_faber(int m, cplx z) {
  if (!(z.imag() > 0.0)) throw DomainError("eval_jm_faber: Im z must be positive");
  const cplx w = reduce_to_fundamental_domain(z).reduced;
  const auto& t1 = jm_table(1);
  const lcplx q = q_of(w);
  lcplx jv = 0.0L;
  for (std::size_t n = t1.size() - 1; n >= 1; --n) jv = (jv + t1[n]) * q;
  jv += 1.0L / q + 744.0L;
  const FaberPolynomial& p = faber_memo(m);
  lcplx acc = 0.0L;
  for (int k = m; k >= 0; --k) acc = acc * jv + to_long_double(p.coeffs[static_cast<std::size_t>(k)]);
  return {static_cast<double>(acc.real()), static_cast<double>(acc.imag())};
}

namespace {

struct Mp {
  mpfr_t v;
  explicit Mp(mpfr_prec_t prec) {
    mpfr_init2(v, prec);
    mpfr_set_zero(v, 1);
  }
  ~Mp() { mpfr_clear(v); }
  Mp(const Mp&) = delete;
  Mp& operator=(const Mp&) = delete;
};

CmTrace mp_trace(std::int64_t d, int m, bool drop_polar) {
  if (d >= 0 || !is_fundamental(d)) throw DomainError("cm_trace: d must be a negative fundamental discriminant");
  if (m < 1) throw DomainError("cm_trace: m must be positive");
  const ImaginaryClasses cls = reduced_forms_imaginary(d);
  const double ymax = std::sqrt(static_cast<double>(-d)) / 2.0;
  const auto prec = static_cast<mpfr_prec_t>(std::ceil(2.0 * std::numbers::pi * m * ymax / std::log(2.0))) + 96;
  const int N = jm_truncation(m) + 8;
  const QSeries series = jm_series(m, N);

  Mp total(prec), pi(prec), sqrtd(prec), y(prec), ex(prec), ang(prec), term(prec);
  mpfr_const_pi(pi.v, MPFR_RNDN);
  mpfr_set_si(sqrtd.v, static_cast<long>(-d), MPFR_RNDN);
  mpfr_sqrt(sqrtd.v, sqrtd.v, MPFR_RNDN);

  for (const QuadForm& f : cls.forms) {
    mpfr_div_si(y.v, sqrtd.v, static_cast<long>(2 * f.a), MPFR_RNDN);
    // Re(coef q^n) = coef exp(-2 pi n y) cos(pi n b / a)
    auto add_term = [&](const mpz_class& coef, long n) {
      mpfr_mul(ex.v, pi.v, y.v, MPFR_RNDN);
      mpfr_mul_si(ex.v, ex.v, -2 * n, MPFR_RNDN);
      mpfr_exp(ex.v, ex.v, MPFR_RNDN);
      const std::int64_t k = ((n * f.b) % (2 * f.a) + 2 * f.a) % (2 * f.a);
      mpfr_mul_si(ang.v, pi.v, static_cast<long>(k), MPFR_RNDN);
      mpfr_div_si(ang.v, ang.v, static_cast<long>(f.a), MPFR_RNDN);
      mpfr_cos(ang.v, ang.v, MPFR_RNDN);
      mpfr_mul(term.v, ex.v, ang.v, MPFR_RNDN);
      mpfr_mul_z(term.v, term.v, coef.get_mpz_t(), MPFR_RNDN);
      mpfr_add(total.v, total.v, term.v, MPFR_RNDN);
    };
    const bool polar_dropped = drop_polar && (-d > 4 * f.a * f.a);
    if (!polar_dropped) add_term(1, -m);
    for (int n = 1; n <= N; ++n) {
      const mpz_class coef = series.coefficient(n);
      if (coef != 0) add_term(coef, n);
    }
  }
  mpfr_div_si(total.v, total.v, cls.omega, MPFR_RNDN);

  CmTrace out;
  out.d = d;
  out.m = m;
  out.class_number = cls.class_number();
  out.omega = cls.omega;
  out.value = mpfr_get_d(total.v, MPFR_RNDN);
  mpfr_get_z(out.nearest.get_mpz_t(), total.v, MPFR_RNDN);
  mpfr_sub_z(term.v, total.v, out.nearest.get_mpz_t(), MPFR_RNDN);
  out.distance = std::abs(mpfr_get_d(term.v, MPFR_RNDN));
  return out;
}

}  // namespace

CmTrace cm_trace_detailed(std::int64_t d, int m) {
  return mp_trace(d, m, false);
}

double cm_trace(std::int64_t d, int m) {
  return mp_trace(d, m, false).value;
}

double cm_trace_deviation(std::int64_t d) {
  return mp_trace(d, 1, true).value;
}

}  // namespace qtrace
