#include "qtrace/quadforms.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

#include "qtrace/errors.hpp"
#include "qtrace/ntheory.hpp"

namespace qtrace {

namespace {

std::int64_t floor_div(std::int64_t x, std::int64_t y) {
  std::int64_t q = x / y;
  if ((x % y != 0) && ((x < 0) != (y < 0))) --q;
  return q;
}

// floor((P + sqrt(D)) / Q) for nonsquare D with s = isqrt(D), Q != 0.
std::int64_t floor_quadratic(std::int64_t P, std::int64_t Q, std::int64_t s) {
  if (Q > 0) return floor_div(P + s, Q);
  return floor_div(-P - s - 1, -Q);
}

void require_indefinite(std::int64_t D) {
  if (D <= 0 || !is_discriminant(D)) throw DomainError("discriminant must be positive and = 0,1 mod 4");
  if (is_square(D)) throw DomainError("discriminant must not be a perfect square");
}

}  // namespace

std::int64_t QuadForm::content() const {
  return std::gcd(std::gcd(a, b), c);
}

double QuadForm::root() const {
  return (-static_cast<double>(b) + std::sqrt(static_cast<double>(disc()))) / (2.0 * static_cast<double>(a));
}

double QuadForm::root_conjugate() const {
  return (-static_cast<double>(b) - std::sqrt(static_cast<double>(disc()))) / (2.0 * static_cast<double>(a));
}

QuadForm act(const QuadForm& q, std::int64_t alpha, std::int64_t beta, std::int64_t gamma, std::int64_t delta) {
  return {q.a * alpha * alpha + q.b * alpha * gamma + q.c * gamma * gamma,
          2 * q.a * alpha * beta + q.b * (alpha * delta + beta * gamma) + 2 * q.c * gamma * delta,
          q.a * beta * beta + q.b * beta * delta + q.c * delta * delta};
}

std::string to_string(const QuadForm& q) {
  std::ostringstream os;
  os << '[' << q.a << ',' << q.b << ',' << q.c << ']';
  return os.str();
}

std::size_t QuadFormHash::operator()(const QuadForm& q) const noexcept {
  std::size_t h = std::hash<std::int64_t>{}(q.a);
  h ^= std::hash<std::int64_t>{}(q.b) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  h ^= std::hash<std::int64_t>{}(q.c) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

IntMatrix2 IntMatrix2::operator*(const IntMatrix2& o) const {
  return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
}

IntMatrix2 FormCycle::automorph() const {
  IntMatrix2 g;
  for (const std::int64_t n : cf_exponents) {
    g = g * IntMatrix2{mpz_class(static_cast<long>(n)), -1, 1, 0};
  }
  return g;
}

std::string FormCycle::automorph_word() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < cf_exponents.size(); ++i) {
    if (i) os << ' ';
    os << "T^" << cf_exponents[i] << " S";
  }
  return os.str();
}

double FormCycle::length() const {
  mpz_class t = automorph().trace();
  t = abs(t);
  return 2.0 * arccosh_half(t);
}

GenusCharacterSpec GenusCharacterSpec::make(std::int64_t D, std::int64_t d) {
  if (!is_discriminant(D) || D == 0) throw DomainError("D must be a nonzero discriminant");
  if (!is_fundamental(d)) throw DomainError("d must be a fundamental discriminant");
  if (D % d != 0) throw DomainError("d must divide D");
  const std::int64_t dp = D / d;
  if (!is_discriminant(dp)) throw DomainError("D / d must be a discriminant");
  return {D, d, dp};
}

double arccosh_half(const mpz_class& t) {
  if (t < 2) throw DomainError("arccosh_half: t must be >= 2");
  if (mpz_sizeinbase(t.get_mpz_t(), 2) < 52) return std::acosh(t.get_d() / 2.0);
  long e = 0;
  const double m = mpz_get_d_2exp(&e, t.get_mpz_t());
  // arccosh(t/2) = log t - t^{-2} - ..., the correction is below double resolution
  return std::log(m) + static_cast<double>(e) * std::log(2.0);
}

ImaginaryClasses reduced_forms_imaginary(std::int64_t d) {
  if (d >= 0 || !is_discriminant(d)) throw DomainError("discriminant must be negative and = 0,1 mod 4");
  ImaginaryClasses out;
  out.d = d;
  out.omega = d == -3 ? 3 : (d == -4 ? 2 : 1);
  const std::int64_t ad = -d;
  for (std::int64_t a = 1; 3 * a * a <= ad; ++a) {
    for (std::int64_t b = -a + 1; b <= a; ++b) {
      const std::int64_t num = b * b + ad;
      if (num % (4 * a) != 0) continue;
      const std::int64_t c = num / (4 * a);
      if (c < a) continue;
      if (b < 0 && c == a) continue;
      if (std::gcd(std::gcd(a, b), c) != 1) continue;
      out.forms.push_back({a, b, c});
    }
  }
  return out;
}

std::vector<QuadForm> zagier_reduced_forms(std::int64_t D) {
  require_indefinite(D);
  // a + b + c < 0 with b^2 - 4ac = D forces a + c <= (D - 1) / 2.
  std::vector<QuadForm> out;
  const std::int64_t cap = (D - 1) / 2;
  for (std::int64_t a = 1; a < cap; ++a) {
    for (std::int64_t c = 1; a + c <= cap; ++c) {
      const std::int64_t B2 = D + 4 * a * c;
      const std::int64_t B = isqrt(B2);
      if (B * B != B2 || B <= a + c) continue;
      out.push_back({a, -B, c});
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

QuadForm minus_cf_step(const QuadForm& q, std::int64_t* n_out) {
  const std::int64_t s = isqrt(q.disc());
  const std::int64_t n = floor_quadratic(-q.b, 2 * q.a, s) + 1;
  if (n_out) *n_out = n;
  return {q.a * n * n + q.b * n + q.c, -2 * q.a * n - q.b, q.a};
}

QuadForm zagier_reduce(const QuadForm& q) {
  require_indefinite(q.disc());
  QuadForm f = q;
  for (int it = 0; it < 1'000'000; ++it) {
    if (f.zagier_reduced()) return f;
    f = minus_cf_step(f);
  }
  throw SearchError("zagier_reduce: no reduced form reached");
}

std::vector<FormCycle> zagier_cycles(std::int64_t D) {
  const std::vector<QuadForm> reduced = zagier_reduced_forms(D);
  std::set<QuadForm> seen;
  std::vector<FormCycle> cycles;
  for (const QuadForm& start : reduced) {
    if (seen.count(start)) continue;
    FormCycle cyc;
    cyc.D = D;
    QuadForm f = start;
    do {
      std::int64_t n = 0;
      const QuadForm next = minus_cf_step(f, &n);
      cyc.forms.push_back(f);
      cyc.cf_exponents.push_back(n);
      seen.insert(f);
      f = next;
      if (cyc.forms.size() > reduced.size()) throw SearchError("zagier_cycles: cycle failed to close");
    } while (f != start);

    // Lexicographically minimal rotation of the exponents, ties by first form.
    const std::size_t l = cyc.ell();
    auto rotation_less = [&](std::size_t r, std::size_t best) {
      for (std::size_t i = 0; i < l; ++i) {
        const auto x = cyc.cf_exponents[(r + i) % l];
        const auto y = cyc.cf_exponents[(best + i) % l];
        if (x != y) return x < y;
      }
      return cyc.forms[r] < cyc.forms[best];
    };
    std::size_t best = 0;
    for (std::size_t r = 1; r < l; ++r) {
      if (rotation_less(r, best)) best = r;
    }
    std::rotate(cyc.forms.begin(), cyc.forms.begin() + static_cast<std::ptrdiff_t>(best), cyc.forms.end());
    std::rotate(cyc.cf_exponents.begin(), cyc.cf_exponents.begin() + static_cast<std::ptrdiff_t>(best),
                cyc.cf_exponents.end());
    cycles.push_back(std::move(cyc));
  }
  std::sort(cycles.begin(), cycles.end(),
            [](const FormCycle& x, const FormCycle& y) { return x.forms.front() < y.forms.front(); });
  return cycles;
}

std::size_t narrow_class_count(std::int64_t D) {
  return zagier_cycles(D).size();
}

PellUnit fundamental_automorph(std::int64_t D) {
  require_indefinite(D);
  const std::int64_t sigma = D % 2;
  const std::int64_t s = isqrt(D);
  // Complete quotients (P + sqrt D) / Q starting from (sqrt D - sigma) / 2.
  std::int64_t P = -sigma;
  std::int64_t Q = 2;
  // Convergent recurrences seeded with p_{-1} = 1, p_{-2} = 0, q_{-1} = 0, q_{-2} = 1.
  mpz_class p1 = 1, p2 = 0, q1 = 0, q2 = 1;
  for (int it = 0; it < 10'000'000; ++it) {
    const std::int64_t a = floor_quadratic(P, Q, s);
    const mpz_class p = a * p1 + p2;
    const mpz_class q = a * q1 + q2;
    p2 = p1;
    p1 = p;
    q2 = q1;
    q1 = q;
    const mpz_class t = 2 * p + sigma * q;
    if (t > 0 && t * t - D * q * q == 4) {
      return {D, t, q, arccosh_half(t)};
    }
    const std::int64_t Pn = a * Q - P;
    Q = (D - Pn * Pn) / Q;
    P = Pn;
  }
  throw SearchError("fundamental_automorph: continued fraction budget exhausted");
}

PellUnit fundamental_unit(std::int64_t D) {
  const PellUnit eps = fundamental_automorph(D);
  // A norm -1 unit e0 = (s + v sqrt D) / 2 has e0^2 = eps, so t = s^2 + 2 and u = s v.
  const mpz_class s2 = eps.t - 2;
  if (mpz_perfect_square_p(s2.get_mpz_t()) == 0) return eps;
  mpz_class s;
  mpz_sqrt(s.get_mpz_t(), s2.get_mpz_t());
  if (s == 0 || eps.u % s != 0) return eps;
  const mpz_class v = eps.u / s;
  if (s * s - D * v * v != -4) return eps;
  return {D, s, v, eps.log_eps / 2.0, -1};
}

double total_geodesic_length(const std::vector<FormCycle>& cycles) {
  double total = 0.0;
  for (const auto& c : cycles) total += c.length();
  return total;
}

int genus_character(const GenusCharacterSpec& spec, const QuadForm& q, int bound) {
  if (q.disc() != spec.D) throw DomainError("genus_character: disc(Q) != D");
  const std::int64_t d = spec.d;
  if (std::gcd(q.content(), d) > 1) return 0;
  if (d == 1) return 1;
  for (std::int64_t r = 1; r <= bound; ++r) {
    for (std::int64_t x = -r; x <= r; ++x) {
      for (std::int64_t y = -r; y <= r; ++y) {
        if (std::max(std::abs(x), std::abs(y)) != r) continue;
        const std::int64_t n = q(x, y);
        if (n != 0 && std::gcd(n, d) == 1) return kronecker(d, n);
      }
    }
  }
  throw SearchError("genus_character: no coprime represented value within bound");
}

ClassIndex::ClassIndex(std::int64_t D) : D_(D), cycles_(zagier_cycles(D)) {
  for (std::size_t i = 0; i < cycles_.size(); ++i) {
    for (const auto& f : cycles_[i].forms) lookup_.emplace(f, i);
  }
}

std::size_t ClassIndex::class_of(const QuadForm& q) const {
  if (q.disc() != D_) throw DomainError("class_of: discriminant mismatch");
  const auto it = lookup_.find(zagier_reduce(q));
  if (it == lookup_.end()) throw SearchError("class_of: reduced form not in any cycle");
  return it->second;
}

void write_cycles_csv(std::ostream& os, const std::vector<FormCycle>& cycles, bool header) {
  if (header) os << "D,class_index,ell,cf_exponents,a,b,c\n";
  for (std::size_t i = 0; i < cycles.size(); ++i) {
    const auto& cyc = cycles[i];
    std::string exps;
    for (std::size_t k = 0; k < cyc.cf_exponents.size(); ++k) {
      if (k) exps += ';';
      exps += std::to_string(cyc.cf_exponents[k]);
    }
    for (const auto& f : cyc.forms) {
      os << cyc.D << ',' << i << ',' << cyc.ell() << ',' << exps << ',' << f.a << ',' << f.b << ',' << f.c << '\n';
    }
  }
}

}  // namespace qtrace
