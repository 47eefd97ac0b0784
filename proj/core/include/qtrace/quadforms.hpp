#pragma once

// Integral binary quadratic forms: Gauss reduction for negative
// discriminants, Zagier reduction cycles for positive ones, Pell units and
// genus characters.

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

namespace qtrace {

/// [a, b, c] = a x^2 + b x y + c y^2.
struct QuadForm {
  std::int64_t a = 0;
  std::int64_t b = 0;
  std::int64_t c = 0;

  std::int64_t disc() const { return b * b - 4 * a * c; }
  std::int64_t content() const;
  std::int64_t operator()(std::int64_t x, std::int64_t y) const { return a * x * x + b * x * y + c * y * y; }
  /// First root (-b + sqrt(D)) / (2a); covariant: root(Q o M) = M^{-1} root(Q).
  double root() const;
  double root_conjugate() const;
  /// Zagier-reduced: a > 0, c > 0, a + b + c < 0.
  bool zagier_reduced() const { return a > 0 && c > 0 && a + b + c < 0; }

  friend auto operator<=>(const QuadForm&, const QuadForm&) = default;
};

/// Q o M for M = [[alpha, beta], [gamma, delta]], i.e. Q(alpha x + beta y, gamma x + delta y).
QuadForm act(const QuadForm& q, std::int64_t alpha, std::int64_t beta, std::int64_t gamma, std::int64_t delta);

std::string to_string(const QuadForm& q);

struct QuadFormHash {
  std::size_t operator()(const QuadForm& q) const noexcept;
};

struct IntMatrix2 {
  mpz_class a{1}, b{0}, c{0}, d{1};

  IntMatrix2 operator*(const IntMatrix2& o) const;
  mpz_class trace() const { return a + d; }
  mpz_class det() const { return a * d - b * c; }
  friend bool operator==(const IntMatrix2&, const IntMatrix2&) = default;
};

struct FormCycle {
  std::int64_t D = 0;
  /// forms[i] has root w_i with n_i = ceil(w_i) = cf_exponents[i].
  std::vector<QuadForm> forms;
  std::vector<std::int64_t> cf_exponents;

  std::size_t ell() const { return forms.size(); }
  std::int64_t content() const { return forms.front().content(); }
  /// T^{n_1} S T^{n_2} S ... T^{n_l} S, fixing the root of forms[0].
  IntMatrix2 automorph() const;
  std::string automorph_word() const;
  /// Hyperbolic length of the closed geodesic: 2 arccosh(trace / 2).
  double length() const;
};

struct PellUnit {
  std::int64_t D = 0;
  mpz_class t;
  mpz_class u;
  /// log((t + u sqrt(D)) / 2).
  double log_eps = 0.0;
  /// t^2 - D u^2 = 4 * norm.
  int norm = 1;
};

/// D = d * d_prime with d fundamental.
struct GenusCharacterSpec {
  std::int64_t D = 0;
  std::int64_t d = 1;
  std::int64_t d_prime = 0;

  /// Validates that d is fundamental and divides D with a discriminant cofactor.
  static GenusCharacterSpec make(std::int64_t D, std::int64_t d);
};

struct ImaginaryClasses {
  std::int64_t d = 0;
  std::vector<QuadForm> forms;
  int omega = 1;

  std::size_t class_number() const { return forms.size(); }
};

/// arccosh(t / 2) for an arbitrary-size t >= 2.
double arccosh_half(const mpz_class& t);

/// Primitive Gauss-reduced forms of discriminant d < 0, ordered by (a, b).
ImaginaryClasses reduced_forms_imaginary(std::int64_t d);

/// All Zagier-reduced forms of discriminant D (primitive or not), sorted.
std::vector<QuadForm> zagier_reduced_forms(std::int64_t D);

/// One minus-continued-fraction step: [Q(n,1), -2an - b, a] with n = ceil(root).
QuadForm minus_cf_step(const QuadForm& q, std::int64_t* n_out = nullptr);

/// A Zagier-reduced form Gamma_1-equivalent to q (minus-CF iteration).
QuadForm zagier_reduce(const QuadForm& q);

/// One rotation-canonical cycle per Gamma_1-class, ordered by first form.
std::vector<FormCycle> zagier_cycles(std::int64_t D);

std::size_t narrow_class_count(std::int64_t D);

/// Minimal positive (t, u) with t^2 - D u^2 = 4, by the regular continued
/// fraction of (sqrt(D) - (D mod 2)) / 2.
PellUnit fundamental_automorph(std::int64_t D);

/// Minimal (t, u) with t^2 - D u^2 = -4 if one exists, else the automorph.
/// Its square is the automorph whenever norm == -1.
PellUnit fundamental_unit(std::int64_t D);

/// Sum of cycle lengths over all classes of discriminant D.
double total_geodesic_length(const std::vector<FormCycle>& cycles);

inline constexpr int kGenusSearchBound = 50;

/// chi_d(Q): 0 if gcd(a, b, c, d) > 1, else (d / Q(x, y)) for the first
/// represented value coprime to d, scanning max(|x|, |y|) = 1, 2, ...
int genus_character(const GenusCharacterSpec& spec, const QuadForm& q, int bound = kGenusSearchBound);

/// Lookup from any form of discriminant D to its cycle index.
class ClassIndex {
 public:
  explicit ClassIndex(std::int64_t D);

  std::int64_t D() const { return D_; }
  const std::vector<FormCycle>& cycles() const { return cycles_; }
  std::size_t class_of(const QuadForm& q) const;

 private:
  std::int64_t D_;
  std::vector<FormCycle> cycles_;
  std::unordered_map<QuadForm, std::size_t, QuadFormHash> lookup_;
};

/// Columns D, class_index, ell, cf_exponents, a, b, c; one row per form.
void write_cycles_csv(std::ostream& os, const std::vector<FormCycle>& cycles, bool header = true);

}  // namespace qtrace
