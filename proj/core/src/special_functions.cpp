#include "qtrace/special_functions.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <utility>

#include "qtrace/errors.hpp"

namespace qtrace {

namespace {

constexpr double kSeriesLimit = 4.0;

// Power series for x <= 4; terms peak near 4^k/k! and stay below 1e2.
std::pair<double, double> cisi_series(double x) {
  double ci = 0.0;
  double si = 0.0;
  double term = 1.0;  // x^k / k!
  for (int k = 1; k < 100; ++k) {
    term *= x / k;
    const double piece = term / k;
    if (k % 2 == 1) {
      si += ((k / 2) % 2 == 0 ? 1.0 : -1.0) * piece;
    } else {
      ci += ((k / 2) % 2 == 1 ? -1.0 : 1.0) * piece;
    }
    if (piece < 1e-18 * (std::abs(si) + std::abs(ci) + 1e-300)) break;
  }
  ci += std::numbers::egamma + std::log(x);
  return {ci, si};
}

// Continued fraction for E1(ix) by modified Lentz, x > 4.
std::pair<double, double> cisi_fraction(double x) {
  using c = std::complex<double>;
  const double tiny = 1e-300;
  c b(1.0, x);
  c cc = 1.0 / tiny;
  c d = 1.0 / b;
  c h = d;
  for (int i = 2; i < 1000; ++i) {
    const double a = -static_cast<double>((i - 1) * (i - 1));
    b += 2.0;
    d = 1.0 / (a * d + b);
    cc = b + a / cc;
    const c del = cc * d;
    h *= del;
    if (std::abs(del.real() - 1.0) + std::abs(del.imag()) < 1e-16) {
      h *= c(std::cos(x), -std::sin(x));
      return {-h.real(), std::numbers::pi / 2.0 + h.imag()};
    }
  }
  throw AccuracyError("cisi: continued fraction failed to converge");
}

std::pair<double, double> cisi(double x) {
  if (!(x > 0.0)) throw DomainError("Ci/Si: x must be positive");
  return x <= kSeriesLimit ? cisi_series(x) : cisi_fraction(x);
}

}  // namespace

double cos_integral(double x) {
  return cisi(x).first;
}

double sin_integral(double x) {
  if (x == 0.0) return 0.0;
  if (x < 0.0) return -sin_integral(-x);
  return cisi(x).second;
}

double kernel_f(double x) {
  if (!(x > 0.0)) throw DomainError("kernel_f: x must be positive");
  const auto [ci, si] = cisi(2.0 * x);
  return ci * std::sin(x) - si * std::cos(x) + std::numbers::ln2 * std::sin(x);
}

}  // namespace qtrace
