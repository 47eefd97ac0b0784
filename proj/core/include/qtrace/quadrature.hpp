#pragma once

// One-dimensional quadrature with an explicit node budget. Complex-valued
// integrands are first-class because j_m is complex off the real locus.

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "qtrace/ntheory.hpp"

namespace qtrace {

enum class QuadratureScheme { adaptive_gauss, composite_gauss };
enum class PrecisionMode { double_precision, extended };

std::string to_string(QuadratureScheme s);
std::string to_string(PrecisionMode p);
QuadratureScheme parse_scheme(const std::string& s);
PrecisionMode parse_precision_mode(const std::string& s);

struct QuadratureSpec {
  QuadratureScheme scheme = QuadratureScheme::adaptive_gauss;
  double abs_tol = 1e-8;
  std::size_t max_nodes = 4'000'000;
  PrecisionMode precision_mode = PrecisionMode::double_precision;

  /// DomainError unless abs_tol > 0 and max_nodes > 0.
  void validate() const;
};

struct QuadResult {
  cplx value{0.0, 0.0};
  double error = 0.0;
  std::size_t nodes = 0;

  QuadResult& operator+=(const QuadResult& o) {
    value += o.value;
    error += o.error;
    nodes += o.nodes;
    return *this;
  }
};

using ComplexIntegrand = std::function<cplx(double)>;
using RealIntegrand = std::function<double(double)>;

/// Globally adaptive 15-point Gauss-Kronrod; AccuracyError when the summed
/// error estimate stays above abs_tol after max_nodes evaluations.
QuadResult adaptive_gauss_kronrod(const ComplexIntegrand& f, double a, double b, double abs_tol,
                                  std::size_t max_nodes);

struct QuadPiece {
  ComplexIntegrand f;
  double a = 0.0;
  double b = 0.0;
};

/// The same rule over several intervals sharing one error budget: the panel
/// with the largest estimate is split next, whichever piece it belongs to.
QuadResult adaptive_gauss_kronrod(const std::vector<QuadPiece>& pieces, double abs_tol, std::size_t max_nodes);

/// 10-point Gauss-Legendre on 2^k equal panels, doubled until successive
/// values differ by less than abs_tol.
QuadResult composite_gauss(const ComplexIntegrand& f, double a, double b, double abs_tol, std::size_t max_nodes);

/// Dispatch on spec.scheme.
QuadResult integrate(const ComplexIntegrand& f, double a, double b, const QuadratureSpec& spec);

/// Double-exponential rule for integrands with endpoint singularities.
/// rel_tol is relative to the L1 norm; the returned error is absolute.
QuadResult tanh_sinh(const RealIntegrand& f, double a, double b, double rel_tol);

}  // namespace qtrace
