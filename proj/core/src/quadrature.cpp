#include "qtrace/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

#include "qtrace/errors.hpp"

namespace qtrace {

std::string to_string(QuadratureScheme s) {
  return s == QuadratureScheme::adaptive_gauss ? "adaptive_gauss" : "composite_gauss";
}

std::string to_string(PrecisionMode p) {
  return p == PrecisionMode::double_precision ? "double" : "extended";
}

QuadratureScheme parse_scheme(const std::string& s) {
  if (s == "adaptive_gauss") return QuadratureScheme::adaptive_gauss;
  if (s == "composite_gauss") return QuadratureScheme::composite_gauss;
  throw DomainError("unknown quadrature scheme: " + s);
}

PrecisionMode parse_precision_mode(const std::string& s) {
  if (s == "double") return PrecisionMode::double_precision;
  if (s == "extended") return PrecisionMode::extended;
  throw DomainError("unknown precision mode: " + s);
}

void QuadratureSpec::validate() const {
  if (!(abs_tol > 0.0)) throw DomainError("quadrature: abs_tol must be positive");
  if (max_nodes == 0) throw DomainError("quadrature: node budget must be positive");
}

namespace {

struct Panel {
  std::size_t piece;
  double a, b;
  cplx value;
  double error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

Panel gk15(const ComplexIntegrand& f, std::size_t piece, double a, double b) {
  using boost::math::quadrature::gauss;
  using boost::math::quadrature::gauss_kronrod;
  const auto& xk = gauss_kronrod<double, 15>::abscissa();
  const auto& wk = gauss_kronrod<double, 15>::weights();
  const auto& wg = gauss<double, 7>::weights();
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const cplx f0 = f(mid);
  cplx kron = wk[0] * f0;
  cplx gaussv = wg[0] * f0;
  for (std::size_t i = 1; i < xk.size(); ++i) {
    const cplx s = f(mid - half * xk[i]) + f(mid + half * xk[i]);
    kron += wk[i] * s;
    // Gauss nodes sit at the even Kronrod indices.
    if (i % 2 == 0) gaussv += wg[i / 2] * s;
  }
  kron *= half;
  gaussv *= half;
  return {piece, a, b, kron, std::abs(kron - gaussv)};
}

}  // namespace

QuadResult adaptive_gauss_kronrod(const ComplexIntegrand& f, double a, double b, double abs_tol,
                                  std::size_t max_nodes) {
  return adaptive_gauss_kronrod(std::vector<QuadPiece>{{f, a, b}}, abs_tol, max_nodes);
}

QuadResult adaptive_gauss_kronrod(const std::vector<QuadPiece>& pieces, double abs_tol, std::size_t max_nodes) {
  std::priority_queue<Panel> heap;
  std::size_t nodes = 0;
  double err = 0.0;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    if (pieces[i].a == pieces[i].b) continue;
    heap.push(gk15(pieces[i].f, i, pieces[i].a, pieces[i].b));
    nodes += 15;
  }
  {
    auto copy = heap;
    while (!copy.empty()) {
      err += copy.top().error;
      copy.pop();
    }
  }
  while (err > abs_tol) {
    if (nodes + 30 > max_nodes) {
      throw AccuracyError("adaptive quadrature: error " + std::to_string(err) + " above tolerance " +
                          std::to_string(abs_tol) + " at node budget");
    }
    const Panel p = heap.top();
    heap.pop();
    const double m = 0.5 * (p.a + p.b);
    if (!(m > std::min(p.a, p.b) && m < std::max(p.a, p.b))) {
      throw AccuracyError("adaptive quadrature: panel width underflow");
    }
    const ComplexIntegrand& f = pieces[p.piece].f;
    const Panel l = gk15(f, p.piece, p.a, m);
    const Panel r = gk15(f, p.piece, m, p.b);
    nodes += 30;
    heap.push(l);
    heap.push(r);
    // Re-sum to keep the estimate free of cancellation drift.
    if (heap.size() % 1024 == 0) {
      err = 0.0;
      auto copy = heap;
      while (!copy.empty()) {
        err += copy.top().error;
        copy.pop();
      }
    } else {
      err += l.error + r.error - p.error;
    }
  }
  // Sum per piece in panel order so the result does not depend on heap layout.
  std::vector<Panel> panels;
  panels.reserve(heap.size());
  while (!heap.empty()) {
    panels.push_back(heap.top());
    heap.pop();
  }
  std::sort(panels.begin(), panels.end(), [](const Panel& x, const Panel& y) {
    return x.piece != y.piece ? x.piece < y.piece : x.a < y.a;
  });
  QuadResult out;
  out.nodes = nodes;
  for (const Panel& p : panels) {
    out.value += p.value;
    out.error += p.error;
  }
  return out;
}

QuadResult composite_gauss(const ComplexIntegrand& f, double a, double b, double abs_tol, std::size_t max_nodes) {
  using boost::math::quadrature::gauss;
  const auto& x = gauss<double, 10>::abscissa();
  const auto& w = gauss<double, 10>::weights();
  auto rule = [&](std::size_t panels) {
    const double h = (b - a) / static_cast<double>(panels);
    cplx sum = 0.0;
    for (std::size_t k = 0; k < panels; ++k) {
      const double mid = a + (static_cast<double>(k) + 0.5) * h;
      for (std::size_t i = 0; i < x.size(); ++i) {
        sum += w[i] * (f(mid - 0.5 * h * x[i]) + f(mid + 0.5 * h * x[i]));
      }
    }
    return sum * (0.5 * h);
  };
  std::size_t panels = 4;
  std::size_t nodes = 10 * panels;
  cplx prev = rule(panels);
  while (true) {
    panels *= 2;
    nodes += 10 * panels;
    if (nodes > max_nodes) throw AccuracyError("composite quadrature: node budget exhausted");
    const cplx cur = rule(panels);
    const double diff = std::abs(cur - prev);
    if (diff < abs_tol) return {cur, diff, nodes};
    prev = cur;
  }
}

QuadResult integrate(const ComplexIntegrand& f, double a, double b, const QuadratureSpec& spec) {
  spec.validate();
  return spec.scheme == QuadratureScheme::adaptive_gauss
             ? adaptive_gauss_kronrod(f, a, b, spec.abs_tol, spec.max_nodes)
             : composite_gauss(f, a, b, spec.abs_tol, spec.max_nodes);
}

QuadResult tanh_sinh(const RealIntegrand& f, double a, double b, double rel_tol) {
  if (a == b) return {};
  boost::math::quadrature::tanh_sinh<double> rule;
  double err = 0.0;
  double l1 = 0.0;
  std::size_t levels = 0;
  const double v = rule.integrate(f, a, b, std::max(rel_tol, 1e-15), &err, &l1, &levels);
  return {cplx(v, 0.0), err, std::size_t{1} << (levels + 4)};
}

}  // namespace qtrace
