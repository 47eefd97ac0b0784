// Line sweep over the truncated fundamental domain for the winding-number
// mass and the surface trace, plus the Ci/Si-kernel series.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "qtrace/errors.hpp"
#include "qtrace/geodesics.hpp"
#include "qtrace/modforms.hpp"
#include "qtrace/special_functions.hpp"
#include "series_detail.hpp"

namespace qtrace {

namespace {

constexpr double kPi = std::numbers::pi;
const double kFloor = std::sqrt(3.0) / 2.0;

// A translate of a class geodesic meeting F, weighted by chi(class) sgn(a).
struct SweepForm {
  double c = 0.0;
  double r = 0.0;
  double w = 0.0;
};

struct Interval {
  double lo, hi, w;
};

std::vector<SweepForm> sweep_forms(const GenusCharacterSpec& spec, Orientation orientation) {
  const std::int64_t D = spec.D;
  const ClassIndex index(D);
  std::vector<int> chi(index.cycles().size());
  for (std::size_t k = 0; k < chi.size(); ++k) chi[k] = genus_character(spec, index.cycles()[k].forms.front());
  const double sign = orientation == Orientation::standard ? 1.0 : -1.0;
  const double sqrtD = std::sqrt(static_cast<double>(D));
  std::vector<SweepForm> out;
  // r = sqrt(D)/(2|a|) > sqrt(3)/2 and |center| < 1/2 + r.
  const auto A = static_cast<std::int64_t>(std::ceil(std::sqrt(static_cast<double>(D) / 3.0)));
  for (std::int64_t a = -A; a <= A; ++a) {
    if (a == 0) continue;
    const double r = sqrtD / (2.0 * std::abs(static_cast<double>(a)));
    if (r <= kFloor) continue;
    const auto B = static_cast<std::int64_t>(std::ceil(std::abs(static_cast<double>(a)) + sqrtD));
    for (std::int64_t b = -B; b <= B; ++b) {
      if ((b * b - D) % (4 * a) != 0) continue;
      const double c = -static_cast<double>(b) / (2.0 * static_cast<double>(a));
      if (std::abs(c) >= 0.5 + r) continue;
      const QuadForm f{a, b, (b * b - D) / (4 * a)};
      const int x = chi[index.class_of(f)];
      if (x == 0) continue;
      out.push_back({c, r, sign * x * (a > 0 ? 1.0 : -1.0)});
    }
  }
  return out;
}

// Heights in (floor, top) where some interval endpoint switches branch.
std::vector<double> breakpoints(const std::vector<SweepForm>& forms, double top) {
  std::vector<double> ys{kFloor, top};
  auto add = [&](double y) {
    if (y > kFloor && y < top) ys.push_back(y);
  };
  add(1.0);
  for (const auto& f : forms) {
    add(f.r);
    for (const double edge : {-0.5, 0.5}) {
      const double h2 = f.r * f.r - (edge - f.c) * (edge - f.c);
      if (h2 > 0.0) add(std::sqrt(h2));
    }
    if (f.c != 0.0) {
      const double x = (1.0 - f.r * f.r + f.c * f.c) / (2.0 * f.c);
      if (std::abs(x) < 1.0) add(std::sqrt(1.0 - x * x));
    }
  }
  std::sort(ys.begin(), ys.end());
  ys.erase(std::unique(ys.begin(), ys.end(), [](double a, double b) { return std::abs(a - b) < 1e-14; }), ys.end());
  return ys;
}

// Weighted x-intervals of F at height y covered by the discs.
void slice(const std::vector<SweepForm>& forms, double y, std::vector<Interval>& out) {
  out.clear();
  double comps[2][2];
  int ncomp = 0;
  if (y >= 1.0) {
    comps[ncomp][0] = -0.5;
    comps[ncomp++][1] = 0.5;
  } else {
    const double u = std::sqrt(1.0 - y * y);
    comps[ncomp][0] = -0.5;
    comps[ncomp++][1] = -u;
    comps[ncomp][0] = u;
    comps[ncomp++][1] = 0.5;
  }
  for (const auto& f : forms) {
    if (f.r <= y) continue;
    const double s = std::sqrt(f.r * f.r - y * y);
    for (int k = 0; k < ncomp; ++k) {
      const double lo = std::max(f.c - s, comps[k][0]);
      const double hi = std::min(f.c + s, comps[k][1]);
      if (hi > lo) out.push_back({lo, hi, f.w});
    }
  }
}

struct SweepResult {
  double value = 0.0;
  double error = 0.0;
};

template <class F>
SweepResult sweep(const std::vector<SweepForm>& forms, double rel_tol, F&& integrand) {
  if (forms.empty()) return {};
  double top = kFloor;
  for (const auto& f : forms) top = std::max(top, f.r);
  const auto ys = breakpoints(forms, top);
  SweepResult out;
  for (std::size_t i = 0; i + 1 < ys.size(); ++i) {
    const QuadResult r = tanh_sinh(integrand, ys[i], ys[i + 1], rel_tol);
    out.value += r.value.real();
    out.error += r.error;
  }
  return out;
}

double exact_mass(const GenusCharacterSpec& spec) {
  if (spec.d > 0) return 0.0;
  const auto a = reduced_forms_imaginary(spec.d);
  const auto b = reduced_forms_imaginary(spec.d_prime);
  return static_cast<double>(a.class_number() * b.class_number()) / static_cast<double>(a.omega * b.omega);
}

GenusCharacterSpec surface_spec(std::int64_t D, std::int64_t d) {
  if (D <= 0 || is_square(D)) throw DomainError("surface: D must be a positive nonsquare discriminant");
  return GenusCharacterSpec::make(D, d);
}

}  // namespace

MassResult nu_mass_detailed(std::int64_t D, std::int64_t d, double abs_tol, Orientation orientation) {
  const GenusCharacterSpec spec = surface_spec(D, d);
  MassResult out;
  if (d > 0) return out;
  out.exact = exact_mass(spec);
  const auto forms = sweep_forms(spec, orientation);
  std::vector<Interval> iv;
  const auto r = sweep(forms, std::max(abs_tol, 1e-14), [&](double y) {
    slice(forms, y, iv);
    double acc = 0.0;
    for (const auto& x : iv) acc += x.w * (x.hi - x.lo);
    return acc / (y * y);
  });
  out.value = r.value / (4.0 * kPi);
  out.error = r.error / (4.0 * kPi);
  return out;
}

double nu_mass(std::int64_t D, std::int64_t d) {
  return nu_mass_detailed(D, d).value;
}

TraceReport surface_trace(std::int64_t D, std::int64_t d, int m, TraceMethod method, const TraceSettings& settings) {
  if (m < 1) throw DomainError("surface_trace: m must be positive");
  if (method != TraceMethod::surface_direct && method != TraceMethod::surface_series) {
    throw DomainError("surface_trace: method must be surface_direct or surface_series");
  }
  const GenusCharacterSpec spec = surface_spec(D, d);
  TraceReport rep;
  rep.D = D;
  rep.d = d;
  rep.m = m;
  rep.method = method;
  rep.outside_hypotheses = (D % 2 == 0);
  if (method == TraceMethod::surface_series) rep.cutoff = std::floor(settings.cutoff);
  else rep.tolerance = settings.quad.abs_tol;
  if (d > 0) return rep;
  rep.main_term = -24.0 * static_cast<double>(sigma1(static_cast<std::uint64_t>(m))) * exact_mass(spec);

  if (method == TraceMethod::surface_series) {
    // With nu oriented so that the mass is +h(d)h(d')/(omega_d omega_d'), the
    // kernel sum enters with a plus sign.
    const auto s = detail::kernel_series(m, spec, settings, [](double x) { return kernel_f(x); });
    rep.value = s.sum / kPi + rep.main_term;
    rep.error_estimate = s.tail / kPi;
  } else {
    const auto forms = sweep_forms(spec, settings.orientation);
    const int N = jm_truncation(m);
    const QSeries jm = jm_series(m, N);
    // Exponents -m and 1..N; j_m has no constant term.
    std::vector<int> ns{-m};
    std::vector<double> coef{1.0};
    for (int n = 1; n <= N; ++n) {
      ns.push_back(n);
      coef.push_back(jm.coefficient(n).get_d());
    }
    std::vector<Interval> iv;
    const auto r = sweep(forms, 1e-12, [&](double y) {
      slice(forms, y, iv);
      double acc = 0.0;
      for (std::size_t k = 0; k < ns.size(); ++k) {
        const double n = static_cast<double>(ns[k]);
        const double scale = coef[k] * std::exp(-2.0 * kPi * n * y) / (2.0 * kPi * n);
        double part = 0.0;
        for (const auto& x : iv) part += x.w * (std::sin(2.0 * kPi * n * x.hi) - std::sin(2.0 * kPi * n * x.lo));
        acc += scale * part;
      }
      return acc / (y * y);
    });
    rep.value = r.value / (4.0 * kPi);
    rep.error_estimate = r.error / (4.0 * kPi);
  }
  rep.residual = rep.value - rep.main_term;
  return rep;
}

}  // namespace qtrace
