#include "qtrace/geodesics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <numeric>
#include <optional>
#include <set>
#include <thread>

#include "qtrace/errors.hpp"
#include "qtrace/kloosterman.hpp"
#include "qtrace/modforms.hpp"
#include "qtrace/special_functions.hpp"
#include "series_detail.hpp"

namespace qtrace {

namespace {

constexpr double kPi = std::numbers::pi;

// Semicircle of a form with a != 0, parametrized by signed arc length s
// from the apex: z(s) = c0 - r tanh(s) + i r / cosh(s); s -> -inf at w.
struct Circle {
  QuadForm q;
  double c0 = 0.0;
  double r = 0.0;
  double sqrtD = 0.0;

  explicit Circle(const QuadForm& f)
      : q(f),
        c0(-static_cast<double>(f.b) / (2.0 * static_cast<double>(f.a))),
        r(std::sqrt(static_cast<double>(f.disc())) / (2.0 * std::abs(static_cast<double>(f.a)))),
        sqrtD(std::sqrt(static_cast<double>(f.disc()))) {}

  cplx at(double s) const { return {c0 - r * std::tanh(s), r / std::cosh(s)}; }
  double height(double s) const { return r / std::cosh(s); }

  // sgn(a) sqrt(D) / Q(z, 1): the holomorphic form equal to ds along the geodesic.
  cplx omega(cplx z) const {
    const cplx qz = (static_cast<double>(q.a) * z + static_cast<double>(q.b)) * z + static_cast<double>(q.c);
    return (q.a > 0 ? sqrtD : -sqrtD) / qz;
  }
};

double s_of_theta(double theta) {
  return std::log(std::tan(0.5 * theta));
}

double s_of_cos(double cos_theta) {
  return s_of_theta(std::acos(std::clamp(cos_theta, -1.0, 1.0)));
}

// Arc of the circle inside one horoball, as an s-interval.
struct Excursion {
  double s_in = 0.0;
  double s_out = 0.0;
  bool at_infinity = false;
  double xp = 0.0;
  double rho = 0.0;
};

std::optional<Excursion> excursion_at_infinity(const Circle& g) {
  if (g.r <= kHoroballHeight) return std::nullopt;
  const double t1 = std::asin(kHoroballHeight / g.r);
  return Excursion{s_of_theta(t1), s_of_theta(kPi - t1), true, 0.0, 0.0};
}

std::optional<Excursion> excursion_at(const Circle& g, double xp, double rho) {
  const double A = (g.c0 - xp) * (g.c0 - xp) + g.r * g.r;
  const double B = 2.0 * (g.c0 - xp) * g.r;
  const double C = 2.0 * rho * g.r;
  const double R = std::hypot(B, C);
  // Inside iff A + B cos(theta) - C sin(theta) < 0, i.e. cos(theta + phi) < -A/R.
  if (A >= R) return std::nullopt;
  const double alpha = std::acos(-A / R);
  const double phi = std::atan2(C, B);
  const double lo = std::max(alpha - phi, 0.0);
  const double hi = std::min(2.0 * kPi - alpha - phi, kPi);
  if (!(hi > lo)) return std::nullopt;
  return Excursion{s_of_theta(std::max(lo, 1e-300)), s_of_theta(std::min(hi, kPi - 1e-16)), false, xp, rho};
}

// Every horoball excursion meeting (s_lo, s_hi), sorted by entry.
std::vector<Excursion> excursions(const Circle& g, double s_lo, double s_hi) {
  std::vector<Excursion> out;
  auto keep = [&](const std::optional<Excursion>& e) {
    if (e && e->s_out > s_lo && e->s_in < s_hi) out.push_back(*e);
  };
  keep(excursion_at_infinity(g));
  const double y_min = std::min(g.height(s_lo), g.height(s_hi));
  const double x_lo = g.at(s_hi).real();
  const double x_hi = g.at(s_lo).real();
  // A horoball at p/q reaches height 1 / (Y0 q^2).
  const auto q_max = static_cast<std::int64_t>(std::floor(1.0 / std::sqrt(kHoroballHeight * y_min))) + 1;
  if (q_max > 100'000) throw ResourceError("extended mode: geodesic arc too close to the real axis");
  for (std::int64_t q = 1; q <= q_max; ++q) {
    const double qd = static_cast<double>(q);
    const double rho = 1.0 / (2.0 * kHoroballHeight * qd * qd);
    const auto p_lo = static_cast<std::int64_t>(std::ceil((x_lo - 2.0 * rho) * qd));
    const auto p_hi = static_cast<std::int64_t>(std::floor((x_hi + 2.0 * rho) * qd));
    for (std::int64_t p = p_lo; p <= p_hi; ++p) {
      if (std::gcd(p, q) != 1) continue;
      keep(excursion_at(g, static_cast<double>(p) / qd, rho));
    }
  }
  std::sort(out.begin(), out.end(), [](const Excursion& a, const Excursion& b) { return a.s_in < b.s_in; });
  return out;
}

// The excursion containing z(s), found from the reducing word: z lies in the
// horoball at the cusp gamma^{-1} infinity exactly when Im(gamma z) > Y0.
std::optional<Excursion> excursion_containing(const Circle& g, double s) {
  const DomainPoint p = reduce_to_fundamental_domain(g.at(s));
  if (p.reduced.imag() <= kHoroballHeight) return std::nullopt;
  const auto c = p.word[2];
  const auto d = p.word[3];
  if (c == 0) return excursion_at_infinity(g);
  const double q = static_cast<double>(std::abs(c));
  const double xp = -static_cast<double>(d) / static_cast<double>(c);
  return excursion_at(g, xp, 1.0 / (2.0 * kHoroballHeight * q * q));
}

// One stretch of quadrature: along the geodesic in s, or along a detour.
struct Stretch {
  bool detour = false;
  double s_a = 0.0;
  double s_b = 0.0;
  Excursion ex{};
};

std::vector<Stretch> plan_piece(const Circle& g, double lo, double hi, bool extended) {
  std::vector<Stretch> out;
  if (!extended) {
    out.push_back({false, lo, hi, {}});
    return out;
  }
  double cur = lo;
  for (const Excursion& e : excursions(g, lo, hi)) {
    const double a = std::max(cur, e.s_in);
    const double b = std::min(e.s_out, hi);
    if (!(b > a)) continue;
    if (a > cur) out.push_back({false, cur, a, {}});
    out.push_back({true, a, b, e});
    cur = b;
  }
  if (hi > cur) out.push_back({false, cur, hi, {}});
  return out;
}

// The integrand of one stretch as a function of its own parameter.
QuadPiece stretch_piece(const Circle& g, const Stretch& st, const PointFunction& f) {
  if (!st.detour) return {[g, &f](double s) { return f(g.at(s)); }, st.s_a, st.s_b};
  const cplx z_in = g.at(st.s_a);
  const cplx z_out = g.at(st.s_b);
  if (st.ex.at_infinity) {
    const cplx dz = z_out - z_in;
    return {[g, &f, z_in, dz](double t) {
              const cplx z = z_in + t * dz;
              return f(z) * g.omega(z) * dz;
            },
            0.0, 1.0};
  }
  // Upper arc of the horocycle: angles kept in (-pi/2, 3pi/2) so the path
  // never passes the point of tangency.
  const cplx centre(st.ex.xp, st.ex.rho);
  auto angle = [](cplx w) {
    double a = std::arg(w);
    if (a <= -0.5 * kPi) a += 2.0 * kPi;
    return a;
  };
  const double a0 = angle(z_in - centre);
  const double a1 = angle(z_out - centre);
  const double r0 = std::abs(z_in - centre);
  const double r1 = std::abs(z_out - centre);
  return {[g, &f, centre, a0, a1, r0, r1](double t) {
            const double phi = a0 + t * (a1 - a0);
            const double rad = r0 + t * (r1 - r0);
            const cplx e = std::polar(1.0, phi);
            const cplx z = centre + rad * e;
            const cplx dz = (r1 - r0) * e + cplx(0.0, rad * (a1 - a0)) * e;
            return f(z) * g.omega(z) * dz;
          },
          0.0, 1.0};
}

struct Piece {
  Circle g;
  double lo;
  double hi;
};

CycleIntegral integrate_pieces(const std::vector<Piece>& pieces, const PointFunction& f, const QuadratureSpec& spec) {
  spec.validate();
  const bool extended = spec.precision_mode == PrecisionMode::extended;
  std::vector<QuadPiece> parts;
  std::vector<bool> detour;
  for (const Piece& p : pieces) {
    for (const Stretch& st : plan_piece(p.g, p.lo, p.hi, extended)) {
      parts.push_back(stretch_piece(p.g, st, f));
      detour.push_back(st.detour);
    }
  }
  CycleIntegral out;
  if (spec.scheme == QuadratureScheme::adaptive_gauss) {
    // One error budget for the whole cycle.
    const QuadResult r = adaptive_gauss_kronrod(parts, spec.abs_tol, spec.max_nodes);
    return {r.value, r.error, r.nodes};
  }
  const double tol = spec.abs_tol / static_cast<double>(std::max<std::size_t>(parts.size(), 1));
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (out.nodes >= spec.max_nodes) throw AccuracyError("cycle integral: node budget exhausted");
    const std::size_t left = spec.max_nodes - out.nodes;
    const QuadResult r = detour[i] ? adaptive_gauss_kronrod(parts[i].f, parts[i].a, parts[i].b, tol, left)
                                   : composite_gauss(parts[i].f, parts[i].a, parts[i].b, tol, left);
    out.value += r.value;
    out.error += r.error;
    out.nodes += r.nodes;
  }
  return out;
}

// s-coordinates of the crossings with |z| = 1 and |z - n| = 1.
double crossing_s(const Circle& g, double shift) {
  const double c = g.c0 - shift;
  return s_of_cos((1.0 - c * c - g.r * g.r) / (2.0 * c * g.r));
}

double move_out_of_horoball(const Circle& g, double s) {
  const auto e = excursion_containing(g, s);
  return e ? e->s_out : s;
}

}  // namespace

cplx GeodesicSegment::at(double theta) const {
  return {center + radius * std::cos(theta), radius * std::sin(theta)};
}

double GeodesicSegment::length() const {
  return std::abs(s_of_theta(theta_end) - s_of_theta(theta_start));
}

std::vector<GeodesicSegment> cycle_segments(const FormCycle& cycle) {
  std::vector<GeodesicSegment> out;
  for (std::size_t i = 0; i < cycle.ell(); ++i) {
    const Circle g(cycle.forms[i]);
    const double n = static_cast<double>(cycle.cf_exponents[i]);
    auto theta = [&](double shift) {
      const double c = g.c0 - shift;
      return std::acos(std::clamp((1.0 - c * c - g.r * g.r) / (2.0 * c * g.r), -1.0, 1.0));
    };
    out.push_back({g.c0, g.r, theta(n), theta(0.0)});
  }
  return out;
}

CycleIntegral cycle_integral(const FormCycle& cycle, const PointFunction& f, const QuadratureSpec& spec,
                             double anchor_shift) {
  spec.validate();
  const bool extended = spec.precision_mode == PrecisionMode::extended;
  const std::size_t l = cycle.ell();
  std::vector<Circle> circles;
  std::vector<double> s_p(l), s_r(l), anchor(l);
  for (std::size_t i = 0; i < l; ++i) {
    circles.emplace_back(cycle.forms[i]);
    s_p[i] = crossing_s(circles[i], 0.0);
    s_r[i] = crossing_s(circles[i], static_cast<double>(cycle.cf_exponents[i]));
    anchor[i] = s_p[i] + anchor_shift;
    if (extended) anchor[i] = move_out_of_horoball(circles[i], anchor[i]);
  }
  // T^{n_i} S maps the anchor on the next circle to s_r[i] + its offset.
  std::vector<Piece> pieces;
  for (std::size_t i = 0; i < l; ++i) {
    const std::size_t j = (i + 1) % l;
    pieces.push_back({circles[i], s_r[i] + (anchor[j] - s_p[j]), anchor[i]});
  }
  return integrate_pieces(pieces, f, spec);
}

CycleIntegral single_segment_integral(const FormCycle& cycle, const PointFunction& f, const QuadratureSpec& spec,
                                      double s0) {
  spec.validate();
  const Circle g(cycle.forms.front());
  if (spec.precision_mode == PrecisionMode::extended) s0 = move_out_of_horoball(g, s0);
  return integrate_pieces({{g, s0 - cycle.length(), s0}}, f, spec);
}

CycleIntegral class_cycle_integral_detailed(const FormCycle& cycle, int m, const QuadratureSpec& spec) {
  if (m < 1) throw DomainError("class_cycle_integral: m must be positive");
  if (spec.precision_mode == PrecisionMode::double_precision &&
      m * std::sqrt(static_cast<double>(cycle.D)) > kDoubleModeBudget) {
    throw ModeError("class_cycle_integral: m sqrt(D) exceeds the double-mode budget; use extended mode");
  }
  return cycle_integral(cycle, [m](cplx z) { return eval_jm(m, z); }, spec);
}

bool reflection_invariant(const FormCycle& cycle) {
  const QuadForm& f = cycle.forms.front();
  const QuadForm r = zagier_reduce({f.a, -f.b, f.c});
  return std::find(cycle.forms.begin(), cycle.forms.end(), r) != cycle.forms.end();
}

namespace {

double imag_allowance(const QuadratureSpec& spec, const CycleIntegral& r) {
  return std::max(100.0 * (spec.abs_tol + r.error), 1e-9 * (1.0 + std::abs(r.value.real())));
}

}  // namespace

double class_cycle_integral(const FormCycle& cycle, int m, const QuadratureSpec& spec) {
  const CycleIntegral r = class_cycle_integral_detailed(cycle, m, spec);
  if (reflection_invariant(cycle) && std::abs(r.value.imag()) > imag_allowance(spec, r)) {
    throw AccuracyError("class_cycle_integral: imaginary part " + std::to_string(r.value.imag()) +
                        " exceeds tolerance");
  }
  return r.value.real();
}

std::string to_string(TraceMethod m) {
  switch (m) {
    case TraceMethod::direct: return "direct";
    case TraceMethod::series: return "series";
    case TraceMethod::surface_direct: return "surface_direct";
    case TraceMethod::surface_series: return "surface_series";
  }
  return "direct";
}

TraceMethod parse_trace_method(const std::string& s) {
  if (s == "direct") return TraceMethod::direct;
  if (s == "series") return TraceMethod::series;
  if (s == "surface_direct") return TraceMethod::surface_direct;
  if (s == "surface_series") return TraceMethod::surface_series;
  throw DomainError("unknown trace method: " + s);
}

void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& f) {
  if (n == 0) return;
  const unsigned w = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(n)));
  std::vector<std::exception_ptr> errors(n);
  if (w == 1) {
    for (std::size_t i = 0; i < n; ++i) {
      try {
        f(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < w; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            f(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

namespace detail {

SeriesResult kernel_series(std::int64_t m, const GenusCharacterSpec& spec, const TraceSettings& settings,
                           const std::function<double(double)>& kernel) {
  if (!(settings.cutoff >= 0.0)) throw DomainError("series: cutoff must be non-negative");
  if (settings.cutoff > static_cast<double>(kSeriesCutoffCap)) throw ResourceError("series: cutoff above cap");
  const auto X = static_cast<std::int64_t>(std::floor(settings.cutoff));
  const std::vector<double> T = map_moduli(X, settings.workers, settings.chunk,
                                           [&](std::int64_t c) { return weyl_sum(m, spec, c); });
  const double arg = 4.0 * kPi * static_cast<double>(m) * std::sqrt(static_cast<double>(spec.D));
  SeriesResult out;
  std::vector<double> S(T.size());
  double s_acc = 0.0;
  for (std::size_t i = 0; i < T.size(); ++i) {
    const double c = 4.0 * static_cast<double>(i + 1);
    out.sum += T[i] * kernel(arg / c);
    s_acc += T[i] / std::sqrt(c);
    S[i] = s_acc;
  }
  if (!T.empty()) {
    // Partial summation: the tail is about |S(inf) - S(X)| sqrt(X) |K(arg/X)|,
    // with the first factor replaced by the spread of S over [X/2, X].
    double spread = 0.0;
    for (std::size_t i = T.size() / 2; i < T.size(); ++i) spread = std::max(spread, std::abs(S[i] - S.back()));
    const double c_last = 4.0 * static_cast<double>(T.size());
    out.tail = spread * std::sqrt(c_last) * std::abs(kernel(arg / c_last));
  }
  return out;
}

}  // namespace detail

TraceReport trace_cycle(std::int64_t D, std::int64_t d, int m, TraceMethod method, const TraceSettings& settings) {
  if (m < 1) throw DomainError("trace_cycle: m must be positive");
  if (D <= 0 || is_square(D)) throw DomainError("trace_cycle: D must be a positive nonsquare discriminant");
  if (method != TraceMethod::direct && method != TraceMethod::series) {
    throw DomainError("trace_cycle: method must be direct or series");
  }
  const GenusCharacterSpec spec = GenusCharacterSpec::make(D, d);
  TraceReport rep;
  rep.D = D;
  rep.d = d;
  rep.m = m;
  rep.method = method;
  rep.outside_hypotheses = (D % 2 == 0);
  const auto cycles = zagier_cycles(D);
  const double length = total_geodesic_length(cycles);
  rep.main_term = -24.0 * delta(d) * static_cast<double>(sigma1(static_cast<std::uint64_t>(m))) * length / (2.0 * kPi);

  if (method == TraceMethod::direct) {
    rep.tolerance = settings.quad.abs_tol;
    if (d < 0) {
      rep.main_term = 0.0;
      return rep;
    }
    if (settings.quad.precision_mode == PrecisionMode::double_precision &&
        m * std::sqrt(static_cast<double>(D)) > kDoubleModeBudget) {
      throw ModeError("trace_cycle: m sqrt(D) exceeds the double-mode budget; use extended mode");
    }
    std::vector<int> chi(cycles.size());
    for (std::size_t i = 0; i < cycles.size(); ++i) chi[i] = genus_character(spec, cycles[i].forms.front());
    std::vector<CycleIntegral> parts(cycles.size());
    QuadratureSpec per_class = settings.quad;
    per_class.abs_tol = settings.quad.abs_tol / static_cast<double>(std::max<std::size_t>(cycles.size(), 1));
    parallel_for(cycles.size(), settings.workers, [&](std::size_t i) {
      if (chi[i] != 0) parts[i] = class_cycle_integral_detailed(cycles[i], m, per_class);
    });
    CycleIntegral total;
    for (std::size_t i = 0; i < cycles.size(); ++i) {
      total.value += static_cast<double>(chi[i]) * parts[i].value;
      total.error += parts[i].error;
      total.nodes += parts[i].nodes;
    }
    if (std::abs(total.value.imag()) > imag_allowance(settings.quad, total)) {
      throw AccuracyError("trace_cycle: imaginary part " + std::to_string(total.value.imag()) +
                          " exceeds tolerance");
    }
    rep.value = total.value.real() / (2.0 * kPi);
    rep.imag_part = total.value.imag() / (2.0 * kPi);
    rep.error_estimate = total.error / (2.0 * kPi);
  } else {
    const auto s = detail::kernel_series(m, spec, settings, [](double x) { return std::sin(x); });
    rep.cutoff = std::floor(settings.cutoff);
    rep.value = s.sum + rep.main_term;
    rep.error_estimate = s.tail;
  }
  rep.residual = rep.value - rep.main_term;
  return rep;
}

namespace {

// The standard orientation counts a form with a > 0 as +1.
int orientation_sign(Orientation o) {
  return o == Orientation::standard ? 1 : -1;
}

std::set<QuadForm> class_forms(const QuadForm& q) {
  std::set<QuadForm> out;
  QuadForm f = zagier_reduce(q);
  while (out.insert(f).second) f = minus_cf_step(f);
  return out;
}

}  // namespace

int winding_number(const QuadForm& q, cplx z, Orientation orientation) {
  const std::int64_t D = q.disc();
  if (D <= 0 || is_square(D)) throw DomainError("winding_number: disc(Q) must be positive nonsquare");
  const double x = z.real();
  const double y = z.imag();
  if (!(y > 0.0)) throw DomainError("winding_number: Im z must be positive");
  const double Dd = static_cast<double>(D);
  if (y > std::sqrt(Dd) / 2.0) return 0;
  const double a_max = std::sqrt(Dd) / (2.0 * y);
  if (a_max > 1e6) throw ResourceError("winding_number: Im z too small for enumeration");
  const std::set<QuadForm> cls = class_forms(q);
  int count = 0;
  const auto A = static_cast<std::int64_t>(std::floor(a_max));
  for (std::int64_t a = -A; a <= A; ++a) {
    if (a == 0) continue;
    const double ad = static_cast<double>(a);
    const double room = Dd - 4.0 * ad * ad * y * y;
    if (room < -1e-9 * Dd) continue;
    const double w = std::sqrt(std::max(room, 0.0));
    auto b = static_cast<std::int64_t>(std::floor(-2.0 * ad * x - w)) - 1;
    const auto b_hi = static_cast<std::int64_t>(std::ceil(-2.0 * ad * x + w)) + 1;
    if (((b - D) % 2 + 2) % 2 != 0) ++b;
    for (; b <= b_hi; b += 2) {
      if ((b * b - D) % (4 * a) != 0) continue;
      const double u = 2.0 * ad * x + static_cast<double>(b);
      const double val = u * u - room;
      if (val >= 1e-9 * Dd) continue;
      const QuadForm f{a, b, (b * b - D) / (4 * a)};
      if (!cls.count(zagier_reduce(f))) continue;
      if (val > -1e-9 * Dd) throw DegeneratePositionError("winding_number: z lies on a translate of the geodesic");
      count += a > 0 ? 1 : -1;
    }
  }
  return orientation_sign(orientation) * count;
}

std::vector<std::int64_t> scan_discriminants(const ScanSpec& spec) {
  std::vector<std::int64_t> out;
  for (std::int64_t D = std::max<std::int64_t>(spec.D_min, 5); D <= spec.D_max; ++D) {
    if (!is_discriminant(D) || is_square(D)) continue;
    if (spec.odd_only && D % 2 == 0) continue;
    if (spec.fundamental_only && !is_fundamental(D)) continue;
    out.push_back(D);
  }
  return out;
}

void asymptotic_scan(const ScanSpec& spec, const std::function<void(const ScanRow&)>& sink) {
  for (const std::int64_t D : scan_discriminants(spec)) {
    ScanRow row;
    row.D = D;
    try {
      const bool surface = spec.method == TraceMethod::surface_direct || spec.method == TraceMethod::surface_series;
      row.report = surface ? surface_trace(D, spec.d, spec.m, spec.method, spec.settings)
                           : trace_cycle(D, spec.d, spec.m, spec.method, spec.settings);
      const double main = std::abs(row.report.main_term);
      row.residual_over_main = main > 0.0 ? row.report.residual / main : std::nan("");
      row.residual_over_power = row.report.residual / std::pow(static_cast<double>(D), 13.0 / 27.0);
    } catch (const Error& e) {
      row.error = e.what();
    }
    sink(row);
  }
}

std::vector<ScanRow> asymptotic_scan(const ScanSpec& spec) {
  std::vector<ScanRow> rows;
  asymptotic_scan(spec, [&](const ScanRow& r) { rows.push_back(r); });
  return rows;
}

}  // namespace qtrace
