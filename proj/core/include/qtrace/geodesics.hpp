#pragma once

// Cycle integrals of j_m over closed geodesics, winding numbers, the surface
// mass and the Kloosterman-series side of both traces.
//
// Cycle traces are reported as (1/2pi) sum_A chi(A) int_{C_A} j_m ds; main
// term and residual carry the same factor. Surface traces carry 1/(4pi).

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "qtrace/ntheory.hpp"
#include "qtrace/quadforms.hpp"
#include "qtrace/quadrature.hpp"

namespace qtrace {

/// Arc of the semicircle |z - center| = radius, angles measured from the positive real direction.
struct GeodesicSegment {
  double center = 0.0;
  double radius = 1.0;
  double theta_start = 0.0;
  double theta_end = 0.0;

  cplx at(double theta) const;
  /// Hyperbolic length |log tan(theta_end/2) - log tan(theta_start/2)|.
  double length() const;
};

/// For each form of the cycle, the arc from its crossing with |z - n_i| = 1
/// to its crossing with |z| = 1. The arcs tile the closed geodesic.
std::vector<GeodesicSegment> cycle_segments(const FormCycle& cycle);

/// Height of the horoball family {Im z > Y0 |qz - p|^2} avoided in extended mode.
inline constexpr double kHoroballHeight = 1.1;

/// Double mode evaluates j_m on the geodesic itself and needs m sqrt(D) <= 8.
inline constexpr double kDoubleModeBudget = 8.0;

struct CycleIntegral {
  cplx value{0.0, 0.0};
  double error = 0.0;
  std::size_t nodes = 0;
};

using PointFunction = std::function<cplx(cplx)>;

/// int_{C_A} f ds over the arcs of cycle_segments, each anchor moved by
/// anchor_shift along its geodesic. In extended mode f must be holomorphic:
/// every excursion into a cusp horoball is replaced by its boundary arc.
CycleIntegral cycle_integral(const FormCycle& cycle, const PointFunction& f, const QuadratureSpec& spec,
                             double anchor_shift = 0.0);

/// int f ds along the first form's geodesic from s0 - length to s0, where s
/// is arc length measured from the apex; the automorph translates by length.
CycleIntegral single_segment_integral(const FormCycle& cycle, const PointFunction& f, const QuadratureSpec& spec,
                                      double s0 = 0.0);

/// Complex int_{C_A} j_m ds. ModeError in double mode when m sqrt(D) > 8.
CycleIntegral class_cycle_integral_detailed(const FormCycle& cycle, int m, const QuadratureSpec& spec);

/// Real part of the above. For classes closed under z -> -conj(z) the
/// imaginary part must vanish; AccuracyError otherwise.
double class_cycle_integral(const FormCycle& cycle, int m, const QuadratureSpec& spec);

/// True when the reflected cycle [a, -b, c] lies in the same class.
bool reflection_invariant(const FormCycle& cycle);

enum class TraceMethod { direct, series, surface_direct, surface_series };

std::string to_string(TraceMethod m);
TraceMethod parse_trace_method(const std::string& s);

/// Orientation of the winding count; standard makes nu_mass(21, -3) = +1/3.
enum class Orientation { standard, reversed };

struct TraceSettings {
  QuadratureSpec quad{};
  /// Series cutoff X.
  double cutoff = 1e5;
  unsigned workers = 1;
  bool fast = true;
  std::int64_t chunk = 4096;
  Orientation orientation = Orientation::standard;
};

struct TraceReport {
  std::int64_t D = 0;
  std::int64_t d = 1;
  int m = 1;
  TraceMethod method = TraceMethod::direct;
  double value = 0.0;
  double main_term = 0.0;
  double residual = 0.0;
  /// Series cutoff X; zero for quadrature methods.
  double cutoff = 0.0;
  /// Requested absolute tolerance for quadrature methods; zero for series.
  double tolerance = 0.0;
  /// Quadrature error estimate, or the partial-summation tail estimate.
  double error_estimate = 0.0;
  /// Imaginary part discarded from the direct sum.
  double imag_part = 0.0;
  /// Even D, or a cofactor d' that is not fundamental.
  bool outside_hypotheses = false;
};

/// Cycle trace. direct: sum over classes of chi_d(A) times the cycle
/// integral, exactly zero for d < 0. series: the sine-kernel Weyl series
/// to c <= X. main_term = -24 delta_d sigma_1(m) L / (2 pi), L the summed
/// cycle lengths.
TraceReport trace_cycle(std::int64_t D, std::int64_t d, int m, TraceMethod method, const TraceSettings& settings);

/// Signed count of forms equivalent to q whose semicircle passes above z,
/// i.e. 0 < |a| <= sqrt(D)/(2 Im z) and |z + b/(2a)| < sqrt(D)/(2|a|), each
/// weighted by sgn(a). DegeneratePositionError when z lies on one of them;
/// ResourceError when Im z is so small that the enumeration exceeds 10^6 values of a.
int winding_number(const QuadForm& q, cplx z, Orientation orientation = Orientation::standard);

struct MassResult {
  double value = 0.0;
  double error = 0.0;
  /// h(d) h(d') / (omega_d omega_d'), zero for d > 0.
  double exact = 0.0;
};

/// (1/4pi) sum_A chi_d(A) int_F nu_A dmu by a line sweep over F: at height
/// y the x-integral is a sum of interval lengths, and the y-integral is
/// split at every height where an interval endpoint changes branch.
MassResult nu_mass_detailed(std::int64_t D, std::int64_t d, double abs_tol = 1e-10,
                            Orientation orientation = Orientation::standard);

double nu_mass(std::int64_t D, std::int64_t d);

/// Surface trace: surface_direct integrates j_m nu over F by the same sweep
/// with the x-integral done term by term in the q-expansion;
/// surface_series sums (1/pi) T_m f(4 pi m sqrt(D)/c), the sign matching the
/// standard orientation.
/// main_term = -24 sigma_1(m) h(d) h(d') / (omega_d omega_d'). Zero for d > 0.
TraceReport surface_trace(std::int64_t D, std::int64_t d, int m, TraceMethod method, const TraceSettings& settings);

struct ScanSpec {
  std::int64_t D_min = 5;
  std::int64_t D_max = 500;
  bool odd_only = true;
  bool fundamental_only = true;
  /// Fixed d; rows with D not admissible for it are recorded as errors.
  std::int64_t d = 1;
  int m = 1;
  TraceMethod method = TraceMethod::series;
  TraceSettings settings{};
};

struct ScanRow {
  std::int64_t D = 0;
  TraceReport report{};
  double residual_over_main = 0.0;
  double residual_over_power = 0.0;
  /// Empty on success.
  std::string error;
};

/// Discriminants of the scan range in increasing order.
std::vector<std::int64_t> scan_discriminants(const ScanSpec& spec);

/// One row per D, in increasing D, delivered as soon as computed.
void asymptotic_scan(const ScanSpec& spec, const std::function<void(const ScanRow&)>& sink);

std::vector<ScanRow> asymptotic_scan(const ScanSpec& spec);

/// Runs f(i) for i in [0, n) on up to `workers` threads; exceptions are
/// rethrown in index order after all workers finish.
void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& f);

}  // namespace qtrace
