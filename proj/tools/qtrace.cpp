// qtrace command-line tool. Each subcommand validates its flags, delegates
// to the library and writes CSV or JSON. Exit codes: 0 success, 1
// computation error or failed verification, 2 invalid request.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <string>

#include "qtrace/errors.hpp"
#include "qtrace/geodesics.hpp"
#include "qtrace/kloosterman.hpp"
#include "qtrace/modforms.hpp"
#include "qtrace/output.hpp"
#include "qtrace/spectral.hpp"
#include "suites.hpp"

using namespace qtrace;
using ojson = nlohmann::ordered_json;

namespace {

struct Common {
  std::string emit;
  std::string output;
  unsigned workers = 1;
  std::string cache_dir;
};

// Owns the output file when --output is given; stdout otherwise.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (path.empty() || path == "-") return;
    file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
    if (!*file_) throw ResourceError("cannot open output file " + path);
  }
  std::ostream& os() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

ojson provenance_json(const Provenance& p) {
  ojson j = ojson::object();
  for (const auto& [k, v] : p.entries) j[k] = v;
  return j;
}

ojson num(double x) {
  if (!std::isfinite(x)) return nullptr;
  return round15(x);
}

void add_common(CLI::App* sub, Common& c, const std::string& default_emit) {
  c.emit = default_emit;
  sub->add_option("--emit", c.emit, "Output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  sub->add_option("--output,-o", c.output, "Output path; stdout when absent");
  sub->add_option("--workers", c.workers, "Worker threads; results do not depend on it")
      ->check(CLI::Range(1u, 256u))
      ->capture_default_str();
  sub->add_option("--cache-dir", c.cache_dir,
                  "q-expansion cache; falls back to $QTRACE_CACHE_DIR, then $XDG_CACHE_HOME/qtrace, "
                  "then $HOME/.cache/qtrace");
}

// Loads or writes the cached j coefficients so later evaluations reuse them.
void warm_cache(const Common& c, int m) {
  const int N = std::min(kJSeriesCap, std::max(64, m * jm_truncation(m)));
  j_coefficients(N, resolve_cache_dir(c.cache_dir));
}

// ---- kloosterman / weyl -------------------------------------------------

struct SumArgs {
  Common common;
  double k = 0.5;
  std::int64_t m = 1;
  std::int64_t n = 1;
  std::int64_t D = 5;
  std::int64_t d = 1;
  double cmax = 100;
  std::string weight_mode;
  bool naive = false;
};

WeightMode parse_weight_mode(const std::string& s) {
  return s == "inv_sqrt_c" ? WeightMode::inv_sqrt_c : WeightMode::inv_c;
}

int emit_partial_sums(const SumArgs& a, const SumFamily& family, Provenance p) {
  StreamOptions opts;
  opts.mode = parse_weight_mode(a.weight_mode);
  opts.fast = !a.naive;
  opts.workers = a.common.workers;
  p.add("cmax", std::floor(a.cmax)).add("weight_mode", a.weight_mode).add("path", a.naive ? "naive" : "fast");
  Sink sink(a.common.output);
  auto& os = sink.os();
  if (a.common.emit == "csv") {
    write_csv_provenance(os, p);
    os << "c,term,cumulative\n";
    partial_sum_stream(family, a.cmax, opts, [&](const PartialSumRecord& r) {
      os << r.c << ',' << format_number(r.sum) << ',' << format_number(r.value) << '\n';
    });
    os.flush();
    return 0;
  }
  ojson j;
  j["provenance"] = provenance_json(p);
  j["rows"] = ojson::array();
  partial_sum_stream(family, a.cmax, opts, [&](const PartialSumRecord& r) {
    j["rows"].push_back({{"c", r.c}, {"term", num(r.sum)}, {"cumulative", num(r.value)}});
  });
  os << j.dump(2) << '\n';
  return 0;
}

int run_kloosterman(const SumArgs& a) {
  const Weight wt = Weight::from_k(a.k);
  KloostermanQuery::make(wt, a.m, a.n, 4);
  Provenance p = make_provenance("kloosterman", "qtrace-partial-sum-v1");
  p.add("k", a.k).add("m", std::to_string(a.m)).add("n", std::to_string(a.n));
  return emit_partial_sums(a, SumFamily::kloosterman(wt, a.m, a.n), p);
}

int run_weyl(const SumArgs& a) {
  if (a.m < 1) throw DomainError("weyl: m must be positive");
  const auto spec = GenusCharacterSpec::make(a.D, a.d);
  Provenance p = make_provenance("weyl", "qtrace-partial-sum-v1");
  p.add("D", std::to_string(a.D)).add("d", std::to_string(a.d)).add("m", std::to_string(a.m));
  return emit_partial_sums(a, SumFamily::weyl(a.m, spec), p);
}

// ---- trace / surface / scan ---------------------------------------------

struct TraceArgs {
  Common common;
  std::int64_t D = 5;
  std::int64_t d = 1;
  int m = 1;
  std::string method;
  double cutoff = 1e5;
  double tol = 1e-8;
  std::string scheme = "adaptive_gauss";
  std::string precision = "double";
  std::size_t max_nodes = 4'000'000;
  std::string orientation = "standard";
  bool naive = false;
  bool mass = false;
  // scan only
  std::int64_t D_min = 5;
  std::int64_t D_max = 500;
  bool all_parities = false;
  bool non_fundamental = false;
};

void add_trace_flags(CLI::App* sub, TraceArgs& a) {
  sub->add_option("--d", a.d, "Fundamental discriminant dividing D")->capture_default_str();
  sub->add_option("--m", a.m, "Index of j_m")->check(CLI::PositiveNumber)->capture_default_str();
  sub->add_option("--cutoff,-X", a.cutoff, "Series cutoff X")->capture_default_str();
  sub->add_option("--tol", a.tol, "Absolute quadrature tolerance")->capture_default_str();
  sub->add_option("--scheme", a.scheme)->check(CLI::IsMember({"adaptive_gauss", "composite_gauss"}))->capture_default_str();
  sub->add_option("--precision", a.precision)->check(CLI::IsMember({"double", "extended"}))->capture_default_str();
  sub->add_option("--max-nodes", a.max_nodes, "Quadrature node budget")->capture_default_str();
  sub->add_option("--orientation", a.orientation, "Winding-number orientation")
      ->check(CLI::IsMember({"standard", "reversed"}))
      ->capture_default_str();
  sub->add_flag("--naive", a.naive, "Evaluate series terms by the defining sums");
}

TraceSettings settings_of(const TraceArgs& a) {
  TraceSettings s;
  s.quad.scheme = parse_scheme(a.scheme);
  s.quad.abs_tol = a.tol;
  s.quad.max_nodes = a.max_nodes;
  s.quad.precision_mode = parse_precision_mode(a.precision);
  s.quad.validate();
  if (!(a.cutoff >= 4.0)) throw DomainError("cutoff must be at least 4");
  s.cutoff = a.cutoff;
  s.workers = a.common.workers;
  s.fast = !a.naive;
  s.orientation = a.orientation == "reversed" ? Orientation::reversed : Orientation::standard;
  return s;
}

void add_settings(Provenance& p, const TraceArgs& a, TraceMethod method) {
  const bool series = method == TraceMethod::series || method == TraceMethod::surface_series;
  if (series) p.add("cutoff", std::floor(a.cutoff)).add("path", a.naive ? "naive" : "fast");
  else p.add("abs_tol", a.tol).add("scheme", a.scheme).add("precision", a.precision).add("max_nodes", std::to_string(a.max_nodes));
  if (method == TraceMethod::surface_direct || method == TraceMethod::surface_series) p.add("orientation", a.orientation);
}

void emit_report(const TraceArgs& a, const TraceReport& r, Provenance p) {
  Sink sink(a.common.output);
  if (a.common.emit == "json") {
    sink.os() << trace_report_json(r, p);
    return;
  }
  write_csv_provenance(sink.os(), p);
  write_trace_csv_header(sink.os());
  write_trace_csv_row(sink.os(), r);
}

int run_trace(const TraceArgs& a) {
  const TraceMethod method = parse_trace_method(a.method);
  if (method != TraceMethod::direct && method != TraceMethod::series) {
    throw DomainError("trace: method must be direct or series; use the surface subcommand");
  }
  const TraceSettings s = settings_of(a);
  if (method == TraceMethod::direct) warm_cache(a.common, a.m);
  Provenance p = make_provenance("trace", kTraceSchema);
  p.add("D", std::to_string(a.D)).add("d", std::to_string(a.d)).add("m", std::to_string(a.m)).add("method", a.method);
  add_settings(p, a, method);
  emit_report(a, trace_cycle(a.D, a.d, a.m, method, s), p);
  return 0;
}

TraceMethod surface_method(const std::string& s) {
  if (s == "direct" || s == "surface_direct") return TraceMethod::surface_direct;
  if (s == "series" || s == "surface_series") return TraceMethod::surface_series;
  throw DomainError("surface: unknown method '" + s + "'");
}

int run_surface(const TraceArgs& a) {
  const TraceSettings s = settings_of(a);
  if (a.mass) {
    const MassResult r = nu_mass_detailed(a.D, a.d, 1e-10, s.orientation);
    Provenance p = make_provenance("surface --mass", "qtrace-mass-v1");
    p.add("D", std::to_string(a.D)).add("d", std::to_string(a.d)).add("orientation", a.orientation);
    Sink sink(a.common.output);
    if (a.common.emit == "json") {
      ojson j;
      j["provenance"] = provenance_json(p);
      j["D"] = a.D;
      j["d"] = a.d;
      j["value"] = num(r.value);
      j["exact"] = num(r.exact);
      j["error"] = num(r.error);
      sink.os() << j.dump(2) << '\n';
    } else {
      write_csv_provenance(sink.os(), p);
      sink.os() << "D,d,value,exact,error\n"
                << a.D << ',' << a.d << ',' << format_number(r.value) << ',' << format_number(r.exact) << ','
                << format_number(r.error) << '\n';
    }
    return 0;
  }
  const TraceMethod method = surface_method(a.method);
  if (method == TraceMethod::surface_direct) warm_cache(a.common, a.m);
  Provenance p = make_provenance("surface", kTraceSchema);
  p.add("D", std::to_string(a.D)).add("d", std::to_string(a.d)).add("m", std::to_string(a.m)).add("method", to_string(method));
  add_settings(p, a, method);
  emit_report(a, surface_trace(a.D, a.d, a.m, method, s), p);
  return 0;
}

int run_scan(const TraceArgs& a) {
  ScanSpec spec;
  spec.D_min = a.D_min;
  spec.D_max = a.D_max;
  spec.odd_only = !a.all_parities;
  spec.fundamental_only = !a.non_fundamental;
  spec.d = a.d;
  spec.m = a.m;
  spec.method = parse_trace_method(a.method);
  spec.settings = settings_of(a);
  if (spec.D_min > spec.D_max) throw DomainError("scan: D-min exceeds D-max");
  if (spec.D_max - spec.D_min > 1'000'000) throw ResourceError("scan: range longer than 10^6");
  if (spec.method == TraceMethod::direct || spec.method == TraceMethod::surface_direct) warm_cache(a.common, a.m);

  Provenance p = make_provenance("scan", kScanSchema);
  p.add("D_min", std::to_string(a.D_min)).add("D_max", std::to_string(a.D_max));
  p.add("odd_only", spec.odd_only ? "true" : "false").add("fundamental_only", spec.fundamental_only ? "true" : "false");
  p.add("d", std::to_string(a.d)).add("m", std::to_string(a.m)).add("method", to_string(spec.method));
  add_settings(p, a, spec.method);

  Sink sink(a.common.output);
  auto& os = sink.os();
  if (a.common.emit == "csv") {
    write_csv_provenance(os, p);
    write_scan_csv_header(os);
    os.flush();
    asymptotic_scan(spec, [&](const ScanRow& row) {
      write_scan_csv_row(os, row);
      os.flush();
    });
    return 0;
  }
  ojson j;
  j["provenance"] = provenance_json(p);
  j["rows"] = ojson::array();
  asymptotic_scan(spec, [&](const ScanRow& row) {
    ojson r;
    r["D"] = row.D;
    if (!row.error.empty()) {
      r["error"] = row.error;
    } else {
      r["value"] = num(row.report.value);
      r["main_term"] = num(row.report.main_term);
      r["residual"] = num(row.report.residual);
      r["error_estimate"] = num(row.report.error_estimate);
      r["residual_over_main"] = num(row.residual_over_main);
      r["residual_over_power"] = num(row.residual_over_power);
      r["outside_hypotheses"] = row.report.outside_hypotheses;
    }
    j["rows"].push_back(r);
  });
  os << j.dump(2) << '\n';
  return 0;
}

// ---- cm -----------------------------------------------------------------

struct CmArgs {
  Common common;
  std::int64_t d = 0;
  std::int64_t d_min = 0;
  std::int64_t d_max = 0;
  int m = 1;
  bool fundamental = false;
};

int run_cm(const CmArgs& a) {
  std::int64_t lo = a.d, hi = a.d;
  if (a.d == 0) {
    lo = a.d_min;
    hi = a.d_max;
  }
  if (hi >= 0 || lo > hi) throw DomainError("cm: need d < 0, or d-min <= d-max < 0");
  if (hi - lo > 100'000) throw ResourceError("cm: range longer than 10^5");
  warm_cache(a.common, a.m);
  Provenance p = make_provenance("cm", "qtrace-cm-v1");
  p.add("d_min", std::to_string(lo)).add("d_max", std::to_string(hi)).add("m", std::to_string(a.m));
  p.add("fundamental_only", a.fundamental ? "true" : "false");

  Sink sink(a.common.output);
  auto& os = sink.os();
  const bool csv = a.common.emit == "csv";
  ojson rows = ojson::array();
  if (csv) {
    write_csv_provenance(os, p);
    os << "d,m,value,nearest,distance,class_number,omega,deviation\n";
  }
  for (std::int64_t d = lo; d <= hi; ++d) {
    if (!is_discriminant(d) || (a.fundamental && !is_fundamental(d))) continue;
    const CmTrace t = cm_trace_detailed(d, a.m);
    const bool dev = a.m == 1 && is_fundamental(d);
    const double deviation = dev ? cm_trace_deviation(d) : std::nan("");
    if (csv) {
      os << d << ',' << a.m << ',' << format_number(t.value) << ',' << t.nearest.get_str() << ','
         << format_number(t.distance) << ',' << t.class_number << ',' << t.omega << ','
         << (dev ? format_number(deviation) : "") << '\n';
    } else {
      rows.push_back({{"d", d},
                      {"m", a.m},
                      {"value", num(t.value)},
                      {"nearest", t.nearest.get_str()},
                      {"distance", num(t.distance)},
                      {"class_number", t.class_number},
                      {"omega", t.omega},
                      {"deviation", num(deviation)}});
    }
  }
  if (!csv) {
    ojson j;
    j["provenance"] = provenance_json(p);
    j["rows"] = rows;
    os << j.dump(2) << '\n';
  }
  return 0;
}

// ---- phiplus / verify ---------------------------------------------------

struct PhiArgs {
  Common common;
  std::int64_t n = 5;
  double s_re = 1.25;
  double s_im = 0.0;
  double X = 1e5;
};

int run_phiplus(const PhiArgs& a) {
  const PhiPlusReport r = phi_plus_verify(a.n, {a.s_re, a.s_im}, a.X, a.common.workers);
  Provenance p = make_provenance("phiplus", "qtrace-phiplus-v1");
  p.add("n", std::to_string(a.n)).add("s_re", a.s_re).add("s_im", a.s_im).add("X", std::floor(a.X));
  Sink sink(a.common.output);
  if (a.common.emit == "json") {
    sink.os() << phi_plus_report_json(r, p);
  } else {
    write_csv_provenance(sink.os(), p);
    sink.os() << "n,s_re,s_im,X,series_re,series_im,closed_re,closed_im,difference,tail_bound,pass\n"
              << a.n << ',' << format_number(a.s_re) << ',' << format_number(a.s_im) << ','
              << format_number(std::floor(a.X)) << ',' << format_number(r.series.value.real()) << ','
              << format_number(r.series.value.imag()) << ',' << format_number(r.closed.real()) << ','
              << format_number(r.closed.imag()) << ',' << format_number(r.difference) << ','
              << format_number(r.series.tail_bound) << ',' << (r.pass ? "true" : "false") << '\n';
  }
  return r.pass ? 0 : 1;
}

int run_verify(const Common& c, const std::string& suite) {
  const auto results = tools::run_suites(suite, c.workers);
  Provenance p = make_provenance("verify", "qtrace-verify-v1");
  p.add("suite", suite);
  Sink sink(c.output);
  bool ok = true;
  if (c.emit == "json") {
    ojson j;
    j["provenance"] = provenance_json(p);
    j["suites"] = ojson::array();
    for (const auto& r : results) {
      j["suites"].push_back({{"suite", r.name},
                             {"checks", r.checks},
                             {"passed", r.checks - r.failures},
                             {"failed", r.failures},
                             {"max_error", num(r.max_error)},
                             {"pass", r.passed()}});
      ok = ok && r.passed();
    }
    sink.os() << j.dump(2) << '\n';
  } else {
    write_csv_provenance(sink.os(), p);
    sink.os() << "suite,checks,passed,failed,max_error,pass\n";
    for (const auto& r : results) {
      sink.os() << r.name << ',' << r.checks << ',' << r.checks - r.failures << ',' << r.failures << ','
                << format_number(r.max_error) << ',' << (r.passed() ? "true" : "false") << '\n';
      ok = ok && r.passed();
    }
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qtrace: Kloosterman sums, Weyl sums and traces of j_m"};
  app.set_version_flag("--version", QTRACE_VERSION);
  app.require_subcommand(1);
  std::function<int()> action;

  SumArgs kl;
  auto* k = app.add_subcommand("kloosterman", "Partial sums of S_k^+(m, n, c) over 4 | c <= cmax");
  add_common(k, kl.common, "csv");
  kl.weight_mode = "inv_c";
  k->add_option("--k", kl.k, "Weight, 0.5 or -0.5")->capture_default_str();
  k->add_option("--m", kl.m)->required();
  k->add_option("--n", kl.n)->required();
  k->add_option("--cmax", kl.cmax, "Largest modulus")->capture_default_str();
  k->add_option("--weight-mode", kl.weight_mode, "Weight of each term in the cumulative sum")
      ->check(CLI::IsMember({"inv_c", "inv_sqrt_c"}))
      ->capture_default_str();
  k->add_flag("--naive", kl.naive, "Evaluate by the defining sum");
  k->callback([&] { action = [&] { return run_kloosterman(kl); }; });

  SumArgs wy;
  auto* w = app.add_subcommand("weyl", "Partial sums of T_m(c) over 4 | c <= cmax");
  add_common(w, wy.common, "csv");
  wy.weight_mode = "inv_sqrt_c";
  w->add_option("--D", wy.D)->required();
  w->add_option("--d", wy.d)->capture_default_str();
  w->add_option("--m", wy.m)->capture_default_str();
  w->add_option("--cmax", wy.cmax)->capture_default_str();
  w->add_option("--weight-mode", wy.weight_mode)->check(CLI::IsMember({"inv_c", "inv_sqrt_c"}))->capture_default_str();
  w->add_flag("--naive", wy.naive, "Find square roots by scanning residues");
  w->callback([&] { action = [&] { return run_weyl(wy); }; });

  TraceArgs tr;
  auto* t = app.add_subcommand("trace", "Cycle trace of j_m over the classes of discriminant D");
  add_common(t, tr.common, "json");
  tr.method = "direct";
  t->add_option("--D", tr.D)->required();
  t->add_option("--method", tr.method)->check(CLI::IsMember({"direct", "series"}))->capture_default_str();
  add_trace_flags(t, tr);
  t->callback([&] { action = [&] { return run_trace(tr); }; });

  TraceArgs sf;
  auto* s = app.add_subcommand("surface", "Surface trace of j_m, or the winding-number mass with --mass");
  add_common(s, sf.common, "json");
  sf.method = "direct";
  sf.d = -3;
  s->add_option("--D", sf.D)->required();
  s->add_option("--method", sf.method)
      ->check(CLI::IsMember({"direct", "series", "surface_direct", "surface_series"}))
      ->capture_default_str();
  s->add_flag("--mass", sf.mass, "Report (1/4pi) sum chi int nu dmu instead");
  add_trace_flags(s, sf);
  s->callback([&] { action = [&] { return run_surface(sf); }; });

  CmArgs cm;
  auto* c = app.add_subcommand("cm", "Traces of singular moduli Tr_d(j_m)");
  add_common(c, cm.common, "csv");
  c->add_option("--d", cm.d, "Single negative discriminant");
  c->add_option("--d-min", cm.d_min);
  c->add_option("--d-max", cm.d_max);
  c->add_option("--m", cm.m)->check(CLI::PositiveNumber)->capture_default_str();
  c->add_flag("--fundamental", cm.fundamental, "Skip non-fundamental discriminants in a range");
  c->callback([&] { action = [&] { return run_cm(cm); }; });

  TraceArgs sc;
  auto* n = app.add_subcommand("scan", "Trace residuals over a range of D; CSV rows stream as computed");
  add_common(n, sc.common, "csv");
  sc.method = "series";
  n->add_option("--D-min", sc.D_min)->capture_default_str();
  n->add_option("--D-max", sc.D_max)->capture_default_str();
  n->add_option("--method", sc.method)
      ->check(CLI::IsMember({"direct", "series", "surface_direct", "surface_series"}))
      ->capture_default_str();
  n->add_flag("--all-parities", sc.all_parities, "Include even D");
  n->add_flag("--non-fundamental", sc.non_fundamental, "Include non-fundamental D");
  add_trace_flags(n, sc);
  n->callback([&] { action = [&] { return run_scan(sc); }; });

  Common vc;
  std::string suite = "all";
  auto* v = app.add_subcommand("verify", "Run verification suites; exit 1 when any check fails");
  add_common(v, vc, "csv");
  v->add_option("--suite", suite)->check(CLI::IsMember(tools::suite_names()))->capture_default_str();
  v->callback([&] { action = [&] { return run_verify(vc, suite); }; });

  PhiArgs ph;
  auto* f = app.add_subcommand("phiplus", "phi^+(n, s) by its series against the closed form");
  add_common(f, ph.common, "json");
  f->add_option("--n", ph.n)->required();
  f->add_option("--s", ph.s_re, "Real part of s")->capture_default_str();
  f->add_option("--s-imag", ph.s_im, "Imaginary part of s")->capture_default_str();
  f->add_option("--X", ph.X, "Truncation")->capture_default_str();
  f->callback([&] { action = [&] { return run_phiplus(ph); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    return action();
  } catch (const PreconditionError& e) {
    std::cerr << "qtrace: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "qtrace: " << e.what() << '\n';
    return 1;
  }
}
