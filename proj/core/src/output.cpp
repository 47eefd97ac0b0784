#include "qtrace/output.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ostream>

namespace qtrace {

std::string format_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", x);
  return buf;
}

double round15(double x) {
  if (!std::isfinite(x)) return x;
  return std::strtod(format_number(x).c_str(), nullptr);
}

Provenance& Provenance::add(const std::string& key, const std::string& value) {
  entries.emplace_back(key, value);
  return *this;
}

Provenance& Provenance::add(const std::string& key, double value) {
  return add(key, format_number(value));
}

Provenance make_provenance(const std::string& command, const std::string& schema) {
  Provenance p;
  p.add("qtrace_version", QTRACE_VERSION).add("schema", schema).add("command", command);
  return p;
}

void write_csv_provenance(std::ostream& os, const Provenance& p) {
  for (const auto& [k, v] : p.entries) os << "# " << k << ": " << v << '\n';
}

namespace {

double cutoff_or_tol(const TraceReport& r) {
  return r.cutoff > 0.0 ? r.cutoff : r.tolerance;
}

void trace_fields(std::ostream& os, const TraceReport& r) {
  os << r.D << ',' << r.d << ',' << r.m << ',' << to_string(r.method) << ',' << format_number(r.value) << ','
     << format_number(r.main_term) << ',' << format_number(r.residual) << ',' << format_number(cutoff_or_tol(r));
}

nlohmann::ordered_json provenance_json(const Provenance& p) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [k, v] : p.entries) j[k] = v;
  return j;
}

// JSON has no NaN; absent values become null.
nlohmann::ordered_json num(double x) {
  if (!std::isfinite(x)) return nullptr;
  return round15(x);
}

}  // namespace

void write_trace_csv_header(std::ostream& os) {
  os << "D,d,m,method,value,main_term,residual,cutoff_or_tol\n";
}

void write_trace_csv_row(std::ostream& os, const TraceReport& r) {
  trace_fields(os, r);
  os << '\n';
}

std::string trace_report_json(const TraceReport& r, const Provenance& p) {
  nlohmann::ordered_json j;
  j["provenance"] = provenance_json(p);
  j["D"] = r.D;
  j["d"] = r.d;
  j["m"] = r.m;
  j["method"] = to_string(r.method);
  j["value"] = num(r.value);
  j["main_term"] = num(r.main_term);
  j["residual"] = num(r.residual);
  j["cutoff_or_tol"] = num(cutoff_or_tol(r));
  j["cutoff"] = num(r.cutoff);
  j["tolerance"] = num(r.tolerance);
  j["error_estimate"] = num(r.error_estimate);
  j["imag_part"] = num(r.imag_part);
  j["outside_hypotheses"] = r.outside_hypotheses;
  return j.dump(2) + "\n";
}

void write_scan_csv_header(std::ostream& os) {
  os << "D,d,m,method,value,main_term,residual,cutoff_or_tol,residual_over_main,residual_over_power,error\n";
}

void write_scan_csv_row(std::ostream& os, const ScanRow& row) {
  if (!row.error.empty()) {
    std::string msg = row.error;
    for (char& ch : msg) {
      if (ch == ',' || ch == '\n') ch = ';';
    }
    os << row.D << ",,,,,,,,,," << msg << '\n';
    return;
  }
  trace_fields(os, row.report);
  os << ',' << format_number(row.residual_over_main) << ',' << format_number(row.residual_over_power) << ",\n";
}

std::string phi_plus_report_json(const PhiPlusReport& r, const Provenance& p) {
  nlohmann::ordered_json j;
  j["provenance"] = provenance_json(p);
  j["query"] = {{"n", r.query.n},
                {"s", {num(r.query.s.real()), num(r.query.s.imag())}},
                {"X", num(r.query.X)},
                {"d", r.query.decomposition.d},
                {"w", r.query.decomposition.w}};
  j["series"] = {num(r.series.value.real()), num(r.series.value.imag())};
  j["closed"] = {num(r.closed.real()), num(r.closed.imag())};
  j["difference"] = num(r.difference);
  j["tail_bound"] = num(r.series.tail_bound);
  j["terms"] = r.series.terms;
  j["pass"] = r.pass;
  return j.dump(2) + "\n";
}

}  // namespace qtrace
