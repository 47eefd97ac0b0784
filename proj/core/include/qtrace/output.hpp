#pragma once

// CSV and JSON emitters. Numbers carry 15 significant digits; CSV files
// open with '#' provenance lines, JSON documents with a "provenance" object.

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "qtrace/geodesics.hpp"
#include "qtrace/spectral.hpp"

namespace qtrace {

/// printf "%.15g".
std::string format_number(double x);

/// x rounded to 15 significant digits, so shortest-repr JSON prints at most 15.
double round15(double x);

struct Provenance {
  std::vector<std::pair<std::string, std::string>> entries;

  Provenance& add(const std::string& key, const std::string& value);
  Provenance& add(const std::string& key, double value);
};

/// version and schema entries first.
Provenance make_provenance(const std::string& command, const std::string& schema);

void write_csv_provenance(std::ostream& os, const Provenance& p);

inline constexpr const char* kTraceSchema = "qtrace-trace-v1";
inline constexpr const char* kScanSchema = "qtrace-scan-v1";

void write_trace_csv_header(std::ostream& os);
void write_trace_csv_row(std::ostream& os, const TraceReport& r);
std::string trace_report_json(const TraceReport& r, const Provenance& p);

/// Trace columns plus residual_over_main, residual_over_power, error.
void write_scan_csv_header(std::ostream& os);
void write_scan_csv_row(std::ostream& os, const ScanRow& row);

std::string phi_plus_report_json(const PhiPlusReport& r, const Provenance& p);

}  // namespace qtrace
