#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qtrace/output.hpp"

using namespace qtrace;

TEST(Numbers, FifteenSignificantDigits) {
  EXPECT_EQ(format_number(-2.0 * std::sqrt(2.0)), "-2.82842712474619");
  EXPECT_EQ(format_number(196884.0), "196884");
  EXPECT_EQ(format_number(1e-20 / 3.0), "3.33333333333333e-21");
  EXPECT_EQ(round15(0.1 + 0.2), 0.3);
  EXPECT_TRUE(std::isnan(round15(std::nan(""))));
}

TEST(Csv, TraceHeaderAndRow) {
  std::ostringstream os;
  write_csv_provenance(os, make_provenance("trace", kTraceSchema).add("cutoff", 1e5));
  write_trace_csv_header(os);
  TraceReport r;
  r.D = 5;
  r.value = -11.5417542848977;
  r.main_term = -7.35240835;
  r.residual = r.value - r.main_term;
  r.tolerance = 1e-8;
  write_trace_csv_row(os, r);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line.rfind("# qtrace_version: ", 0), 0u);
  std::getline(is, line);
  EXPECT_EQ(line, std::string("# schema: ") + kTraceSchema);
  std::getline(is, line);
  EXPECT_EQ(line, "# command: trace");
  std::getline(is, line);
  EXPECT_EQ(line, "# cutoff: 100000");
  std::getline(is, line);
  EXPECT_EQ(line, "D,d,m,method,value,main_term,residual,cutoff_or_tol");
  std::getline(is, line);
  EXPECT_EQ(line.rfind("5,1,1,direct,-11.5417542848977,-7.35240835,", 0), 0u) << line;
  EXPECT_EQ(line.substr(line.rfind(',') + 1), "1e-08");
}

TEST(Csv, ScanErrorRowsAreEscaped) {
  std::ostringstream os;
  write_scan_csv_header(os);
  ScanRow row;
  row.D = 13;
  row.error = "d must divide D, got\nnothing";
  write_scan_csv_row(os, row);
  std::istringstream is(os.str());
  std::string header, line;
  std::getline(is, header);
  std::getline(is, line);
  EXPECT_EQ(header, "D,d,m,method,value,main_term,residual,cutoff_or_tol,residual_over_main,residual_over_power,error");
  EXPECT_EQ(line, "13,,,,,,,,,,d must divide D; got;nothing");
  EXPECT_EQ(std::count(line.begin(), line.end(), ','), std::count(header.begin(), header.end(), ','));
}

TEST(Json, TraceReportParses) {
  TraceReport r;
  r.D = 21;
  r.d = -3;
  r.method = TraceMethod::series;
  r.value = 1.0 / 3.0;
  r.cutoff = 1e5;
  r.error_estimate = std::nan("");
  const auto j = nlohmann::json::parse(trace_report_json(r, make_provenance("trace", kTraceSchema)));
  EXPECT_EQ(j["provenance"]["schema"], kTraceSchema);
  EXPECT_EQ(j["D"], 21);
  EXPECT_EQ(j["d"], -3);
  EXPECT_EQ(j["method"], "series");
  EXPECT_EQ(j["value"].get<double>(), 0.333333333333333);
  EXPECT_EQ(j["cutoff_or_tol"].get<double>(), 1e5);
  EXPECT_TRUE(j["error_estimate"].is_null());
}

TEST(Json, PhiPlusReportParses) {
  PhiPlusReport r;
  r.query = PhiPlusQuery::make(45, 1.25, 1e3);
  r.series.value = {0.5, 0.0};
  r.series.tail_bound = 0.01;
  r.closed = {0.505, 0.0};
  r.difference = 0.005;
  r.pass = true;
  const auto j = nlohmann::json::parse(phi_plus_report_json(r, make_provenance("phiplus", "qtrace-phiplus-v1")));
  EXPECT_EQ(j["query"]["n"], 45);
  EXPECT_EQ(j["query"]["d"], 5);
  EXPECT_EQ(j["query"]["w"], 3);
  EXPECT_EQ(j["tail_bound"].get<double>(), 0.01);
  EXPECT_TRUE(j["pass"].get<bool>());
}
