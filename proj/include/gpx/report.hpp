#pragma once

// CSV tables for mc and validate runs. The first line is a comment carrying
// the timestamp and the resolved config; the body is a pure function of the
// results.

#include <chrono>
#include <cstdio>
#include <ctime>
#include <ostream>
#include <string>
#include <vector>

#include "gpx/json_io.hpp"
#include "gpx/monte_carlo.hpp"

namespace gpx {

inline const char* csv_header() { return "u,p_hat,ci_low,ci_high,asymptotic,ratio,n_paths,grid_points,seed"; }

inline std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// One CSV row; asymptotic and ratio are left empty when absent.
inline std::string csv_row(const MCEstimate& e, const double* asymptotic = nullptr, const double* ratio = nullptr) {
  std::string s = format_g17(e.u) + "," + format_g17(e.p_hat) + "," + format_g17(e.ci_low) + "," +
                  format_g17(e.ci_high) + ",";
  if (asymptotic) s += format_g17(*asymptotic);
  s += ",";
  if (ratio) s += format_g17(*ratio);
  s += "," + std::to_string(e.n_paths) + "," + std::to_string(e.grid_points) + "," + std::to_string(e.seed);
  return s;
}

inline void write_csv_preamble(std::ostream& os, const json& config, const std::string& timestamp) {
  os << "# generated " << timestamp << "; config=" << config.dump() << "\n" << csv_header() << "\n";
}

inline void write_csv(std::ostream& os, const std::vector<MCEstimate>& rows, const json& config,
                      const std::string& timestamp = utc_timestamp()) {
  write_csv_preamble(os, config, timestamp);
  for (const auto& r : rows) os << csv_row(r) << "\n";
}

inline void write_csv(std::ostream& os, const ValidationTable& table, const json& config,
                      const std::string& timestamp = utc_timestamp()) {
  write_csv_preamble(os, config, timestamp);
  for (const auto& r : table.rows) os << csv_row(r.mc, &r.asymptotic.value, &r.ratio) << "\n";
}

}  // namespace gpx
