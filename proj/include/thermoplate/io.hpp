#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "thermoplate/dynamics.hpp"
#include "thermoplate/state.hpp"

namespace thermoplate {

/// Decimal, 17 significant digits, '.' separator, independent of the locale.
std::string csv_number(double value);

inline constexpr const char* kTrajectoryColumns[] = {
    "time", "y_norm", "E", "kinetic", "plate", "thermal", "potential", "phi", "psi", "L_functional"};

void write_trajectory_csv(std::ostream& out, const TrajectoryRecord& record);
/// {"columns": [...], "rows": [[...], ...]} with the CSV column order.
std::string trajectory_json(const TrajectoryRecord& record);

// Snapshot layout, little-endian throughout:
//   "TPLT", u32 version, u32 d, f64 length, u32 n, u32 member count, f64 time,
//   then per member the u, v, theta coefficients as f64 in row-major mode order.
inline constexpr std::uint32_t kSnapshotVersion = 1;

struct Snapshot {
  int dimension = 0;
  double length = 0;
  std::size_t modes = 0;
  double timestamp = 0;
  std::vector<State> members;
};

std::string encode_snapshot(const std::vector<State>& members, double timestamp);
Snapshot decode_snapshot(const std::string& bytes);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

/// Static SVG line chart of one series.
std::string svg_line_chart(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::vector<double>& xs,
                           const std::vector<double>& ys, bool log_y = false);

}  // namespace thermoplate
