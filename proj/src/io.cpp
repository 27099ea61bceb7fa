#include "thermoplate/io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include <json.hpp>

#include "thermoplate/error.hpp"

namespace thermoplate {

std::string csv_number(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
  return std::string(buf, ptr);
}

namespace {

std::vector<double> row_of(const TrajectoryRecord& r, std::size_t i) {
  const EnergyReport& e = r.energies[i];
  return {r.times[i], r.y_norms[i], e.E, e.kinetic, e.plate, e.thermal, e.potential, e.phi, e.psi, e.L};
}

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <class T>
void put(std::string& out, T value) {
  auto raw = std::bit_cast<std::array<char, sizeof(T)>>(value);
  if constexpr (std::endian::native == std::endian::big) std::reverse(raw.begin(), raw.end());
  out.append(raw.data(), raw.size());
}

template <class T>
T get(const std::string& in, std::size_t& pos) {
  if (pos + sizeof(T) > in.size()) {
    throw Error(ErrorKind::io, "snapshot is truncated");
  }
  std::array<char, sizeof(T)> raw;
  std::memcpy(raw.data(), in.data() + pos, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(raw.begin(), raw.end());
  pos += sizeof(T);
  return std::bit_cast<T>(raw);
}

}  // namespace

void write_trajectory_csv(std::ostream& out, const TrajectoryRecord& record) {
  for (std::size_t c = 0; c < std::size(kTrajectoryColumns); ++c) {
    out << (c ? "," : "") << kTrajectoryColumns[c];
  }
  out << '\n';
  for (std::size_t i = 0; i < record.times.size(); ++i) {
    const auto row = row_of(record, i);
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << csv_number(row[c]);
    out << '\n';
  }
}

std::string trajectory_json(const TrajectoryRecord& record) {
  nlohmann::json doc;
  doc["columns"] = std::vector<std::string>(std::begin(kTrajectoryColumns), std::end(kTrajectoryColumns));
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < record.times.size(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (double x : row_of(record, i)) {
      if (std::isfinite(x)) row.push_back(x);
      else row.push_back(nullptr);
    }
    rows.push_back(std::move(row));
  }
  doc["rows"] = std::move(rows);
  return doc.dump(1) + "\n";
}

std::string encode_snapshot(const std::vector<State>& members, double timestamp) {
  if (members.empty()) {
    throw Error(ErrorKind::usage, "snapshot needs at least one member");
  }
  const BoxDomain& d = members.front().domain();
  std::string out = "TPLT";
  put<std::uint32_t>(out, kSnapshotVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(d.dimension()));
  put<double>(out, d.length());
  put<std::uint32_t>(out, static_cast<std::uint32_t>(d.modes_per_axis()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(members.size()));
  put<double>(out, timestamp);
  for (const State& s : members) {
    if (!(s.domain() == d)) {
      throw Error(ErrorKind::shape, "snapshot members live on different domains");
    }
    for (const auto* field : {&s.u, &s.v, &s.theta}) {
      for (double c : field->coeffs) put<double>(out, c);
    }
  }
  return out;
}

Snapshot decode_snapshot(const std::string& bytes) {
  if (bytes.size() < 4 || bytes.compare(0, 4, "TPLT") != 0) {
    throw Error(ErrorKind::io, "not a snapshot file (bad magic)");
  }
  std::size_t pos = 4;
  const auto version = get<std::uint32_t>(bytes, pos);
  if (version != kSnapshotVersion) {
    throw Error(ErrorKind::io, "unsupported snapshot version " + std::to_string(version));
  }
  Snapshot snap;
  snap.dimension = static_cast<int>(get<std::uint32_t>(bytes, pos));
  snap.length = get<double>(bytes, pos);
  snap.modes = get<std::uint32_t>(bytes, pos);
  const auto count = get<std::uint32_t>(bytes, pos);
  snap.timestamp = get<double>(bytes, pos);
  const BoxDomain domain(snap.dimension, snap.modes, snap.length);
  for (std::uint32_t i = 0; i < count; ++i) {
    State s(domain, snap.timestamp);
    for (auto* field : {&s.u, &s.v, &s.theta}) {
      for (double& c : field->coeffs) c = get<double>(bytes, pos);
    }
    snap.members.push_back(std::move(s));
  }
  if (pos != bytes.size()) {
    throw Error(ErrorKind::io, "trailing bytes after snapshot members");
  }
  return snap;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::io, "cannot write '" + path + "'");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error(ErrorKind::io, "write failed for '" + path + "'");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot read '" + path + "'");
  return std::string(std::istreambuf_iterator<char>(in), {});
}

std::string svg_line_chart(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::vector<double>& xs,
                           const std::vector<double>& ys, bool log_y) {
  constexpr double W = 640, H = 400, L = 70, R = 20, T = 40, B = 50;
  std::vector<double> px, py;
  for (std::size_t i = 0; i < std::min(xs.size(), ys.size()); ++i) {
    const double y = log_y ? (ys[i] > 0 ? std::log10(ys[i]) : NAN) : ys[i];
    if (std::isfinite(xs[i]) && std::isfinite(y)) {
      px.push_back(xs[i]);
      py.push_back(y);
    }
  }
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" viewBox=\"0 0 " << W << ' ' << H << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << title
      << "</text>\n";
  svg << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
      << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B
      << "\" stroke=\"black\"/>\n";
  svg << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12
      << "\" text-anchor=\"middle\" font-size=\"13\">" << x_label << "</text>\n"
      << "<text x=\"16\" y=\"" << (T + H - B) / 2 << "\" text-anchor=\"middle\" font-size=\"13\" "
      << "transform=\"rotate(-90 16 " << (T + H - B) / 2 << ")\">"
      << (log_y ? "log10 " : "") << y_label << "</text>\n";
  if (!px.empty()) {
    auto [x0, x1] = std::minmax_element(px.begin(), px.end());
    auto [y0, y1] = std::minmax_element(py.begin(), py.end());
    double xlo = *x0, xhi = *x1, ylo = *y0, yhi = *y1;
    if (xhi == xlo) xhi = xlo + 1;
    if (yhi == ylo) { ylo -= 0.5; yhi += 0.5; }
    auto sx = [&](double x) { return L + (x - xlo) / (xhi - xlo) * (W - L - R); };
    auto sy = [&](double y) { return H - B - (y - ylo) / (yhi - ylo) * (H - T - B); };
    svg << "<text x=\"" << L - 6 << "\" y=\"" << sy(yhi) + 4
        << "\" text-anchor=\"end\" font-size=\"11\">" << csv_number(yhi).substr(0, 8) << "</text>\n"
        << "<text x=\"" << L - 6 << "\" y=\"" << sy(ylo) + 4
        << "\" text-anchor=\"end\" font-size=\"11\">" << csv_number(ylo).substr(0, 8) << "</text>\n"
        << "<text x=\"" << sx(xlo) << "\" y=\"" << H - B + 16
        << "\" text-anchor=\"middle\" font-size=\"11\">" << csv_number(xlo).substr(0, 8) << "</text>\n"
        << "<text x=\"" << sx(xhi) << "\" y=\"" << H - B + 16
        << "\" text-anchor=\"middle\" font-size=\"11\">" << csv_number(xhi).substr(0, 8) << "</text>\n";
    svg << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < px.size(); ++i) {
      svg << (i ? " " : "") << sx(px[i]) << ',' << sy(py[i]);
    }
    svg << "\"/>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace thermoplate
