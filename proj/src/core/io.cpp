#include "ewm/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include "ewm/error.hpp"

namespace ewm {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::io, "cannot write " + path);
  out << text;
  if (!out) fail(ErrorCode::io, "write failed for " + path);
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::string text;
  for (std::size_t i = 0; i < header.size(); ++i) text += (i ? "," : "") + header[i];
  text += '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) text += ',';
      text += format_double(row[i]);
    }
    text += '\n';
  }
  write_text(path, text);
}

void write_solution_csv(const std::string& path, const StationarySolution& sol) {
  std::vector<std::vector<double>> rows;
  for (int i = 0; i <= sol.grid.N; ++i) rows.push_back({sol.grid.r(i), sol.phi[i]});
  write_csv(path, {"r", "phi"}, rows);
}

void write_snapshot_csv(const std::string& path, const FieldState& s) {
  std::vector<std::vector<double>> rows;
  for (int i = 0; i <= s.grid.N; ++i)
    rows.push_back({s.grid.r(i), s.u[i][0], s.u[i][1], s.u[i][2], s.v[i][0], s.v[i][1], s.v[i][2]});
  write_csv(path, {"r", "u1", "u2", "u3", "v1", "v2", "v3"}, rows);
}

void write_series_csv(const std::string& path, const std::vector<DiagnosticsRecord>& series) {
  std::vector<std::vector<double>> rows;
  for (const auto& r : series) rows.push_back({r.t, r.E, r.Q, r.D, r.G, r.identity_residual, r.X, r.flux, r.dist});
  write_csv(path, {"t", "E", "Q", "D", "G", "identity_residual", "X", "flux", "dist"}, rows);
}

}  // namespace ewm
