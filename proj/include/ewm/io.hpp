#pragma once

#include <string>
#include <vector>

#include "ewm/diagnostics.hpp"
#include "ewm/evolution.hpp"
#include "ewm/stationary.hpp"

namespace ewm {

/// Shortest round-trip representation of a double.
std::string format_double(double x);

/// Writes a header line and one comma-separated row per entry; throws ErrorCode::io on failure.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);
void write_text(const std::string& path, const std::string& text);

void write_solution_csv(const std::string& path, const StationarySolution& sol);
void write_snapshot_csv(const std::string& path, const FieldState& s);
void write_series_csv(const std::string& path, const std::vector<DiagnosticsRecord>& series);

}  // namespace ewm
