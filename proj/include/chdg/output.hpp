#pragma once

#include "chdg/diagnostics.hpp"
#include "chdg/scenarios.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace chdg {

extern const char* const kCsvHeader;

void write_csv(const std::vector<DiagnosticsRow>& rows, std::ostream& out);
void write_csv(const std::vector<DiagnosticsRow>& rows, const std::string& path);
std::string format_csv_row(const DiagnosticsRow& row);
std::vector<DiagnosticsRow> read_csv(std::istream& in);
std::vector<DiagnosticsRow> read_csv(const std::string& path);

/// Legacy ASCII unstructured grid. Cell data: averages of phi and mu.
/// For p >= 1 corner values are written as point data on duplicated points.
void write_vtk(const CoupledState& state, std::ostream& out);
void write_vtk(const CoupledState& state, const std::string& path);

std::string format_eoc(const EocTable& table);
void write_eoc(const EocTable& table, const std::string& path);

}  // namespace chdg
