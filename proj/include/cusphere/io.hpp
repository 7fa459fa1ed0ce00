#pragma once

#include "cusphere/grid.hpp"
#include "cusphere/metrics.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace cusphere::io {

inline constexpr std::string_view kCsvHeader = "cell_id,lambda_center,phi_center,phi1,phi2,lambda1,lambda2,area,u";

/// Field snapshot: kCsvHeader then one row per cell, 17 significant digits,
/// LF line endings.
void write_field_csv(std::ostream& os, const SphereGrid& g, const CellField& f);
std::string field_csv(const SphereGrid& g, const CellField& f);

struct CsvRow {
  int cell_id;
  double lambda_center, phi_center, phi1, phi2, lambda1, lambda2, area, u;
};

/// Parses a snapshot written by write_field_csv. Throws std::runtime_error
/// naming the offending line or column.
std::vector<CsvRow> read_field_csv(std::istream& is);

/// Locale-independent decimal parsing of the whole string.
double parse_double(std::string_view text);
long parse_long(std::string_view text);

/// Flat key=value file; '#' starts a comment. Keys are normalized so that
/// "n-phi" and "n_phi" are the same key.
std::map<std::string, std::string> read_key_value_file(const std::filesystem::path& path);
std::map<std::string, std::string> parse_key_values(std::istream& is, const std::string& source = "<input>");
std::string normalize_key(std::string key);

/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace cusphere::io
