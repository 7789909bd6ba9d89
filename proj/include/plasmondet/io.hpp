#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace plasmondet {

// Shortest round-trip decimal form; identical input gives identical text.
std::string format_double(double v);

struct Table {
  std::vector<std::string> columns;  // names carry units, e.g. theta_deg
  std::vector<std::vector<double>> rows;
};

// Every header line is written as "# <line>".
void write_csv(std::ostream& out, const Table& table, std::span<const std::string> header);

// Header comments, then "matrix <rows> <cols> <pitch_m>", then rows of
// space-separated values.
void write_matrix(std::ostream& out, std::size_t rows, std::size_t cols, double pitch,
                  std::span<const double> values, std::span<const std::string> header);
void write_matrix(std::ostream& out, const Table& table, std::span<const std::string> header);

struct MatrixData {
  std::size_t rows = 0;
  std::size_t cols = 0;
  double pitch = 0.0;
  std::vector<double> values;
  std::vector<std::string> header;  // comment lines without the "# " prefix
};

MatrixData read_matrix(std::istream& in);

struct CsvData {
  Table table;
  std::vector<std::string> header;
};

CsvData read_csv(std::istream& in);

bool png_supported();

// 16-bit grayscale, linearly mapped from [min, max] of the values.
// Throws Error when the build has no PNG support.
void write_png16(const std::filesystem::path& path, std::size_t rows, std::size_t cols,
                 std::span<const double> values);

}  // namespace plasmondet
