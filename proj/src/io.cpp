#include "plasmondet/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "plasmondet/errors.hpp"

#ifdef PLASMONDET_HAVE_PNG
#include <png.h>
#endif

namespace plasmondet {
namespace {

void write_header(std::ostream& out, std::span<const std::string> header) {
  for (const auto& line : header) out << "# " << line << '\n';
}

double parse_number(std::string_view s, const char* what) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    // from_chars rejects "inf"/"nan" spellings that strtod accepts.
    std::string tmp(s);
    char* end = nullptr;
    v = std::strtod(tmp.c_str(), &end);
    if (tmp.empty() || end != tmp.c_str() + tmp.size()) {
      throw Error(std::string(what) + ": malformed number '" + tmp + "'");
    }
  }
  return v;
}

std::string strip_comment_prefix(const std::string& line) {
  std::string s = line.substr(1);
  if (!s.empty() && s.front() == ' ') s.erase(0, 1);
  return s;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_csv(std::ostream& out, const Table& table, std::span<const std::string> header) {
  write_header(out, header);
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    out << (c ? "," : "") << table.columns[c];
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_double(row[c]);
    out << '\n';
  }
}

void write_matrix(std::ostream& out, std::size_t rows, std::size_t cols, double pitch,
                  std::span<const double> values, std::span<const std::string> header) {
  if (values.size() != rows * cols) throw InvalidArgument("write_matrix: size mismatch");
  write_header(out, header);
  out << "matrix " << rows << ' ' << cols << ' ' << format_double(pitch) << '\n';
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      out << (c ? " " : "") << format_double(values[r * cols + c]);
    }
    out << '\n';
  }
}

void write_matrix(std::ostream& out, const Table& table, std::span<const std::string> header) {
  std::vector<std::string> lines(header.begin(), header.end());
  std::string names = "columns";
  for (const auto& c : table.columns) names += " " + c;
  lines.push_back(names);
  std::vector<double> flat;
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size()) throw InvalidArgument("write_matrix: ragged table");
    flat.insert(flat.end(), row.begin(), row.end());
  }
  write_matrix(out, table.rows.size(), table.columns.size(), 0.0, flat, lines);
}

MatrixData read_matrix(std::istream& in) {
  MatrixData m;
  std::string line;
  bool have_dims = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.front() == '#') {
      m.header.push_back(strip_comment_prefix(line));
      continue;
    }
    std::istringstream ls(line);
    if (!have_dims) {
      std::string tag, pitch;
      if (!(ls >> tag >> m.rows >> m.cols >> pitch) || tag != "matrix") {
        throw Error("read_matrix: expected 'matrix <rows> <cols> <pitch>' line");
      }
      m.pitch = parse_number(pitch, "read_matrix");
      have_dims = true;
      continue;
    }
    std::string tok;
    while (ls >> tok) m.values.push_back(parse_number(tok, "read_matrix"));
  }
  if (!have_dims) throw Error("read_matrix: missing dimension line");
  if (m.values.size() != m.rows * m.cols) {
    throw Error("read_matrix: expected " + std::to_string(m.rows * m.cols) + " values, got " +
                std::to_string(m.values.size()));
  }
  return m;
}

CsvData read_csv(std::istream& in) {
  CsvData d;
  std::string line;
  bool have_columns = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.front() == '#') {
      d.header.push_back(strip_comment_prefix(line));
      continue;
    }
    std::vector<std::string> fields;
    std::istringstream ls(line);
    std::string f;
    while (std::getline(ls, f, ',')) fields.push_back(f);
    if (!have_columns) {
      d.table.columns = fields;
      have_columns = true;
      continue;
    }
    if (fields.size() != d.table.columns.size()) throw Error("read_csv: ragged row");
    std::vector<double> row;
    for (const auto& s : fields) row.push_back(parse_number(s, "read_csv"));
    d.table.rows.push_back(std::move(row));
  }
  return d;
}

#ifdef PLASMONDET_HAVE_PNG

bool png_supported() { return true; }

void write_png16(const std::filesystem::path& path, std::size_t rows, std::size_t cols,
                 std::span<const double> values) {
  if (values.size() != rows * cols || rows == 0) throw InvalidArgument("write_png16: bad size");
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it;
  const double range = *hi_it - lo;

  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(cols);
  image.height = static_cast<png_uint_32>(rows);
  image.format = PNG_FORMAT_LINEAR_Y;  // 16-bit gray
  std::vector<png_uint_16> pixels(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double u = range > 0.0 ? (values[i] - lo) / range : 0.0;
    pixels[i] = static_cast<png_uint_16>(std::lround(u * 65535.0));
  }
  if (!png_image_write_to_file(&image, path.string().c_str(), 0, pixels.data(), 0, nullptr)) {
    std::string msg = image.message;
    png_image_free(&image);
    throw Error("write_png16: " + msg);
  }
}

#else

bool png_supported() { return false; }

void write_png16(const std::filesystem::path&, std::size_t, std::size_t, std::span<const double>) {
  throw Error("write_png16: built without PNG support");
}

#endif

}  // namespace plasmondet
