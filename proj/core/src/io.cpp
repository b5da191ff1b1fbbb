#include "mmtree/io.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "mmtree/error.hpp"

namespace mmtree {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return std::string(s.substr(b, e - b));
}

// Splits one logical record. Quoted fields may contain commas and doubled quotes.
std::vector<std::string> split_record(const std::string& line, std::size_t line_no) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
      was_quoted = true;
    } else if (c == ',') {
      out.push_back(was_quoted ? field : trim(field));
      field.clear();
      was_quoted = false;
    } else {
      field += c;
    }
  }
  if (quoted) {
    throw DataError("line " + std::to_string(line_no) + ": unterminated quoted field");
  }
  out.push_back(was_quoted ? field : trim(field));
  return out;
}

bool skippable(const std::string& line) {
  const std::string t = trim(line);
  return t.empty() || t.front() == '#';
}

}  // namespace

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DataError("cannot open '" + path.string() + "'");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw DataError("cannot write '" + path.string() + "'");
  }
  out << contents;
  if (!out) throw DataError("write failed for '" + path.string() + "'");
}

double parse_number(std::string_view cell, const std::string& where) {
  std::string_view s = cell;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(value)) {
    throw DataError(where + ": '" + std::string(cell) + "' is not a finite number");
  }
  return value;
}

std::size_t CsvTable::column(const ColumnRef& ref) const {
  if (const auto* idx = std::get_if<std::size_t>(&ref)) {
    if (*idx >= header.size()) {
      throw DataError("column index " + std::to_string(*idx) + " out of range (" +
                      std::to_string(header.size()) + " columns)");
    }
    return *idx;
  }
  const auto& name = std::get<std::string>(ref);
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (header[j] == name) return j;
  }
  throw DataError("column '" + name + "' not found");
}

CsvTable read_csv_table(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (skippable(line)) continue;
    auto fields = split_record(line, line_no);
    if (!have_header) {
      table.header = std::move(fields);
      have_header = true;
      continue;
    }
    if (fields.size() != table.header.size()) {
      throw DataError("line " + std::to_string(line_no) + ": expected " +
                      std::to_string(table.header.size()) + " fields, found " +
                      std::to_string(fields.size()));
    }
    table.rows.push_back(std::move(fields));
  }
  if (!have_header) {
    throw DataError("'" + path.string() + "' has no header row");
  }
  return table;
}

Dataset load_csv(const std::filesystem::path& path, const ColumnRef& target_column, Task task) {
  const CsvTable table = read_csv_table(path);
  if (table.rows.empty()) {
    throw DataError("'" + path.string() + "' has no data rows");
  }
  const std::size_t target = table.column(target_column);
  if (table.header.size() < 2) {
    throw DataError("'" + path.string() + "' has no feature columns");
  }
  const std::size_t n = table.rows.size();
  std::vector<std::vector<double>> columns;
  std::vector<std::string> names;
  std::vector<double> targets(n);
  for (std::size_t j = 0; j < table.header.size(); ++j) {
    if (j != target) {
      columns.emplace_back(n);
      names.push_back(table.header[j]);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t f = 0;
    for (std::size_t j = 0; j < table.header.size(); ++j) {
      const std::string where = "row " + std::to_string(i + 1) + ", column '" + table.header[j] + "'";
      const double v = parse_number(table.rows[i][j], where);
      if (j == target) {
        if (task == Task::classification && v != -1.0 && v != 1.0) {
          throw DataError(where + ": classification target must be -1 or +1");
        }
        targets[i] = v;
      } else {
        columns[f++][i] = v;
      }
    }
  }
  return Dataset(std::move(columns), std::move(targets), task, std::move(names));
}

// ---------------------------------------------------------------------------

namespace {

class PgmReader {
 public:
  explicit PgmReader(const std::string& bytes) : b_(bytes) {}

  // Next whitespace-delimited header token, skipping '#' comments.
  unsigned long header_number(const char* what) {
    skip_space_and_comments();
    const std::size_t start = pos_;
    while (pos_ < b_.size() && std::isdigit(static_cast<unsigned char>(b_[pos_]))) ++pos_;
    if (start == pos_) {
      throw DataError(std::string("PGM: missing or malformed ") + what);
    }
    unsigned long v = 0;
    const auto [ptr, ec] = std::from_chars(b_.data() + start, b_.data() + pos_, v);
    if (ec != std::errc()) throw DataError(std::string("PGM: ") + what + " out of range");
    (void)ptr;
    return v;
  }

  void skip_space_and_comments() {
    while (pos_ < b_.size()) {
      const char c = b_[pos_];
      if (c == '#') {
        while (pos_ < b_.size() && b_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  // Exactly one whitespace byte separates maxval from a binary raster.
  void single_space() {
    if (pos_ >= b_.size() || !std::isspace(static_cast<unsigned char>(b_[pos_]))) {
      throw DataError("PGM: truncated raster");
    }
    ++pos_;
  }

  std::size_t remaining() const { return b_.size() - pos_; }
  unsigned char byte() { return static_cast<unsigned char>(b_[pos_++]); }

 private:
  const std::string& b_;
  std::size_t pos_ = 2;
};

}  // namespace

ImageGrid parse_pgm(const std::string& bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '2' && bytes[1] != '5')) {
    throw DataError("PGM: unsupported magic '" + bytes.substr(0, 2) + "'");
  }
  const bool ascii = bytes[1] == '2';
  PgmReader r(bytes);
  const unsigned long width = r.header_number("width");
  const unsigned long height = r.header_number("height");
  const unsigned long maxval = r.header_number("maxval");
  if (width == 0 || height == 0) throw DataError("PGM: zero image dimension");
  if (maxval == 0) throw DataError("PGM: maxval 0");
  if (maxval > 65535) throw DataError("PGM: maxval above 65535");
  const std::size_t count = width * height;
  std::vector<double> pixels(count);
  const double scale = static_cast<double>(maxval);
  if (ascii) {
    for (std::size_t i = 0; i < count; ++i) {
      r.skip_space_and_comments();
      if (r.remaining() == 0) throw DataError("PGM: truncated raster");
      const unsigned long v = r.header_number("sample");
      if (v > maxval) throw DataError("PGM: sample exceeds maxval");
      pixels[i] = static_cast<double>(v) / scale;
    }
  } else {
    r.single_space();
    const std::size_t bytes_per = maxval < 256 ? 1 : 2;
    if (r.remaining() < count * bytes_per) throw DataError("PGM: truncated raster");
    for (std::size_t i = 0; i < count; ++i) {
      unsigned v = r.byte();
      if (bytes_per == 2) v = (v << 8) | r.byte();
      if (v > maxval) throw DataError("PGM: sample exceeds maxval");
      pixels[i] = static_cast<double>(v) / scale;
    }
  }
  return ImageGrid(height, width, std::move(pixels));
}

ImageGrid load_pgm(const std::filesystem::path& path) { return parse_pgm(read_file(path)); }

std::string format_pgm(const ImageGrid& image, PgmFormat format, unsigned maxval) {
  if (maxval == 0 || maxval > 65535) throw ConfigError("PGM maxval must be in [1, 65535]");
  std::string out = format == PgmFormat::ascii ? "P2\n" : "P5\n";
  out += std::to_string(image.width()) + " " + std::to_string(image.height()) + "\n" +
         std::to_string(maxval) + "\n";
  const auto px = image.pixels();
  for (std::size_t i = 0; i < px.size(); ++i) {
    const auto v = static_cast<unsigned>(std::lround(px[i] * maxval));
    if (format == PgmFormat::ascii) {
      out += std::to_string(v);
      out += ((i + 1) % image.width() == 0) ? '\n' : ' ';
    } else if (maxval < 256) {
      out += static_cast<char>(v);
    } else {
      out += static_cast<char>(v >> 8);
      out += static_cast<char>(v & 0xFF);
    }
  }
  return out;
}

void write_pgm(const std::filesystem::path& path, const ImageGrid& image, PgmFormat format,
               unsigned maxval) {
  write_file(path, format_pgm(image, format, maxval));
}

}  // namespace mmtree
