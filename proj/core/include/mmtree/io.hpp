#pragma once

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "mmtree/dataset.hpp"

namespace mmtree {

/// Column name or zero-based column index.
using ColumnRef = std::variant<std::string, std::size_t>;

/// Raw header + cells of a CSV file. Blank lines and lines starting with '#' are skipped.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const ColumnRef& ref) const;
};

CsvTable read_csv_table(const std::filesystem::path& path);

/// Loads a numeric CSV; every non-target column becomes a feature.
Dataset load_csv(const std::filesystem::path& path, const ColumnRef& target_column, Task task);

/// Parses a decimal number (no locale). Throws DataError naming `where` on failure.
double parse_number(std::string_view cell, const std::string& where);

ImageGrid load_pgm(const std::filesystem::path& path);
ImageGrid parse_pgm(const std::string& bytes);

enum class PgmFormat { ascii, binary };
/// Writes intensities quantized to round(v * maxval).
void write_pgm(const std::filesystem::path& path, const ImageGrid& image,
               PgmFormat format = PgmFormat::binary, unsigned maxval = 255);
std::string format_pgm(const ImageGrid& image, PgmFormat format = PgmFormat::binary,
                       unsigned maxval = 255);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace mmtree
