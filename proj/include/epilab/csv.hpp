#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "epilab/extreal.hpp"

namespace epilab {

/// Shortest round-trip decimal form of a double; "inf" for +∞.
std::string format_number(double v);
std::string format_number(const ExtReal& v);

/// RFC 4180 style CSV assembled in memory.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);

  void row(const std::vector<std::string>& cells);
  std::size_t rows() const { return rows_; }
  const std::string& str() const { return text_; }

 private:
  void append(const std::vector<std::string>& cells);

  std::size_t columns_;
  std::size_t rows_ = 0;
  std::string text_;
};

/// Writes `contents` to a temporary sibling and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace epilab
