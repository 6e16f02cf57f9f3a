#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <variant>
#include <vector>

namespace qdlab::cli {

using Cell = std::variant<double, std::int64_t, std::uint64_t, std::string, bool>;

/// Shortest round-trip decimal form; "nan", "inf" and "-inf" for non-finite values.
std::string format_double(double x);
std::string format_cell(const Cell& cell);

/// CSV with '#' comment lines, a header row and a fixed column order.
/// Binary mode keeps LF line endings on every platform.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& comments,
            std::vector<std::string> columns);

  void row(const std::vector<Cell>& cells);

 private:
  std::ofstream out_;
  std::size_t columns_;
  std::string path_;
};

}  // namespace qdlab::cli
