#pragma once

// Table and scalar-result writers shared by all subcommands.
//
// CSV: LF line endings, one "# mfd <version> config=<hash> seed=<seed>"
// comment line, a header row, %.17g floats. JSON tables carry the same
// stamp in a "meta" object.

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace mfd::cli {

struct Stamp {
  std::string config_hash;
  std::uint64_t seed = 0;
};

using Cell = std::variant<std::string, double, long>;

std::string format_double(double v);

class TableWriter {
public:
  /// `stem` is the file name without extension; format is "csv" or "json".
  TableWriter(const std::filesystem::path& dir, const std::string& stem, const std::string& format,
              std::vector<std::string> columns, const Stamp& stamp);
  void row(const std::vector<Cell>& cells);
  /// Writes the file; returns its path.
  std::filesystem::path close();

private:
  std::filesystem::path path_;
  std::string format_;
  std::vector<std::string> columns_;
  Stamp stamp_;
  std::string csv_;
  nlohmann::json rows_ = nlohmann::json::array();
};

/// Writes `body` plus the stamp as <dir>/<stem>.json.
std::filesystem::path write_json(const std::filesystem::path& dir, const std::string& stem,
                                 nlohmann::json body, const Stamp& stamp);

/// 64-bit FNV-1a, as 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace mfd::cli
