#include "output.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "mfd/errors.hpp"
#include "mfd/version.hpp"

namespace mfd::cli {

namespace {

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw DataError("write failed: " + path.string());
}

nlohmann::json meta(const Stamp& stamp) {
  return {{"tool", "mfd"}, {"version", kVersion}, {"config", stamp.config_hash}, {"seed", stamp.seed}};
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += (c == '"') ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

TableWriter::TableWriter(const std::filesystem::path& dir, const std::string& stem, const std::string& format,
                         std::vector<std::string> columns, const Stamp& stamp)
    : path_(dir / (stem + (format == "json" ? ".json" : ".csv"))),
      format_(format),
      columns_(std::move(columns)),
      stamp_(stamp) {
  if (format_ != "csv" && format_ != "json") throw DomainError("unknown output format: " + format_);
  csv_ = "# mfd " + std::string(kVersion) + " config=" + stamp.config_hash + " seed=" + std::to_string(stamp.seed) + "\n";
  for (size_t i = 0; i < columns_.size(); ++i) csv_ += (i ? "," : "") + csv_field(columns_[i]);
  csv_ += "\n";
}

void TableWriter::row(const std::vector<Cell>& cells) {
  if (cells.size() != columns_.size()) throw std::logic_error("TableWriter: row width mismatch");
  nlohmann::json jrow = nlohmann::json::array();
  for (size_t i = 0; i < cells.size(); ++i) {
    std::string text;
    if (auto s = std::get_if<std::string>(&cells[i])) {
      text = csv_field(*s);
      jrow.push_back(*s);
    } else if (auto d = std::get_if<double>(&cells[i])) {
      text = format_double(*d);
      if (std::isfinite(*d)) jrow.push_back(*d); else jrow.push_back(text);
    } else {
      const long v = std::get<long>(cells[i]);
      text = std::to_string(v);
      jrow.push_back(v);
    }
    csv_ += (i ? "," : "") + text;
  }
  csv_ += "\n";
  rows_.push_back(std::move(jrow));
}

std::filesystem::path TableWriter::close() {
  if (format_ == "csv") {
    write_file(path_, csv_);
  } else {
    nlohmann::json doc = {{"meta", meta(stamp_)}, {"columns", columns_}, {"rows", rows_}};
    write_file(path_, doc.dump(1) + "\n");
  }
  return path_;
}

std::filesystem::path write_json(const std::filesystem::path& dir, const std::string& stem, nlohmann::json body,
                                 const Stamp& stamp) {
  body["meta"] = meta(stamp);
  const auto path = dir / (stem + ".json");
  write_file(path, body.dump(1) + "\n");
  return path;
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace mfd::cli
