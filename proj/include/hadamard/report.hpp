#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <type_traits>
#include <vector>

#include <json.hpp>

#include "hadamard/measure_io.hpp"

namespace hadamard {

inline constexpr int kSummarySchemaVersion = 1;

// Comma-separated table; cells holding commas or quotes are quoted.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  template <typename... Cells>
  void add(const Cells&... cells) {
    std::vector<std::string> row;
    (row.push_back(cell(cells)), ...);
    add_row(std::move(row));
  }
  void add_row(std::vector<std::string> row);

  std::size_t size() const { return rows_.size(); }
  std::string str() const;

  static std::string cell(double v) { return format_double(v); }
  static std::string cell(const std::string& v) { return v; }
  static std::string cell(const char* v) { return v; }
  template <typename I>
    requires std::is_integral_v<I>
  static std::string cell(I v) {
    return std::to_string(v);
  }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

// Summary document: experiment name, inputs, results and named assertions.
class Summary {
 public:
  explicit Summary(const std::string& experiment);

  nlohmann::ordered_json& inputs() { return doc_["inputs"]; }
  nlohmann::ordered_json& results() { return doc_["results"]; }
  void check(const std::string& name, bool passed, const std::string& detail = "");

  bool passed() const;
  std::vector<std::string> failures() const;
  // One "PASS name: detail" or "FAIL name: detail" line per assertion.
  std::string assertion_lines() const;
  std::string str() const;

 private:
  nlohmann::ordered_json doc_;
};

// Writes through a temporary file and a rename so readers never see a
// partial file.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace hadamard
