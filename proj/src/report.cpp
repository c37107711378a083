#include "hadamard/report.hpp"

#include <fstream>

#include "hadamard/errors.hpp"

namespace hadamard {

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(std::vector<std::string> row) {
  if (row.size() != header_.size()) throw LabError("CSV row width does not match the header");
  rows_.push_back(std::move(row));
}

std::string CsvTable::str() const {
  std::string out;
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      const std::string& c = cells[i];
      if (c.find_first_of(",\"\n") == std::string::npos) {
        out += c;
      } else {
        out += '"';
        for (char ch : c) {
          if (ch == '"') out += '"';
          out += ch;
        }
        out += '"';
      }
    }
    out += '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return out;
}

Summary::Summary(const std::string& experiment) {
  doc_["schema_version"] = kSummarySchemaVersion;
  doc_["experiment"] = experiment;
  doc_["inputs"] = nlohmann::ordered_json::object();
  doc_["results"] = nlohmann::ordered_json::object();
  doc_["assertions"] = nlohmann::ordered_json::array();
}

void Summary::check(const std::string& name, bool passed, const std::string& detail) {
  nlohmann::ordered_json a;
  a["name"] = name;
  a["passed"] = passed;
  if (!detail.empty()) a["detail"] = detail;
  doc_["assertions"].push_back(std::move(a));
}

bool Summary::passed() const { return failures().empty(); }

std::vector<std::string> Summary::failures() const {
  std::vector<std::string> out;
  for (const auto& a : doc_["assertions"]) {
    if (!a["passed"].get<bool>()) out.push_back(a["name"].get<std::string>());
  }
  return out;
}

std::string Summary::assertion_lines() const {
  std::string out;
  for (const auto& a : doc_["assertions"]) {
    out += a["passed"].get<bool>() ? "PASS " : "FAIL ";
    out += a["name"].get<std::string>();
    if (a.contains("detail")) out += ": " + a["detail"].get<std::string>();
    out += '\n';
  }
  return out;
}

std::string Summary::str() const {
  nlohmann::ordered_json d = doc_;
  d["passed"] = passed();
  return d.dump(2) + "\n";
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw LabError("cannot open " + tmp.string() + " for writing");
    out << text;
    if (!out) throw LabError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace hadamard
