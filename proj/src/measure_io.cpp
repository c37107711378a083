#include "hadamard/measure_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hadamard/errors.hpp"

namespace hadamard {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

double parse_double(const std::string& s) {
  double v = 0.0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || end != s.data() + s.size()) throw DomainError("malformed number: " + s);
  return v;
}

std::filesystem::path sidecar(const std::filesystem::path& csv) {
  return std::filesystem::path(csv.string() + ".json");
}

}  // namespace

void write_measure(const EmpiricalMeasure& mu, const std::filesystem::path& csv) {
  std::ofstream out(csv, std::ios::binary);
  if (!out) throw LabError("cannot write " + csv.string());
  out << "walk_index";
  for (int i = 0; i < mu.dim; ++i) out << ",exit_dir_" << i;
  out << '\n';
  for (std::size_t w = 0; w < mu.hits.size(); ++w) {
    out << w;
    for (int i = 0; i < mu.dim; ++i) out << ',' << format_double(mu.hits[w][i]);
    out << '\n';
  }
  nlohmann::ordered_json meta;
  meta["schema_version"] = 1;
  meta["space"] = mu.space_id;
  meta["dim"] = mu.dim;
  meta["start_r"] = mu.start.r;
  std::vector<double> dir(mu.start.dir.c.begin(), mu.start.dir.c.begin() + mu.dim);
  meta["start_dir"] = dir;
  meta["exit_radius"] = mu.exit_radius;
  meta["step"] = mu.step;
  meta["max_step"] = mu.max_step;
  meta["grow"] = mu.grow;
  meta["walks"] = mu.walks();
  meta["seed"] = mu.seed;
  std::ofstream side(sidecar(csv), std::ios::binary);
  if (!side) throw LabError("cannot write " + sidecar(csv).string());
  side << meta.dump(2) << '\n';
}

EmpiricalMeasure read_measure(const std::filesystem::path& csv) {
  std::ifstream side(sidecar(csv));
  if (!side) throw LabError("missing metadata sidecar for " + csv.string());
  const auto meta = nlohmann::json::parse(side);
  EmpiricalMeasure mu;
  mu.space_id = meta.at("space").get<std::string>();
  mu.dim = meta.at("dim").get<int>();
  if (mu.dim < 2 || mu.dim > kMaxDim) throw DomainError("measure dimension out of range");
  mu.start.r = meta.at("start_r").get<double>();
  const auto dir = meta.at("start_dir").get<std::vector<double>>();
  for (std::size_t i = 0; i < dir.size() && i < static_cast<std::size_t>(kMaxDim); ++i) {
    mu.start.dir[static_cast<int>(i)] = dir[i];
  }
  mu.exit_radius = meta.at("exit_radius").get<double>();
  mu.step = meta.at("step").get<double>();
  mu.max_step = meta.at("max_step").get<double>();
  mu.grow = meta.at("grow").get<bool>();
  mu.seed = meta.at("seed").get<std::uint64_t>();
  const auto walks = meta.at("walks").get<std::int64_t>();

  std::ifstream in(csv);
  if (!in) throw LabError("cannot read " + csv.string());
  std::string line;
  std::getline(in, line);
  std::string expected = "walk_index";
  for (int i = 0; i < mu.dim; ++i) expected += ",exit_dir_" + std::to_string(i);
  if (line != expected) throw DomainError("unexpected measure CSV header: " + line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    std::getline(row, cell, ',');
    if (std::stoll(cell) != mu.walks()) throw DomainError("walk indices must be consecutive");
    Vec v;
    for (int i = 0; i < mu.dim; ++i) {
      if (!std::getline(row, cell, ',')) throw DomainError("short measure CSV row");
      v[i] = parse_double(cell);
    }
    mu.hits.push_back(v);
  }
  if (mu.walks() != walks) throw DomainError("measure CSV row count disagrees with metadata");
  return mu;
}

}  // namespace hadamard
