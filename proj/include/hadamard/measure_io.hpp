#pragma once

#include <filesystem>
#include <string>

#include "hadamard/brownian.hpp"

namespace hadamard {

// Shortest decimal text with 17 significant digits; parses back bit-exactly.
std::string format_double(double v);

// Writes `csv` (header walk_index,exit_dir_0,...) and the metadata sidecar
// `csv` + ".json".
void write_measure(const EmpiricalMeasure& mu, const std::filesystem::path& csv);
EmpiricalMeasure read_measure(const std::filesystem::path& csv);

}  // namespace hadamard
