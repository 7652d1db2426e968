#pragma once

// Raw little-endian float64 arrays plus JSON sidecars for field export.

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "rbgpc/gpcqoi.hpp"

namespace rbgpc {

void write_f64(const std::filesystem::path& path, std::span<const double> values);
// Throws Error(Io) if the file is missing or its size is not a multiple of 8,
// or, when expected_count is nonzero, if the count differs.
std::vector<double> read_f64(const std::filesystem::path& path, std::size_t expected_count = 0);

// <stem>.f64 holds the coefficient fields column-major (dofs x M); <stem>.json
// records M, grid dims, the multi-index list, source tag and rule.
void write_expansion(const std::filesystem::path& dir, const std::string& stem,
                     const GpcExpansion& expansion);
GpcExpansion read_expansion(const std::filesystem::path& dir, const std::string& stem);

}  // namespace rbgpc
