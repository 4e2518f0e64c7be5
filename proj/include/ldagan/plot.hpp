#pragma once

#include "ldagan/neural.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace ldagan {

// Scatter of real points (red) and generated points colored by generator id.
std::string scatter_svg(const Matrix& real, const Matrix& fake, const std::vector<int>& generator_ids,
                        int num_generators);

void write_scatter_svg(const std::filesystem::path& path, const Matrix& real, const Matrix& fake,
                       const std::vector<int>& generator_ids, int num_generators);

} // namespace ldagan
