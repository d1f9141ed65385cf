#pragma once

#include <filesystem>

#include "firecast/grid.hpp"

namespace firecast {

// Heat-ramp PNG of a [0,1] risk field; values are clamped before mapping.
void write_heatmap_png(const std::filesystem::path& path, const GridF& grid);

}  // namespace firecast
