#pragma once

#include <utility>
#include <vector>

#include "firecast/grid.hpp"
#include "firecast/ingest.hpp"

namespace firecast {

// Affine clamped brightness -> kernel bandwidth mapping, in pixels.
struct SigmaConfig {
    double b_lo = 300.0;   // Kelvin
    double b_hi = 500.0;
    double sigma_min_px = 1.0;
    double sigma_max_px = 4.0;
    bool isotropic = true;  // anisotropy reserved; per-axis sigmas kept in KernelSpec
};

struct KernelSpec {
    double center_x = 0.0;  // pixel coordinates, continuous, may be off-grid
    double center_y = 0.0;
    double sigma_x = 1.0;
    double sigma_y = 1.0;
};

// Dense non-negative risk field for one day.
struct RiskMap {
    GridF grid;
    int day_index = 0;
    float normalization_constant = 1.0f;  // scale already applied; 1 = unnormalized
};

// Plate carree lat/lon -> pixel mapping onto the model grid. Row 0 is the
// northern edge.
struct GeoTransform {
    BBox bbox;
    int height = 128;
    int width = 128;

    std::pair<double, double> to_pixel(double lat, double lon) const {
        const double x = (lon - bbox.lon_min) / (bbox.lon_max - bbox.lon_min) * width - 0.5;
        const double y = (bbox.lat_max - lat) / (bbox.lat_max - bbox.lat_min) * height - 0.5;
        return {x, y};
    }
};

std::pair<double, double> intensity_to_sigma(double brightness, const SigmaConfig& config);

// Evaluate the kernel at every pixel center. cutoff_sigmas = 0 means full-grid
// evaluation; positive values (>= 6 recommended) restrict to a window.
GridF rasterize_kernel(const KernelSpec& spec, int height, int width,
                       double cutoff_sigmas = 0.0);

// Sum of one kernel per in-region event; zero events yield the all-zero map.
RiskMap build_frm(const DailyEvents& day, const GeoTransform& geo,
                  const SigmaConfig& sigma_config, double cutoff_sigmas = 0.0);

// Scale every map by the given percentile of positive training-split pixel
// values and clip to [0, 1]. Returns the constant; it is also recorded in
// every map's metadata. train_day_indices index into `maps`.
double normalize_dataset(std::vector<RiskMap>& maps,
                         const std::vector<int>& train_day_indices,
                         double percentile = 99.9);

}  // namespace firecast
