#include "firecast/frm.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "firecast/errors.hpp"

namespace firecast {

std::pair<double, double> intensity_to_sigma(double brightness, const SigmaConfig& config) {
    if (brightness <= 0.0) {
        throw DataError("intensity_to_sigma: brightness must be positive");
    }
    if (!(config.sigma_min_px > 0.0 && config.sigma_max_px >= config.sigma_min_px &&
          config.b_hi > config.b_lo)) {
        throw DataError("intensity_to_sigma: invalid sigma config");
    }
    const double u = (brightness - config.b_lo) / (config.b_hi - config.b_lo);
    const double sigma = std::clamp(
        config.sigma_min_px + u * (config.sigma_max_px - config.sigma_min_px),
        config.sigma_min_px, config.sigma_max_px);
    return {sigma, sigma};
}

GridF rasterize_kernel(const KernelSpec& spec, int height, int width,
                       double cutoff_sigmas) {
    if (height <= 0 || width <= 0) {
        throw NumericError("rasterize_kernel: resolution must be positive");
    }
    if (!(spec.sigma_x > 0.0 && spec.sigma_y > 0.0)) {
        throw NumericError("rasterize_kernel: sigma must be positive");
    }
    GridF out(height, width);
    const double norm = 1.0 / (2.0 * std::numbers::pi * spec.sigma_x * spec.sigma_y);
    const double inv2sx2 = 1.0 / (2.0 * spec.sigma_x * spec.sigma_x);
    const double inv2sy2 = 1.0 / (2.0 * spec.sigma_y * spec.sigma_y);

    int y_lo = 0, y_hi = height - 1, x_lo = 0, x_hi = width - 1;
    if (cutoff_sigmas > 0.0) {
        y_lo = std::max(0, static_cast<int>(std::floor(spec.center_y - cutoff_sigmas * spec.sigma_y)));
        y_hi = std::min(height - 1, static_cast<int>(std::ceil(spec.center_y + cutoff_sigmas * spec.sigma_y)));
        x_lo = std::max(0, static_cast<int>(std::floor(spec.center_x - cutoff_sigmas * spec.sigma_x)));
        x_hi = std::min(width - 1, static_cast<int>(std::ceil(spec.center_x + cutoff_sigmas * spec.sigma_x)));
    }
    for (int y = y_lo; y <= y_hi; ++y) {
        const double dy = y - spec.center_y;
        const double ey = dy * dy * inv2sy2;
        for (int x = x_lo; x <= x_hi; ++x) {
            const double dx = x - spec.center_x;
            out.at(y, x) = static_cast<float>(norm * std::exp(-(dx * dx * inv2sx2 + ey)));
        }
    }
    return out;
}

RiskMap build_frm(const DailyEvents& day, const GeoTransform& geo,
                  const SigmaConfig& sigma_config, double cutoff_sigmas) {
    RiskMap map;
    map.day_index = day.day_index;
    map.grid = GridF(geo.height, geo.width);
    for (const FireEvent& ev : day.events) {
        const auto [sx, sy] = intensity_to_sigma(ev.brightness, sigma_config);
        const auto [px, py] = geo.to_pixel(ev.latitude, ev.longitude);
        KernelSpec spec{px, py, sx, sy};
        const GridF kernel = rasterize_kernel(spec, geo.height, geo.width, cutoff_sigmas);
        for (size_t i = 0; i < map.grid.size(); ++i) map.grid.v[i] += kernel.v[i];
    }
    return map;
}

double normalize_dataset(std::vector<RiskMap>& maps,
                         const std::vector<int>& train_day_indices,
                         double percentile) {
    if (train_day_indices.empty()) {
        throw DataError("normalize_dataset: train split is empty");
    }
    std::vector<float> positives;
    for (int idx : train_day_indices) {
        const RiskMap& m = maps.at(static_cast<size_t>(idx));
        for (float v : m.grid.v) {
            if (v > 0.0f) positives.push_back(v);
        }
    }
    if (positives.empty()) {
        throw DataError("normalize_dataset: training split is all zero, no valid constant");
    }
    std::sort(positives.begin(), positives.end());
    const size_t rank = static_cast<size_t>(
        std::ceil(percentile / 100.0 * static_cast<double>(positives.size())));
    double constant =
        positives[std::min(positives.size() - 1, rank == 0 ? size_t{0} : rank - 1)];
    if (constant <= 0.0) {
        // Fallback: global max over the training maps.
        constant = positives.back();
    }
    for (RiskMap& m : maps) {
        for (float& v : m.grid.v) {
            v = std::clamp(static_cast<float>(v / constant), 0.0f, 1.0f);
        }
        m.normalization_constant = static_cast<float>(constant);
    }
    return constant;
}

}  // namespace firecast
