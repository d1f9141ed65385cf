#pragma once

#include <cmath>
#include <vector>

#include "firecast/grid.hpp"

namespace firecast {

// Forward-process variance schedule. Noise levels are indexed s = 0..D with
// s = D the most noisy state and s = 0 the clean map.
struct NoiseSchedule {
    std::vector<double> betas;       // betas[k-1] = beta_k, k = 1..D
    std::vector<double> alpha_bars;  // alpha_bars[s] = prod_{k<=s}(1 - beta_k); alpha_bars[0] = 1

    int steps() const { return static_cast<int>(betas.size()); }

    double alpha_bar(int s) const { return alpha_bars[static_cast<size_t>(s)]; }
    double beta(int k) const { return betas[static_cast<size_t>(k) - 1]; }
};

// Linear beta ramp from beta_start to beta_end inclusive.
NoiseSchedule make_linear_schedule(int steps, double beta_start, double beta_end);

// Strictly decreasing noise levels visited at inference; the final reverse
// transition maps levels.back() to 0.
struct InferenceStepping {
    std::vector<int> levels;

    int count() const { return static_cast<int>(levels.size()); }
};

// Evenly strided subset of {1..d_train} with d_test entries.
InferenceStepping subsample_levels(int d_train, int d_test);

// x_s = sqrt(abar_s) * clean + sqrt(1 - abar_s) * eps. s = 0 returns clean.
template <typename T>
Grid<T> forward_noise(const Grid<T>& clean, int s, const NoiseSchedule& sched,
                      const Grid<T>& eps) {
    if (s < 0 || s > sched.steps()) {
        throw NumericError("forward_noise: noise level out of range");
    }
    if (s == 0) return clean;
    require_same_shape(clean, eps, "forward_noise");
    const T a = static_cast<T>(std::sqrt(sched.alpha_bar(s)));
    const T b = static_cast<T>(std::sqrt(1.0 - sched.alpha_bar(s)));
    Grid<T> out(clean.h, clean.w);
    for (size_t i = 0; i < clean.size(); ++i) {
        out.v[i] = a * clean.v[i] + b * eps.v[i];
    }
    return out;
}

}  // namespace firecast
