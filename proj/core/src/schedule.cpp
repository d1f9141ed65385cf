#include "firecast/schedule.hpp"

#include <cmath>

#include "firecast/errors.hpp"

namespace firecast {

NoiseSchedule make_linear_schedule(int steps, double beta_start, double beta_end) {
    if (steps < 1) throw NumericError("make_linear_schedule: steps must be >= 1");
    if (!(beta_start > 0.0 && beta_start <= beta_end && beta_end < 1.0)) {
        throw NumericError("make_linear_schedule: need 0 < beta_start <= beta_end < 1");
    }
    NoiseSchedule sched;
    sched.betas.resize(static_cast<size_t>(steps));
    for (int k = 0; k < steps; ++k) {
        const double u = steps == 1 ? 0.0 : static_cast<double>(k) / (steps - 1);
        sched.betas[static_cast<size_t>(k)] = beta_start + u * (beta_end - beta_start);
    }
    sched.alpha_bars.resize(static_cast<size_t>(steps) + 1);
    sched.alpha_bars[0] = 1.0;
    for (int s = 1; s <= steps; ++s) {
        sched.alpha_bars[static_cast<size_t>(s)] =
            sched.alpha_bars[static_cast<size_t>(s) - 1] * (1.0 - sched.beta(s));
    }
    return sched;
}

InferenceStepping subsample_levels(int d_train, int d_test) {
    if (d_test < 1 || d_test > d_train) {
        throw NumericError("subsample_levels: need 1 <= d_test <= d_train");
    }
    InferenceStepping stepping;
    stepping.levels.reserve(static_cast<size_t>(d_test));
    for (int i = 1; i <= d_test; ++i) {
        const double raw = static_cast<double>(d_train) * (d_test - i + 1) / d_test;
        stepping.levels.push_back(static_cast<int>(std::lround(raw)));
    }
    // Rounding can collide for d_test close to d_train; restore strict
    // descent by nudging downwards, dropping levels only when out of room.
    for (size_t i = 1; i < stepping.levels.size(); ++i) {
        if (stepping.levels[i] >= stepping.levels[i - 1]) {
            stepping.levels[i] = stepping.levels[i - 1] - 1;
        }
    }
    while (!stepping.levels.empty() && stepping.levels.back() < 1) {
        stepping.levels.pop_back();
    }
    return stepping;
}

}  // namespace firecast
