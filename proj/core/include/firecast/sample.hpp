#pragma once

// Reverse-diffusion samplers: the tree-structured sampler with shared trunk
// segments and shift-conditioned branch transitions, plus the baseline
// trajectory organizations (fully independent, fully shared, autoregressive).

#include <cmath>
#include <string>
#include <vector>

#include "firecast/grid.hpp"
#include "firecast/model.hpp"
#include "firecast/rng.hpp"
#include "firecast/schedule.hpp"
#include "firecast/treeplan.hpp"

namespace firecast {

enum class TransitionMode { deterministic, stochastic };

struct SamplerRun {
    std::string sampler;
    int64_t call_count = 0;
    double wall_time_ms = 0.0;
    uint64_t seed = 0;
    std::vector<GridF> outputs;  // indexed by horizon, clipped to [0,1]
};

// One reverse update s_from -> s_to. Deterministic mode is the
// noise-preserving update through the predicted clean map; stochastic mode is
// the ancestral posterior step and requires adjacent levels.
template <typename T>
Grid<T> reverse_transition(const Grid<T>& noisy, int s_from, int s_to,
                           const Grid<T>& eps_hat, const NoiseSchedule& sched,
                           TransitionMode mode = TransitionMode::deterministic,
                           Rng* rng = nullptr) {
    if (!(s_from > s_to && s_to >= 0)) {
        throw NumericError("reverse_transition: need s_from > s_to >= 0");
    }
    if (s_from > sched.steps()) {
        throw NumericError("reverse_transition: s_from beyond schedule");
    }
    require_same_shape(noisy, eps_hat, "reverse_transition");
    Grid<T> out(noisy.h, noisy.w);
    if (mode == TransitionMode::deterministic) {
        const double abar_f = sched.alpha_bar(s_from);
        const double abar_t = sched.alpha_bar(s_to);
        const T inv_sqrt_af = static_cast<T>(1.0 / std::sqrt(abar_f));
        const T sqrt_1maf = static_cast<T>(std::sqrt(1.0 - abar_f));
        const T sqrt_at = static_cast<T>(std::sqrt(abar_t));
        const T sqrt_1mat = static_cast<T>(std::sqrt(1.0 - abar_t));
        for (size_t i = 0; i < noisy.size(); ++i) {
            const T x0 = (noisy.v[i] - sqrt_1maf * eps_hat.v[i]) * inv_sqrt_af;
            out.v[i] = sqrt_at * x0 + sqrt_1mat * eps_hat.v[i];
        }
        return out;
    }
    if (s_to != s_from - 1) {
        throw NumericError("reverse_transition: stochastic mode requires adjacent levels");
    }
    const double beta = sched.beta(s_from);
    const double alpha = 1.0 - beta;
    const double abar = sched.alpha_bar(s_from);
    const double abar_prev = sched.alpha_bar(s_to);
    const T inv_sqrt_a = static_cast<T>(1.0 / std::sqrt(alpha));
    const T coef = static_cast<T>(beta / std::sqrt(1.0 - abar));
    const double var = (1.0 - abar_prev) / (1.0 - abar) * beta;
    const T sigma = static_cast<T>(s_to > 0 ? std::sqrt(var) : 0.0);
    for (size_t i = 0; i < noisy.size(); ++i) {
        T z = T(0);
        if (s_to > 0) {
            if (!rng) throw NumericError("reverse_transition: stochastic mode needs an rng");
            z = static_cast<T>(rng->normal());
        }
        out.v[i] = inv_sqrt_a * (noisy.v[i] - coef * eps_hat.v[i]) + sigma * z;
    }
    return out;
}

SamplerRun run_tree(DenoiserF& model, const TreePlan& plan,
                    const InferenceStepping& stepping, const GridF& cond,
                    const NoiseSchedule& sched, uint64_t seed,
                    TransitionMode mode = TransitionMode::deterministic);

SamplerRun run_independent(DenoiserF& model, int horizons,
                           const InferenceStepping& stepping, const GridF& cond,
                           const NoiseSchedule& sched, uint64_t seed,
                           TransitionMode mode = TransitionMode::deterministic);

SamplerRun run_fully_shared(DenoiserF& model, int horizons,
                            const InferenceStepping& stepping, const GridF& cond,
                            const NoiseSchedule& sched, uint64_t seed,
                            TransitionMode mode = TransitionMode::deterministic);

SamplerRun run_autoregressive(DenoiserF& model, int horizons,
                              const InferenceStepping& stepping, const GridF& cond,
                              const NoiseSchedule& sched, uint64_t seed,
                              TransitionMode mode = TransitionMode::deterministic);

// Dispatch by name: "tree" | "independent" | "shared" | "autoregressive".
SamplerRun run_sampler(const std::string& name, DenoiserF& model,
                       const TreePlan& plan, const InferenceStepping& stepping,
                       const GridF& cond, const NoiseSchedule& sched, uint64_t seed,
                       TransitionMode mode = TransitionMode::deterministic);

}  // namespace firecast
