#include "firecast/sample.hpp"

#include <chrono>

#include "firecast/errors.hpp"

namespace firecast {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

GridF draw_noise(int h, int w, uint64_t stream_seed) {
    Rng rng(stream_seed);
    GridF g(h, w);
    for (auto& v : g.v) v = static_cast<float>(rng.normal());
    return g;
}

// Transition endpoints: index i runs levels[i] -> (levels[i+1] or 0).
std::pair<int, int> transition_levels(const InferenceStepping& stepping, int i) {
    const int s_from = stepping.levels[static_cast<size_t>(i)];
    const int s_to =
        i + 1 < stepping.count() ? stepping.levels[static_cast<size_t>(i) + 1] : 0;
    return {s_from, s_to};
}

// A full per-horizon chain with shift 0 throughout.
GridF run_chain(DenoiserF& model, const InferenceStepping& stepping, const GridF& cond,
                const NoiseSchedule& sched, int horizon, uint64_t stream_seed,
                TransitionMode mode) {
    GridF state = draw_noise(cond.h, cond.w, stream_seed);
    Rng rng(derive_seed(stream_seed, "posterior"));
    for (int i = 0; i < stepping.count(); ++i) {
        const auto [s_from, s_to] = transition_levels(stepping, i);
        const GridF eps_hat = model.predict(state, cond, s_from, horizon, 0);
        state = reverse_transition(state, s_from, s_to, eps_hat, sched, mode, &rng);
    }
    clip01(state);
    return state;
}

struct TreeExec {
    DenoiserF& model;
    const TreePlan& plan;
    const InferenceStepping& stepping;
    const GridF& cond;
    const NoiseSchedule& sched;
    uint64_t seed;
    TransitionMode mode;
    std::vector<int> first_transition;  // per level, cumulative over segments
    std::vector<GridF>& outputs;

    void node(int level, int index, GridF state) {
        const TreeNode& n = plan.levels[static_cast<size_t>(level) - 1][static_cast<size_t>(index)];
        const int first = first_transition[static_cast<size_t>(level) - 1];
        const int last = first_transition[static_cast<size_t>(level)] - 1;
        // Sibling order and parallel execution cannot change results: each
        // node owns an RNG stream keyed by its (level, index) identity.
        Rng rng(derive_seed(seed, "node",
                            (static_cast<uint64_t>(level) << 32) | static_cast<uint64_t>(index)));
        for (int i = first; i <= last; ++i) {
            const auto [s_from, s_to] = transition_levels(stepping, i);
            // The shift is applied only on the first transition after the
            // branch; the leftmost child inherits the parent horizon, so its
            // shift is zero by construction.
            const int shift = i == first && level > 1 ? n.horizon - n.parent_horizon : 0;
            const GridF eps_hat = model.predict(state, cond, s_from, n.horizon, shift);
            state = reverse_transition(state, s_from, s_to, eps_hat, sched, mode, &rng);
        }
        if (level == plan.depth) {
            clip01(state);
            outputs[static_cast<size_t>(n.horizon)] = std::move(state);
            return;
        }
        const int fanout = plan.branching[static_cast<size_t>(level) - 1];
        for (int c = 0; c < fanout; ++c) {
            node(level + 1, index * fanout + c, state);
        }
    }
};

}  // namespace

SamplerRun run_tree(DenoiserF& model, const TreePlan& plan,
                    const InferenceStepping& stepping, const GridF& cond,
                    const NoiseSchedule& sched, uint64_t seed, TransitionMode mode) {
    const std::vector<int> segments = allocate_segments(stepping.count(), plan.depth);
    const auto start = Clock::now();
    model.reset_calls();

    SamplerRun run;
    run.sampler = "tree";
    run.seed = seed;
    run.outputs.resize(static_cast<size_t>(plan.horizons));

    std::vector<int> first(static_cast<size_t>(plan.depth) + 1, 0);
    for (int l = 0; l < plan.depth; ++l) {
        first[static_cast<size_t>(l) + 1] = first[static_cast<size_t>(l)] + segments[static_cast<size_t>(l)];
    }
    TreeExec exec{model, plan, stepping, cond, sched, seed, mode, std::move(first), run.outputs};
    exec.node(1, 0, draw_noise(cond.h, cond.w, derive_seed(seed, "init")));

    run.call_count = model.calls();
    run.wall_time_ms = elapsed_ms(start);
    return run;
}

SamplerRun run_independent(DenoiserF& model, int horizons,
                           const InferenceStepping& stepping, const GridF& cond,
                           const NoiseSchedule& sched, uint64_t seed,
                           TransitionMode mode) {
    const auto start = Clock::now();
    model.reset_calls();
    SamplerRun run;
    run.sampler = "independent";
    run.seed = seed;
    run.outputs.reserve(static_cast<size_t>(horizons));
    for (int t = 0; t < horizons; ++t) {
        run.outputs.push_back(run_chain(model, stepping, cond, sched, t,
                                        derive_seed(seed, "indep", static_cast<uint64_t>(t)),
                                        mode));
    }
    run.call_count = model.calls();
    run.wall_time_ms = elapsed_ms(start);
    return run;
}

SamplerRun run_fully_shared(DenoiserF& model, int horizons,
                            const InferenceStepping& stepping, const GridF& cond,
                            const NoiseSchedule& sched, uint64_t seed,
                            TransitionMode mode) {
    const auto start = Clock::now();
    model.reset_calls();
    SamplerRun run;
    run.sampler = "shared";
    run.seed = seed;

    // One trunk at horizon 0 down to the smallest nonzero level, then a
    // single shift-conditioned transition to level 0 per horizon.
    GridF trunk = draw_noise(cond.h, cond.w, derive_seed(seed, "init"));
    Rng rng(derive_seed(seed, "trunk"));
    for (int i = 0; i + 1 < stepping.count(); ++i) {
        const auto [s_from, s_to] = transition_levels(stepping, i);
        const GridF eps_hat = model.predict(trunk, cond, s_from, 0, 0);
        trunk = reverse_transition(trunk, s_from, s_to, eps_hat, sched, mode, &rng);
    }
    const int s_last = stepping.levels.back();
    run.outputs.reserve(static_cast<size_t>(horizons));
    for (int t = 0; t < horizons; ++t) {
        const GridF eps_hat = model.predict(trunk, cond, s_last, t, t);
        Rng leaf_rng(derive_seed(seed, "leaf", static_cast<uint64_t>(t)));
        GridF out = reverse_transition(trunk, s_last, 0, eps_hat, sched, mode, &leaf_rng);
        clip01(out);
        run.outputs.push_back(std::move(out));
    }
    run.call_count = model.calls();
    run.wall_time_ms = elapsed_ms(start);
    return run;
}

SamplerRun run_autoregressive(DenoiserF& model, int horizons,
                              const InferenceStepping& stepping, const GridF& cond,
                              const NoiseSchedule& sched, uint64_t seed,
                              TransitionMode mode) {
    const auto start = Clock::now();
    model.reset_calls();
    SamplerRun run;
    run.sampler = "autoregressive";
    run.seed = seed;
    run.outputs.reserve(static_cast<size_t>(horizons));
    const GridF* frame_cond = &cond;
    for (int t = 0; t < horizons; ++t) {
        run.outputs.push_back(run_chain(model, stepping, *frame_cond, sched, t,
                                        derive_seed(seed, "ar", static_cast<uint64_t>(t)),
                                        mode));
        frame_cond = &run.outputs.back();
    }
    run.call_count = model.calls();
    run.wall_time_ms = elapsed_ms(start);
    return run;
}

SamplerRun run_sampler(const std::string& name, DenoiserF& model, const TreePlan& plan,
                       const InferenceStepping& stepping, const GridF& cond,
                       const NoiseSchedule& sched, uint64_t seed, TransitionMode mode) {
    if (name == "tree") return run_tree(model, plan, stepping, cond, sched, seed, mode);
    if (name == "independent") {
        return run_independent(model, plan.horizons, stepping, cond, sched, seed, mode);
    }
    if (name == "shared") {
        return run_fully_shared(model, plan.horizons, stepping, cond, sched, seed, mode);
    }
    if (name == "autoregressive") {
        return run_autoregressive(model, plan.horizons, stepping, cond, sched, seed, mode);
    }
    throw UsageError("unknown sampler '" + name +
                     "' (expected tree|independent|shared|autoregressive)");
}

}  // namespace firecast
