#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace firecast {

// One node of the branching hierarchy. Horizons covered by the node form the
// contiguous block [block_lo, block_hi]; the node's own horizon is block_lo,
// so the leftmost child of any node continues the parent horizon (delta 0).
struct TreeNode {
    int level = 1;            // 1-based hierarchy level
    int horizon = 0;          // t assigned to this node's trajectory segment
    int parent_horizon = 0;   // t_p (equals horizon for the root)
    int block_lo = 0;
    int block_hi = 0;
    int parent = -1;          // index into the previous level's node list
};

// Full branching structure for one (horizons, depth, steps) configuration.
struct TreePlan {
    int horizons = 0;                 // T + 1 leaves
    int depth = 0;                    // L hierarchy levels
    int total_steps = 0;              // D reverse steps the plan was built for
    std::vector<int> branching;       // n_1..n_{L-1}, product = horizons
    std::vector<int> segment_steps;   // d_1..d_L, sum = total_steps
    std::vector<std::vector<TreeNode>> levels;  // levels[l-1] = nodes at level l

    int nodes_at_level(int level) const {
        return static_cast<int>(levels[static_cast<size_t>(level) - 1].size());
    }
    const std::vector<TreeNode>& leaves() const { return levels.back(); }
};

// Per-level branching factors whose product is `horizons`. Returns the
// uniform vector (N,...,N) when horizons has an integer (depth-1)-th root,
// otherwise a mixed-radix vector sorted descending and padded with 1s.
std::vector<int> solve_branching(int horizons, int depth);

// Split `total_steps` reverse steps into `depth` segments: floor(D/L) each,
// remainder added to the front segments (earliest = most shared).
std::vector<int> allocate_segments(int total_steps, int depth);

TreePlan build_plan(int horizons, int depth, int total_steps);

// Denoiser-call accounting for a plan and the analytic baselines.
struct CostReport {
    int64_t calls_nt = 0;           // level-sum over the plan
    int64_t calls_traditional = 0;  // (T+1) * D, fully independent
    int64_t calls_shared = 0;       // D + (T+1), fully shared reference
    double reduction_exact = 0.0;   // calls_traditional / calls_nt
    double reduction_closed_form = 0.0;  // NaN when branching is non-uniform
    double reduction_approx = 0.0;       // L * (1 - 1/N); NaN when non-uniform
    bool uniform = false;
};

CostReport count_calls(const TreePlan& plan);

// Level-sum call count under a different per-segment step allocation, e.g.
// the inference stepping's allocation over d_test.
int64_t count_calls_with_segments(const TreePlan& plan, const std::vector<int>& segment_steps);

// Closed-form reduction factor for a uniform tree with branching factor n.
double reduction_from_branching(int horizons, int n, int depth);

// Closed-form reduction as a function of depth alone, via the real
// (depth-1)-th root of `horizons`.
double reduction_from_depth(int horizons, int depth);

// Large-horizon approximation L * (1 - 1/N).
double reduction_approx(int n, int depth);

struct ReductionRow {
    int depth = 0;
    bool constructible = false;
    bool uniform = false;
    std::vector<int> branching;
    double r_exact = 0.0;
    double r_closed = 0.0;  // NaN for non-uniform rows
    double r_approx = 0.0;  // NaN for non-uniform rows
};

// Sweep depths in [depth_min, depth_max]; non-constructible depths are
// flagged rather than fatal.
std::vector<ReductionRow> reduction_curve(int horizons, int total_steps,
                                          int depth_min, int depth_max);

}  // namespace firecast
