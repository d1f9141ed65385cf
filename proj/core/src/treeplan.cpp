#include "firecast/treeplan.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "firecast/errors.hpp"

namespace firecast {

namespace {

// Integer r with r^exponent == value, or 0 if none exists.
int integer_root(int value, int exponent) {
    if (exponent <= 0) return 0;
    if (value == 1) return 1;
    const double guess = std::pow(static_cast<double>(value), 1.0 / exponent);
    for (int r = std::max(1, static_cast<int>(guess) - 1);
         r <= static_cast<int>(guess) + 1; ++r) {
        int64_t p = 1;
        for (int i = 0; i < exponent; ++i) p *= r;
        if (p == value) return r;
    }
    return 0;
}

std::vector<int> prime_factors_desc(int value) {
    std::vector<int> primes;
    int n = value;
    for (int p = 2; static_cast<int64_t>(p) * p <= n; ++p) {
        while (n % p == 0) {
            primes.push_back(p);
            n /= p;
        }
    }
    if (n > 1) primes.push_back(n);
    std::sort(primes.begin(), primes.end(), std::greater<int>());
    return primes;
}

}  // namespace

std::vector<int> solve_branching(int horizons, int depth) {
    if (horizons < 1) throw NumericError("solve_branching: horizons must be >= 1");
    if (depth < 2) {
        throw NumericError(
            "solve_branching: depth must be >= 2; a single-layer configuration is "
            "the fully shared sampler, not a tree plan");
    }
    const int factors = depth - 1;
    if (const int n = integer_root(horizons, factors); n > 0) {
        return std::vector<int>(static_cast<size_t>(factors), n);
    }
    // Mixed radix: group the largest primes into the first factor so the
    // vector is descending, pad with 1s when there are fewer primes than
    // factor slots.
    std::vector<int> primes = prime_factors_desc(horizons);
    std::vector<int> branching;
    if (static_cast<int>(primes.size()) >= factors) {
        const size_t grouped = primes.size() - static_cast<size_t>(factors) + 1;
        int head = 1;
        for (size_t i = 0; i < grouped; ++i) head *= primes[i];
        branching.push_back(head);
        for (size_t i = grouped; i < primes.size(); ++i) branching.push_back(primes[i]);
    } else {
        branching = primes;
        branching.resize(static_cast<size_t>(factors), 1);
    }
    return branching;
}

std::vector<int> allocate_segments(int total_steps, int depth) {
    if (depth < 1) throw NumericError("allocate_segments: depth must be >= 1");
    if (total_steps < depth) {
        throw NumericError("allocate_segments: fewer steps than segments");
    }
    const int base = total_steps / depth;
    const int remainder = total_steps % depth;
    std::vector<int> segments(static_cast<size_t>(depth), base);
    for (int i = 0; i < remainder; ++i) segments[static_cast<size_t>(i)] += 1;
    return segments;
}

TreePlan build_plan(int horizons, int depth, int total_steps) {
    TreePlan plan;
    plan.horizons = horizons;
    plan.depth = depth;
    plan.total_steps = total_steps;
    plan.branching = solve_branching(horizons, depth);
    plan.segment_steps = allocate_segments(total_steps, depth);

    TreeNode root;
    root.level = 1;
    root.horizon = 0;
    root.parent_horizon = 0;
    root.block_lo = 0;
    root.block_hi = horizons - 1;
    root.parent = -1;
    plan.levels.push_back({root});

    for (int level = 2; level <= depth; ++level) {
        const int fanout = plan.branching[static_cast<size_t>(level) - 2];
        const auto& parents = plan.levels.back();
        std::vector<TreeNode> children;
        children.reserve(parents.size() * static_cast<size_t>(fanout));
        for (size_t pi = 0; pi < parents.size(); ++pi) {
            const TreeNode& p = parents[pi];
            const int block = p.block_hi - p.block_lo + 1;
            const int sub = block / fanout;  // divisibility guaranteed by branching
            for (int c = 0; c < fanout; ++c) {
                TreeNode child;
                child.level = level;
                child.block_lo = p.block_lo + c * sub;
                child.block_hi = child.block_lo + sub - 1;
                child.horizon = child.block_lo;
                child.parent_horizon = p.horizon;
                child.parent = static_cast<int>(pi);
                children.push_back(child);
            }
        }
        plan.levels.push_back(std::move(children));
    }
    return plan;
}

int64_t count_calls_with_segments(const TreePlan& plan,
                                  const std::vector<int>& segment_steps) {
    if (static_cast<int>(segment_steps.size()) != plan.depth) {
        throw NumericError("count_calls_with_segments: segment count != plan depth");
    }
    int64_t total = 0;
    for (int level = 1; level <= plan.depth; ++level) {
        total += static_cast<int64_t>(plan.nodes_at_level(level)) *
                 segment_steps[static_cast<size_t>(level) - 1];
    }
    return total;
}

CostReport count_calls(const TreePlan& plan) {
    CostReport report;
    report.calls_nt = count_calls_with_segments(plan, plan.segment_steps);
    report.calls_traditional =
        static_cast<int64_t>(plan.horizons) * plan.total_steps;
    report.calls_shared = static_cast<int64_t>(plan.total_steps) + plan.horizons;
    report.reduction_exact =
        static_cast<double>(report.calls_traditional) / static_cast<double>(report.calls_nt);

    report.uniform = std::all_of(plan.branching.begin(), plan.branching.end(),
                                 [&](int n) { return n == plan.branching.front(); });
    if (report.uniform && !plan.branching.empty()) {
        const int n = plan.branching.front();
        // Geometric-series cross-check: (N^L - 1)/(N - 1) * D/L must equal the
        // level sum exactly whenever the segments are equal.
        if (n > 1 && plan.total_steps % plan.depth == 0) {
            int64_t pow_nl = 1;
            for (int i = 0; i < plan.depth; ++i) pow_nl *= n;
            const int64_t closed =
                (pow_nl - 1) / (n - 1) * (plan.total_steps / plan.depth);
            if (closed != report.calls_nt) {
                throw NumericError("count_calls: level sum disagrees with closed form");
            }
        }
        report.reduction_closed_form =
            reduction_from_branching(plan.horizons, n, plan.depth);
        report.reduction_approx = reduction_approx(n, plan.depth);
    } else {
        report.reduction_closed_form = std::numeric_limits<double>::quiet_NaN();
        report.reduction_approx = std::numeric_limits<double>::quiet_NaN();
    }
    return report;
}

double reduction_from_branching(int horizons, int n, int depth) {
    // R = L (N-1) (T+1) / (N (T+1) - 1)
    return static_cast<double>(depth) * (n - 1) * horizons /
           (static_cast<double>(n) * horizons - 1.0);
}

double reduction_from_depth(int horizons, int depth) {
    // R(L) = L (T+1) ((T+1)^{1/(L-1)} - 1) / ((T+1)^{L/(L-1)} - 1)
    const double tp1 = static_cast<double>(horizons);
    const double root = std::pow(tp1, 1.0 / (depth - 1));
    return depth * tp1 * (root - 1.0) / (std::pow(tp1, static_cast<double>(depth) / (depth - 1)) - 1.0);
}

double reduction_approx(int n, int depth) {
    return static_cast<double>(depth) * (1.0 - 1.0 / n);
}

std::vector<ReductionRow> reduction_curve(int horizons, int total_steps,
                                          int depth_min, int depth_max) {
    std::vector<ReductionRow> rows;
    for (int depth = depth_min; depth <= depth_max; ++depth) {
        ReductionRow row;
        row.depth = depth;
        if (depth < 2 || total_steps < depth) {
            row.constructible = false;
            rows.push_back(std::move(row));
            continue;
        }
        row.constructible = true;
        TreePlan plan = build_plan(horizons, depth, total_steps);
        CostReport report = count_calls(plan);
        row.branching = plan.branching;
        row.uniform = report.uniform;
        row.r_exact = report.reduction_exact;
        row.r_closed = report.uniform ? reduction_from_depth(horizons, depth)
                                      : std::numeric_limits<double>::quiet_NaN();
        row.r_approx = report.reduction_approx;
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace firecast
