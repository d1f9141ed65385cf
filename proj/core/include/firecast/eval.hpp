#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "firecast/dataset.hpp"
#include "firecast/model.hpp"
#include "firecast/sample.hpp"
#include "firecast/schedule.hpp"
#include "firecast/treeplan.hpp"

namespace firecast {

struct QualityMetrics {
    double rmse = 0.0;
    double mae = 0.0;
    double kl = 0.0;  // KL(target || pred), eps-smoothed, averaged over horizons
};

QualityMetrics quality(const std::vector<GridF>& pred, const std::vector<GridF>& target);

// Analytic per-call FLOPs: 2 x MACs summed over conv/affine layers. Pure
// function of the architecture, machine independent.
double flops_per_call(const DenoiserConfig& config);
double flops_estimate(const DenoiserConfig& config, int64_t calls);

struct EfficiencyReport {
    double mean_ms = 0.0;
    double std_ms = 0.0;
    int repeats = 0;
    double flops_g = 0.0;
    double params_m = 0.0;
    int64_t calls = 0;
};

struct BenchRow {
    std::string sampler;
    int d_test = 0;
    double mean_ms = 0.0;
    double std_ms = 0.0;
    int64_t calls = 0;
    double flops_g = 0.0;
};

struct SamplerFit {
    std::string sampler;
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

struct BenchReport {
    std::vector<BenchRow> rows;
    std::vector<SamplerFit> fits;
    bool tree_below_independent = true;  // at every measured d_test
};

// Wall-time scaling over d_test values; 2 warm-up runs precede the timed
// repeats (>= 3 required for a std).
BenchReport bench_scaling(DenoiserF& model, const NoiseSchedule& sched,
                          const TreePlan& plan, const GridF& cond,
                          const std::vector<std::string>& samplers,
                          const std::vector<int>& d_tests, int repeats,
                          int warmups = 2, uint64_t seed = 0);

EfficiencyReport measure_efficiency(DenoiserF& model, const NoiseSchedule& sched,
                                    const TreePlan& plan, const GridF& cond,
                                    const std::string& sampler, int d_test,
                                    int repeats, uint64_t seed = 0);

// Least-squares fit quality of y over x.
SamplerFit linear_fit(const std::string& name, const std::vector<double>& x,
                      const std::vector<double>& y);

// Synthetic moving-bump dataset in the standard layout: one Gaussian bump per
// segment translating at constant velocity, rasterized through the risk-map
// kernel path and normalized with the training-split constant.
struct SyntheticSpec {
    int num_segments = 6;
    int horizons = 9;
    int height = 16;
    int width = 16;
    double sigma_px = 1.5;
    bool stationary = false;  // zero velocity: every frame repeats the first
    uint64_t seed = 0;
    SplitRatios ratios;
};

SegmentDataset make_synthetic_dataset(const SyntheticSpec& spec);

}  // namespace firecast
