#include "firecast/eval.hpp"

#include <algorithm>
#include <cmath>

#include "firecast/frm.hpp"
#include "firecast/log.hpp"

namespace firecast {

QualityMetrics quality(const std::vector<GridF>& pred, const std::vector<GridF>& target) {
    if (pred.size() != target.size() || pred.empty()) {
        throw NumericError("quality: prediction/target horizon count mismatch");
    }
    QualityMetrics q;
    double sq = 0.0, ab = 0.0;
    size_t count = 0;
    for (size_t t = 0; t < pred.size(); ++t) {
        require_same_shape(pred[t], target[t], "quality");
        for (size_t i = 0; i < pred[t].size(); ++i) {
            const double d = static_cast<double>(pred[t].v[i]) - target[t].v[i];
            if (!std::isfinite(d)) throw NumericError("quality: non-finite value");
            sq += d * d;
            ab += std::abs(d);
            ++count;
        }
    }
    q.rmse = std::sqrt(sq / static_cast<double>(count));
    q.mae = ab / static_cast<double>(count);

    constexpr double kEps = 1e-8;
    double kl_acc = 0.0;
    for (size_t t = 0; t < pred.size(); ++t) {
        double sum_p = 0.0, sum_q = 0.0;
        for (size_t i = 0; i < pred[t].size(); ++i) {
            sum_p += target[t].v[i] + kEps;
            sum_q += pred[t].v[i] + kEps;
        }
        double kl = 0.0;
        for (size_t i = 0; i < pred[t].size(); ++i) {
            const double p = (target[t].v[i] + kEps) / sum_p;
            const double qv = (pred[t].v[i] + kEps) / sum_q;
            kl += p * std::log(p / qv);
        }
        kl_acc += kl;
    }
    q.kl = kl_acc / static_cast<double>(pred.size());
    return q;
}

double flops_per_call(const DenoiserConfig& config) {
    double total = 0.0;
    for (const LayerCost& layer : layer_costs(config)) {
        total += 2.0 * static_cast<double>(layer.macs());
    }
    return total;
}

double flops_estimate(const DenoiserConfig& config, int64_t calls) {
    return flops_per_call(config) * static_cast<double>(calls);
}

SamplerFit linear_fit(const std::string& name, const std::vector<double>& x,
                      const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw NumericError("linear_fit: need at least two points");
    }
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    SamplerFit fit;
    fit.sampler = name;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        const double e = y[i] - (fit.intercept + fit.slope * x[i]);
        ss_res += e * e;
    }
    fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    return fit;
}

namespace {

struct Timing {
    double mean_ms = 0.0;
    double std_ms = 0.0;
    int64_t calls = 0;
};

Timing time_sampler(const std::string& name, DenoiserF& model,
                    const NoiseSchedule& sched, const TreePlan& plan,
                    const GridF& cond, int d_test, int repeats, int warmups,
                    uint64_t seed) {
    const InferenceStepping stepping = subsample_levels(sched.steps(), d_test);
    for (int i = 0; i < warmups; ++i) {
        run_sampler(name, model, plan, stepping, cond, sched, seed);
    }
    std::vector<double> times;
    times.reserve(static_cast<size_t>(repeats));
    Timing timing;
    for (int i = 0; i < repeats; ++i) {
        const SamplerRun run = run_sampler(name, model, plan, stepping, cond, sched, seed);
        times.push_back(run.wall_time_ms);
        timing.calls = run.call_count;
    }
    double mean = 0.0;
    for (double t : times) mean += t;
    mean /= static_cast<double>(times.size());
    double var = 0.0;
    for (double t : times) var += (t - mean) * (t - mean);
    var /= static_cast<double>(times.size() - 1);
    timing.mean_ms = mean;
    timing.std_ms = std::sqrt(var);
    return timing;
}

}  // namespace

BenchReport bench_scaling(DenoiserF& model, const NoiseSchedule& sched,
                          const TreePlan& plan, const GridF& cond,
                          const std::vector<std::string>& samplers,
                          const std::vector<int>& d_tests, int repeats, int warmups,
                          uint64_t seed) {
    if (repeats < 3) throw UsageError("bench_scaling: repeats must be >= 3");
    BenchReport report;
    const double per_call_gflops = flops_per_call(model.config()) / 1e9;
    for (const std::string& name : samplers) {
        std::vector<double> xs, ys;
        for (int d_test : d_tests) {
            const Timing t = time_sampler(name, model, sched, plan, cond, d_test,
                                          repeats, warmups, seed);
            report.rows.push_back({name, d_test, t.mean_ms, t.std_ms, t.calls,
                                   per_call_gflops * static_cast<double>(t.calls)});
            xs.push_back(static_cast<double>(d_test));
            ys.push_back(t.mean_ms);
        }
        if (xs.size() >= 2) report.fits.push_back(linear_fit(name, xs, ys));
    }
    for (int d_test : d_tests) {
        double tree_ms = -1.0, indep_ms = -1.0;
        for (const BenchRow& row : report.rows) {
            if (row.d_test != d_test) continue;
            if (row.sampler == "tree") tree_ms = row.mean_ms;
            if (row.sampler == "independent") indep_ms = row.mean_ms;
        }
        if (tree_ms >= 0.0 && indep_ms >= 0.0 && tree_ms >= indep_ms) {
            report.tree_below_independent = false;
        }
    }
    return report;
}

EfficiencyReport measure_efficiency(DenoiserF& model, const NoiseSchedule& sched,
                                    const TreePlan& plan, const GridF& cond,
                                    const std::string& sampler, int d_test,
                                    int repeats, uint64_t seed) {
    if (repeats < 3) throw UsageError("measure_efficiency: repeats must be >= 3");
    const Timing t =
        time_sampler(sampler, model, sched, plan, cond, d_test, repeats, 2, seed);
    EfficiencyReport report;
    report.mean_ms = t.mean_ms;
    report.std_ms = t.std_ms;
    report.repeats = repeats;
    report.calls = t.calls;
    report.flops_g = flops_estimate(model.config(), t.calls) / 1e9;
    report.params_m = static_cast<double>(model.param_count()) / 1e6;
    return report;
}

SegmentDataset make_synthetic_dataset(const SyntheticSpec& spec) {
    if (spec.height < 16 || spec.width < 16) {
        throw UsageError("make_synthetic_dataset: resolution must be at least 16x16");
    }
    if (spec.num_segments < 1 || spec.horizons < 1) {
        throw UsageError("make_synthetic_dataset: need at least one segment and horizon");
    }
    const int seg_len = spec.horizons + 1;
    const int num_days = spec.num_segments * seg_len;

    // Keep bump centers inside a margin so the mass stays on the grid; the
    // 4-sigma margin shrinks on grids too small to honor it.
    const double margin =
        std::min({4.0 * spec.sigma_px, (spec.width - 1) / 2.0 - 1.0,
                  (spec.height - 1) / 2.0 - 1.0});
    Rng rng(derive_seed(spec.seed, "synth"));
    auto draw_point = [&](double lo_x, double hi_x, double lo_y, double hi_y) {
        return std::pair{lo_x + rng.uniform() * (hi_x - lo_x),
                         lo_y + rng.uniform() * (hi_y - lo_y)};
    };

    std::vector<RiskMap> maps;
    maps.reserve(static_cast<size_t>(num_days));
    for (int seg = 0; seg < spec.num_segments; ++seg) {
        const auto [sx, sy] = draw_point(margin, spec.width - 1 - margin, margin,
                                         spec.height - 1 - margin);
        const auto [ex, ey] = draw_point(margin, spec.width - 1 - margin, margin,
                                         spec.height - 1 - margin);
        const double vx = spec.stationary ? 0.0 : (ex - sx) / spec.horizons;
        const double vy = spec.stationary ? 0.0 : (ey - sy) / spec.horizons;
        for (int f = 0; f < seg_len; ++f) {
            KernelSpec kernel{sx + f * vx, sy + f * vy, spec.sigma_px, spec.sigma_px};
            RiskMap map;
            map.day_index = seg * seg_len + f;
            map.grid = rasterize_kernel(kernel, spec.height, spec.width);
            maps.push_back(std::move(map));
        }
    }

    // Day-level chronological boundaries aligned to segment starts, so each
    // 1+horizons window sits entirely inside one split.
    const int train_segs = std::max(1, static_cast<int>(spec.num_segments * spec.ratios.train));
    const int val_segs = static_cast<int>(spec.num_segments * spec.ratios.val);
    const int test_segs = spec.num_segments - train_segs - val_segs;

    std::vector<int> train_days;
    for (int d = 0; d < train_segs * seg_len; ++d) train_days.push_back(d);
    const double constant = normalize_dataset(maps, train_days);

    SegmentDataset data;
    data.horizons = spec.horizons;
    data.segment_length = seg_len;
    data.normalization_constant = constant;
    data.frames.reserve(maps.size());
    for (RiskMap& m : maps) data.frames.push_back(std::move(m.grid));

    const std::array<std::string, 3> names = {"train", "val", "test"};
    const std::array<int, 3> counts = {train_segs, val_segs, test_segs};
    int seg_cursor = 0;
    for (size_t i = 0; i < 3; ++i) {
        data.splits[i].split = names[i];
        data.splits[i].begin_day = seg_cursor * seg_len;
        data.splits[i].end_day = (seg_cursor + counts[i]) * seg_len;
        for (int s = 0; s < counts[i]; ++s) {
            data.splits[i].segments.push_back({(seg_cursor + s) * seg_len, seg_len});
        }
        seg_cursor += counts[i];
        if (data.splits[i].segments.empty()) {
            log::warn("make_synthetic_dataset: split '" + names[i] + "' is empty");
        }
    }
    data.validate();
    return data;
}

}  // namespace firecast
