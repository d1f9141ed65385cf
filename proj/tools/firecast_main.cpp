// firecast: long-horizon wildfire-risk forecasting with tree-structured
// diffusion sampling. Subcommands cover the full pipeline: data building,
// tree planning, training, sampling, evaluation, benchmarking, rendering.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "firecast/config.hpp"
#include "firecast/errors.hpp"
#include "firecast/eval.hpp"
#include "firecast/io.hpp"
#include "firecast/log.hpp"
#include "firecast/render.hpp"
#include "firecast/sample.hpp"
#include "firecast/train.hpp"

namespace fc = firecast;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonArgs {
    std::string config_path;
    std::vector<std::string> overrides;
    bool seed_set = false;
    uint64_t seed = 0;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "Experiment config JSON");
    cmd->add_option("--set", args.overrides,
                    "Override a config value, dotted.path=value (repeatable)");
    cmd->add_option("--seed", args.seed, "Root RNG seed")
        ->each([&args](const std::string&) { args.seed_set = true; });
}

fc::ExperimentConfig resolve_config(const CommonArgs& args) {
    json j = fc::to_json(fc::ExperimentConfig{});
    if (!args.config_path.empty()) {
        j = fc::to_json(fc::load_config(args.config_path));
    }
    for (const std::string& assignment : args.overrides) {
        fc::apply_override(j, assignment);
    }
    fc::ExperimentConfig config = fc::config_from_json(j);
    if (args.seed_set) config.seed = args.seed;
    return config;
}

fc::SegmentDataset build_real_dataset(const fc::ExperimentConfig& config) {
    if (config.data.csv_path.empty()) {
        throw fc::UsageError("build-data: no csv_path configured and synthetic mode off");
    }
    std::ifstream csv(config.data.csv_path);
    if (!csv) throw fc::DataError("build-data: cannot open csv " + config.data.csv_path);

    fc::ParseStats stats;
    const auto days = fc::parse_events(csv, config.data.bbox, config.data.columns,
                                       config.data.min_confidence, &stats);
    fc::log::info("parsed " + std::to_string(stats.kept) + " events over " +
                  std::to_string(days.size()) + " days (" +
                  std::to_string(stats.skipped_malformed) + " rows skipped)");

    const fc::GeoTransform geo{config.data.bbox, config.data.resolution_h,
                               config.data.resolution_w};
    std::vector<fc::RiskMap> maps;
    maps.reserve(days.size());
    for (const auto& day : days) {
        maps.push_back(fc::build_frm(day, geo, config.data.sigma,
                                     config.data.kernel_cutoff_sigmas));
    }

    auto splits = fc::build_segment_index(static_cast<int>(days.size()),
                                          config.data.ratios, config.data.segment_length);
    std::vector<int> train_days;
    for (int d = splits[0].begin_day; d < splits[0].end_day; ++d) train_days.push_back(d);
    const double constant =
        fc::normalize_dataset(maps, train_days, config.data.normalization_percentile);

    fc::SegmentDataset data;
    data.horizons = config.data.segment_length - 1;
    data.segment_length = config.data.segment_length;
    data.normalization_constant = constant;
    data.bbox = config.data.bbox;
    data.splits = std::move(splits);
    data.frames.reserve(maps.size());
    for (auto& m : maps) data.frames.push_back(std::move(m.grid));
    data.validate();
    return data;
}

int cmd_build_data(const CommonArgs& args, const std::string& out_dir) {
    const fc::ExperimentConfig config = resolve_config(args);
    const fs::path out = out_dir.empty() ? config.paths.dataset_dir : out_dir;

    fc::SegmentDataset data;
    if (config.data.synthetic.enabled) {
        fc::SyntheticSpec spec;
        spec.num_segments = config.data.synthetic.num_segments;
        spec.horizons = config.data.segment_length - 1;
        spec.height = config.data.resolution_h;
        spec.width = config.data.resolution_w;
        spec.sigma_px = config.data.synthetic.sigma_px;
        spec.seed = fc::derive_seed(config.seed, "data");
        spec.ratios = config.data.ratios;
        data = fc::make_synthetic_dataset(spec);
        data.bbox = config.data.bbox;
    } else {
        data = build_real_dataset(config);
    }
    fc::write_dataset(out, data);
    fc::write_run_manifest(out / "run_manifest.json", "build-data", config.seed,
                           fc::config_hash(config),
                           json{{"num_days", data.num_days()},
                                {"normalization_constant", data.normalization_constant}},
                           fc::to_json(config));
    std::printf("wrote %d days to %s (normalization constant %.6g)\n", data.num_days(),
                out.string().c_str(), data.normalization_constant);
    return 0;
}

int cmd_plan_tree(const CommonArgs& args, int horizons_flag, int depth_flag,
                  int steps_flag, bool curve, const std::string& json_out) {
    const fc::ExperimentConfig config = resolve_config(args);
    const int horizons = horizons_flag > 0 ? horizons_flag : config.horizons();
    const int depth = depth_flag > 0 ? depth_flag : config.tree.depth;
    const int steps = steps_flag > 0 ? steps_flag : config.diffusion.d_train;

    const fc::TreePlan plan = fc::build_plan(horizons, depth, steps);
    const fc::CostReport report = fc::count_calls(plan);

    std::printf("tree plan: %d horizons, depth %d, %d reverse steps\n", horizons, depth,
                steps);
    std::printf("  branching:");
    for (int n : plan.branching) std::printf(" %d", n);
    std::printf("\n  segment steps:");
    for (int d : plan.segment_steps) std::printf(" %d", d);
    std::printf("\n  level nodes:");
    for (int l = 1; l <= plan.depth; ++l) std::printf(" %d", plan.nodes_at_level(l));
    std::printf("\n  calls_nt          = %lld\n", static_cast<long long>(report.calls_nt));
    std::printf("  calls_traditional = %lld\n",
                static_cast<long long>(report.calls_traditional));
    std::printf("  calls_shared      = %lld\n", static_cast<long long>(report.calls_shared));
    std::printf("  R (exact)         = %.6g\n", report.reduction_exact);
    if (report.uniform) {
        std::printf("  R (closed form)   = %.6g\n", report.reduction_closed_form);
        std::printf("  R (approx)        = %.6g\n", report.reduction_approx);
    }

    json j = fc::tree_plan_json(plan, report);
    if (curve) {
        json rows = json::array();
        std::printf("\n  depth sweep (steps=%d):\n", steps);
        for (const auto& row : fc::reduction_curve(horizons, steps, 2, 8)) {
            if (!row.constructible) {
                std::printf("    L=%d  (not constructible)\n", row.depth);
                rows.push_back({{"depth", row.depth}, {"constructible", false}});
                continue;
            }
            std::printf("    L=%d  branching=(", row.depth);
            for (size_t i = 0; i < row.branching.size(); ++i) {
                std::printf(i ? ",%d" : "%d", row.branching[i]);
            }
            std::printf(")  R_exact=%.4f", row.r_exact);
            if (row.uniform) {
                std::printf("  R_closed=%.4f  R_approx=%.4f", row.r_closed, row.r_approx);
            }
            std::printf("\n");
            json rj{{"depth", row.depth},
                    {"constructible", true},
                    {"uniform", row.uniform},
                    {"branching", row.branching},
                    {"r_exact", row.r_exact}};
            if (row.uniform) {
                rj["r_closed"] = row.r_closed;
                rj["r_approx"] = row.r_approx;
            }
            rows.push_back(std::move(rj));
        }
        j["depth_sweep"] = rows;
    }
    if (!json_out.empty()) {
        std::ofstream out(json_out);
        if (!out) throw fc::DataError("plan-tree: cannot write " + json_out);
        out << j.dump(2) << "\n";
    }
    return 0;
}

struct LoadedCheckpoint {
    fc::CheckpointManifest manifest;
    fc::DenoiserF model;
};

LoadedCheckpoint load_checkpoint(const std::string& params_path) {
    const fs::path p(params_path);
    const fs::path manifest_path = p.parent_path() / (p.stem().string() + ".json");
    fc::CheckpointManifest manifest = fc::read_checkpoint_manifest(manifest_path);
    LoadedCheckpoint loaded{manifest, fc::DenoiserF(manifest.denoiser)};
    std::vector<float> w = fc::load_params(p);
    if (static_cast<int>(w.size()) != loaded.model.param_count()) {
        throw fc::DataError("checkpoint parameter count does not match manifest config");
    }
    loaded.model.params().w = std::move(w);
    return loaded;
}

void write_manifest_for(const fs::path& dir, const fc::ExperimentConfig& config,
                        const fc::SegmentDataset& data, const fc::TreePlan& plan,
                        int64_t step, const std::string& stem) {
    fc::CheckpointManifest m;
    m.denoiser = config.model;
    m.d_train = config.diffusion.d_train;
    m.beta_start = config.diffusion.beta_start;
    m.beta_end = config.diffusion.beta_end;
    m.horizons = plan.horizons;
    m.tree_depth = plan.depth;
    m.normalization_constant = data.normalization_constant;
    m.training_step = step;
    fc::write_checkpoint_manifest(dir / (stem + ".json"), m);
}

int cmd_train(const CommonArgs& args, const std::string& dataset_dir,
              const std::string& out_dir) {
    fc::ExperimentConfig config = resolve_config(args);
    const fs::path data_dir = dataset_dir.empty() ? config.paths.dataset_dir : dataset_dir;
    if (!fs::exists(data_dir / "manifest.json")) {
        throw fc::DataError("train: dataset not found at " + data_dir.string() +
                            " (run build-data first)");
    }
    const fc::SegmentDataset data = fc::read_dataset(data_dir);
    if (config.model.height != data.height() || config.model.width != data.width()) {
        fc::log::warn("train: adopting dataset resolution " + std::to_string(data.height()) +
                      "x" + std::to_string(data.width()));
        config.model.height = data.height();
        config.model.width = data.width();
    }

    fc::DenoiserF model(config.model);
    fc::Rng init_rng(fc::derive_seed(config.seed, "init"));
    model.init_params(init_rng);

    const fc::NoiseSchedule sched = fc::make_linear_schedule(
        config.diffusion.d_train, config.diffusion.beta_start, config.diffusion.beta_end);
    const fc::TreePlan plan =
        fc::build_plan(data.horizons, config.tree.depth, config.diffusion.d_train);

    fc::TrainOptions options;
    options.epochs = config.train.epochs;
    options.batch_size = config.train.batch_size;
    options.lr_max = config.train.lr_max;
    options.lr_min = config.train.lr_min;
    options.weight_decay = config.train.weight_decay;
    options.p_tree = config.train.p_tree;
    options.seed = fc::derive_seed(config.seed, "train");
    options.d_test = config.diffusion.d_test;
    options.val_interval = config.train.val_interval;
    options.val_segments = config.train.val_segments;
    options.checkpoint_interval = config.train.checkpoint_interval;
    options.checkpoint_dir = out_dir.empty() ? config.paths.checkpoint_dir : out_dir;
    options.metrics_log = options.checkpoint_dir / "metrics.jsonl";
    fs::create_directories(options.checkpoint_dir);
    fs::remove(options.metrics_log);

    const fc::TrainResult result = fc::train_loop(model, data, plan, sched, options);

    write_manifest_for(options.checkpoint_dir, config, data, plan, result.steps, "last");
    if (!result.best_checkpoint.empty()) {
        write_manifest_for(options.checkpoint_dir, config, data, plan,
                           result.best_step > 0 ? result.best_step : result.steps, "best");
    }
    fc::write_run_manifest(options.checkpoint_dir / "run_manifest.json", "train",
                           config.seed, fc::config_hash(config),
                           json{{"steps", result.steps},
                                {"untrained_val_rmse", result.untrained_val_rmse},
                                {"best_val_rmse", result.best_val_rmse},
                                {"final_val_rmse", result.final_val_rmse}},
                           fc::to_json(config));
    std::printf("trained %lld steps; val rmse %.6g -> best %.6g\n",
                static_cast<long long>(result.steps), result.untrained_val_rmse,
                result.best_val_rmse);
    return 0;
}

int cmd_sample(const CommonArgs& args, const std::string& checkpoint,
               const std::string& dataset_dir, int day, const std::string& sampler,
               const std::string& out_dir) {
    const fc::ExperimentConfig config = resolve_config(args);
    LoadedCheckpoint loaded = load_checkpoint(checkpoint);

    const fs::path data_dir = dataset_dir.empty() ? config.paths.dataset_dir : dataset_dir;
    if (!fs::exists(data_dir / "manifest.json")) {
        throw fc::DataError("sample: dataset not found at " + data_dir.string());
    }
    const fc::SegmentDataset data = fc::read_dataset(data_dir);
    if (day < 0 || day >= data.num_days()) {
        throw fc::UsageError("sample: conditioning day out of range");
    }
    if (loaded.manifest.denoiser.height != data.height() ||
        loaded.manifest.denoiser.width != data.width()) {
        throw fc::DataError("sample: checkpoint resolution does not match dataset");
    }

    const fc::NoiseSchedule sched = fc::make_linear_schedule(
        loaded.manifest.d_train, loaded.manifest.beta_start, loaded.manifest.beta_end);
    const fc::TreePlan plan = fc::build_plan(loaded.manifest.horizons,
                                             loaded.manifest.tree_depth,
                                             loaded.manifest.d_train);
    const fc::InferenceStepping stepping =
        fc::subsample_levels(loaded.manifest.d_train, config.diffusion.d_test);
    const fc::TransitionMode mode = config.diffusion.stochastic
                                        ? fc::TransitionMode::stochastic
                                        : fc::TransitionMode::deterministic;

    const fc::SamplerRun run =
        fc::run_sampler(sampler, loaded.model, plan, stepping,
                        data.frames[static_cast<size_t>(day)], sched, config.seed, mode);

    const fs::path out = out_dir.empty() ? fs::path(config.paths.output_dir) : fs::path(out_dir);
    fs::create_directories(out);
    for (size_t t = 0; t < run.outputs.size(); ++t) {
        fc::RiskMap map;
        map.day_index = static_cast<int>(t);  // horizon index in the output dir
        map.grid = run.outputs[t];
        map.normalization_constant =
            static_cast<float>(loaded.manifest.normalization_constant);
        fc::write_frm(out, map, data.bbox);
    }
    fc::write_run_manifest(
        out / "run_manifest.json", "sample", config.seed, fc::config_hash(config),
        json{{"sampler", run.sampler},
             {"plan", fc::tree_plan_json(plan, fc::count_calls(plan))},
             {"call_counter", run.call_count},
             {"wall_time_ms", run.wall_time_ms},
             {"seed", run.seed},
             {"conditioning_day", day},
             {"d_test", config.diffusion.d_test}},
        fc::to_json(config));
    std::printf("%s sampler: %lld denoiser calls, %.2f ms, %zu horizons -> %s\n",
                run.sampler.c_str(), static_cast<long long>(run.call_count),
                run.wall_time_ms, run.outputs.size(), out.string().c_str());
    return 0;
}

int cmd_evaluate(const CommonArgs& args, const std::string& checkpoint,
                 const std::string& dataset_dir, const std::string& split_name,
                 const std::string& sampler, int max_segments,
                 const std::string& json_out, const std::string& render_dir) {
    const fc::ExperimentConfig config = resolve_config(args);
    LoadedCheckpoint loaded = load_checkpoint(checkpoint);
    const fs::path data_dir = dataset_dir.empty() ? config.paths.dataset_dir : dataset_dir;
    const fc::SegmentDataset data = fc::read_dataset(data_dir);
    if (loaded.manifest.denoiser.height != data.height() ||
        loaded.manifest.denoiser.width != data.width()) {
        throw fc::DataError("evaluate: checkpoint resolution does not match dataset");
    }

    const fc::SegmentIndex* split = nullptr;
    for (const auto& s : data.splits) {
        if (s.split == split_name) split = &s;
    }
    if (!split) throw fc::UsageError("evaluate: unknown split '" + split_name + "'");
    if (split->segments.empty()) {
        throw fc::DataError("evaluate: split '" + split_name + "' holds no segments");
    }

    const fc::NoiseSchedule sched = fc::make_linear_schedule(
        loaded.manifest.d_train, loaded.manifest.beta_start, loaded.manifest.beta_end);
    const fc::TreePlan plan = fc::build_plan(loaded.manifest.horizons,
                                             loaded.manifest.tree_depth,
                                             loaded.manifest.d_train);
    const fc::InferenceStepping stepping =
        fc::subsample_levels(loaded.manifest.d_train, config.diffusion.d_test);

    const int count =
        std::min<int>(max_segments, static_cast<int>(split->segments.size()));
    fc::QualityMetrics mean;
    int64_t calls = 0;
    for (int i = 0; i < count; ++i) {
        const fc::Segment& seg = split->segments[static_cast<size_t>(i)];
        const fc::SamplerRun run = fc::run_sampler(
            sampler, loaded.model, plan, stepping, data.conditioning(seg), sched,
            fc::derive_seed(config.seed, "evalseg", static_cast<uint64_t>(i)));
        const fc::QualityMetrics q = fc::quality(run.outputs, data.targets(seg));
        mean.rmse += q.rmse;
        mean.mae += q.mae;
        mean.kl += q.kl;
        calls += run.call_count;
        if (i == 0 && !render_dir.empty()) {
            fs::create_directories(render_dir);
            char name[64];
            for (size_t t = 0; t < run.outputs.size(); ++t) {
                std::snprintf(name, sizeof(name), "pred_t%02zu.png", t);
                fc::write_heatmap_png(fs::path(render_dir) / name, run.outputs[t]);
                std::snprintf(name, sizeof(name), "target_t%02zu.png", t);
                fc::write_heatmap_png(fs::path(render_dir) / name,
                                      data.target(seg, static_cast<int>(t)));
            }
        }
    }
    mean.rmse /= count;
    mean.mae /= count;
    mean.kl /= count;
    const double flops_g =
        fc::flops_estimate(loaded.manifest.denoiser, calls / count) / 1e9;
    const double params_m = static_cast<double>(loaded.model.param_count()) / 1e6;

    std::printf("evaluate %s/%s over %d segments (%s sampler)\n", data_dir.string().c_str(),
                split_name.c_str(), count, sampler.c_str());
    std::printf("  %-10s %-10s %-10s %-12s %-10s\n", "RMSE", "MAE", "KL", "FLOPs[G]",
                "Params[M]");
    std::printf("  %-10.4g %-10.4g %-10.4g %-12.4g %-10.4g\n", mean.rmse, mean.mae,
                mean.kl, flops_g, params_m);

    if (!json_out.empty()) {
        std::ofstream out(json_out);
        out << json{{"split", split_name},
                    {"sampler", sampler},
                    {"segments", count},
                    {"rmse", mean.rmse},
                    {"mae", mean.mae},
                    {"kl", mean.kl},
                    {"kl_direction", "KL(target||pred), eps=1e-8 smoothing"},
                    {"flops_g", flops_g},
                    {"params_m", params_m},
                    {"calls_per_segment", calls / count},
                    {"provenance",
                     {{"command", "evaluate"},
                      {"seed", config.seed},
                      {"config_hash", fc::config_hash(config)},
                      {"version", "firecast 0.1.0"}}}}
                   .dump(2)
            << "\n";
    }
    return 0;
}

int cmd_bench(const CommonArgs& args, const std::string& checkpoint,
              const std::string& dataset_dir, std::vector<int> steps,
              std::vector<std::string> samplers, int repeats,
              const std::string& json_out) {
    const fc::ExperimentConfig config = resolve_config(args);
    if (steps.empty()) steps = {10, 20, 50, 100};
    if (samplers.empty()) samplers = {"tree", "independent", "shared"};

    fc::CheckpointManifest manifest;
    fc::DenoiserF model{fc::DenoiserConfig{}};
    if (!checkpoint.empty()) {
        LoadedCheckpoint loaded = load_checkpoint(checkpoint);
        manifest = loaded.manifest;
        model = std::move(loaded.model);
    } else {
        manifest.denoiser = config.model;
        manifest.d_train = config.diffusion.d_train;
        manifest.beta_start = config.diffusion.beta_start;
        manifest.beta_end = config.diffusion.beta_end;
        manifest.horizons = config.horizons();
        manifest.tree_depth = config.tree.depth;
        model = fc::DenoiserF(manifest.denoiser);
        fc::Rng rng(fc::derive_seed(config.seed, "init"));
        model.init_params(rng);
    }

    fc::GridF cond(manifest.denoiser.height, manifest.denoiser.width, 0.0f);
    if (!dataset_dir.empty()) {
        const fc::SegmentDataset data = fc::read_dataset(dataset_dir);
        if (data.height() != cond.h || data.width() != cond.w) {
            throw fc::DataError("bench: dataset resolution does not match model");
        }
        cond = data.frames.front();
    }

    const fc::NoiseSchedule sched = fc::make_linear_schedule(
        manifest.d_train, manifest.beta_start, manifest.beta_end);
    const fc::TreePlan plan =
        fc::build_plan(manifest.horizons, manifest.tree_depth, manifest.d_train);

    const fc::BenchReport report = fc::bench_scaling(model, sched, plan, cond, samplers,
                                                     steps, repeats, 2, config.seed);

    std::printf("bench: %d horizons, depth %d, repeats %d\n", manifest.horizons,
                manifest.tree_depth, repeats);
    std::printf("  %-16s %-8s %-12s %-10s %-10s %-10s\n", "sampler", "steps", "calls",
                "mean[ms]", "std[ms]", "FLOPs[G]");
    for (const auto& row : report.rows) {
        std::printf("  %-16s %-8d %-12lld %-10.3f %-10.3f %-10.3f\n", row.sampler.c_str(),
                    row.d_test, static_cast<long long>(row.calls), row.mean_ms, row.std_ms,
                    row.flops_g);
    }
    for (const auto& fit : report.fits) {
        std::printf("  fit %-14s time ~ %.4f + %.4f*steps  (R^2 = %.6f)\n",
                    fit.sampler.c_str(), fit.intercept, fit.slope, fit.r_squared);
    }
    std::printf("  ordering tree < independent at every step count: %s\n",
                report.tree_below_independent ? "yes" : "NO");

    if (!json_out.empty()) {
        json rows = json::array();
        for (const auto& row : report.rows) {
            rows.push_back({{"sampler", row.sampler},
                            {"d_test", row.d_test},
                            {"mean_ms", row.mean_ms},
                            {"std_ms", row.std_ms},
                            {"calls", row.calls},
                            {"flops_g", row.flops_g}});
        }
        json fits = json::array();
        for (const auto& fit : report.fits) {
            fits.push_back({{"sampler", fit.sampler},
                            {"slope", fit.slope},
                            {"intercept", fit.intercept},
                            {"r_squared", fit.r_squared}});
        }
        std::ofstream out(json_out);
        out << json{{"rows", rows},
                    {"fits", fits},
                    {"tree_below_independent", report.tree_below_independent},
                    {"provenance",
                     {{"command", "bench"},
                      {"seed", config.seed},
                      {"config_hash", fc::config_hash(config)},
                      {"version", "firecast 0.1.0"}}}}
                   .dump(2)
            << "\n";
    }
    return 0;
}

int cmd_render(const std::string& dataset_dir, int day, const std::string& out_path) {
    const fc::RiskMap map = fc::read_frm(dataset_dir, day);
    fc::write_heatmap_png(out_path, map.grid);
    std::printf("rendered day %d (%dx%d) -> %s\n", day, map.grid.h, map.grid.w,
                out_path.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"firecast: probabilistic wildfire-risk forecasting toolkit"};
    app.require_subcommand(1);

    CommonArgs common;

    auto* build = app.add_subcommand("build-data", "Build a risk-map dataset from CSV or synthetic data");
    add_common(build, common);
    std::string build_out;
    build->add_option("--out", build_out, "Output dataset directory");

    auto* plan = app.add_subcommand("plan-tree", "Construct and analyze a tree sampling plan");
    add_common(plan, common);
    int plan_horizons = 0, plan_depth = 0, plan_steps = 0;
    bool plan_curve = false;
    std::string plan_json;
    plan->add_option("--horizons", plan_horizons, "Forecast horizons (leaves)");
    plan->add_option("--L,--depth", plan_depth, "Tree depth");
    plan->add_option("--steps", plan_steps, "Total reverse steps");
    plan->add_flag("--curve", plan_curve, "Sweep depths 2..8");
    plan->add_option("--json", plan_json, "Write the plan report as JSON");

    auto* train = app.add_subcommand("train", "Train the denoiser with the dual-path objective");
    add_common(train, common);
    std::string train_dataset, train_out;
    train->add_option("--dataset", train_dataset, "Dataset directory");
    train->add_option("--out", train_out, "Checkpoint directory");

    auto* sample = app.add_subcommand("sample", "Generate risk maps for every horizon");
    add_common(sample, common);
    std::string sm_checkpoint, sm_dataset, sm_sampler = "tree", sm_out;
    int sm_day = 0;
    sample->add_option("--checkpoint", sm_checkpoint, "Checkpoint params file")->required();
    sample->add_option("--dataset", sm_dataset, "Dataset directory");
    sample->add_option("--day", sm_day, "Conditioning day index");
    sample->add_option("--sampler", sm_sampler, "tree|independent|shared|autoregressive");
    sample->add_option("--out", sm_out, "Output directory");

    auto* evaluate = app.add_subcommand("evaluate", "Score a checkpoint on a dataset split");
    add_common(evaluate, common);
    std::string ev_checkpoint, ev_dataset, ev_split = "test", ev_sampler = "tree", ev_json,
        ev_render;
    int ev_max_segments = 4;
    evaluate->add_option("--checkpoint", ev_checkpoint)->required();
    evaluate->add_option("--dataset", ev_dataset, "Dataset directory");
    evaluate->add_option("--split", ev_split, "train|val|test");
    evaluate->add_option("--sampler", ev_sampler, "Sampler to evaluate");
    evaluate->add_option("--max-segments", ev_max_segments, "Segment cap per split");
    evaluate->add_option("--json", ev_json, "Write metrics JSON");
    evaluate->add_option("--render", ev_render,
                         "Write predicted vs target heatmaps for the first segment");

    auto* bench = app.add_subcommand("bench", "Wall-time scaling across samplers and step counts");
    add_common(bench, common);
    std::string be_checkpoint, be_dataset, be_json;
    std::vector<int> be_steps;
    std::vector<std::string> be_samplers;
    int be_repeats = 5;
    bench->add_option("--checkpoint", be_checkpoint, "Checkpoint (random init when omitted)");
    bench->add_option("--dataset", be_dataset, "Dataset for the conditioning frame");
    bench->add_option("--steps", be_steps, "Step counts to sweep");
    bench->add_option("--samplers", be_samplers, "Samplers to time");
    bench->add_option("--repeats", be_repeats, "Timed repeats per cell (>= 3)");
    bench->add_option("--json", be_json, "Write the bench table as JSON");

    auto* render = app.add_subcommand("render", "Render a stored risk map as a PNG heatmap");
    std::string rd_dataset, rd_out = "frm.png";
    int rd_day = 0;
    render->add_option("--dataset", rd_dataset, "Dataset or sample-output directory")->required();
    render->add_option("--day", rd_day, "Day (or horizon) index");
    render->add_option("--out", rd_out, "Output PNG path");

    try {
        app.parse(argc, argv);
        if (build->parsed()) return cmd_build_data(common, build_out);
        if (plan->parsed()) {
            return cmd_plan_tree(common, plan_horizons, plan_depth, plan_steps, plan_curve,
                                 plan_json);
        }
        if (train->parsed()) return cmd_train(common, train_dataset, train_out);
        if (sample->parsed()) {
            return cmd_sample(common, sm_checkpoint, sm_dataset, sm_day, sm_sampler, sm_out);
        }
        if (evaluate->parsed()) {
            return cmd_evaluate(common, ev_checkpoint, ev_dataset, ev_split, ev_sampler,
                                ev_max_segments, ev_json, ev_render);
        }
        if (bench->parsed()) {
            return cmd_bench(common, be_checkpoint, be_dataset, be_steps, be_samplers,
                             be_repeats, be_json);
        }
        if (render->parsed()) return cmd_render(rd_dataset, rd_day, rd_out);
        return 1;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const fc::UsageError& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return 1;
    } catch (const fc::DataError& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}
