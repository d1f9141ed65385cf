#pragma once

#include <filesystem>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>

#include "firecast/frm.hpp"
#include "firecast/ingest.hpp"
#include "firecast/model.hpp"

namespace firecast {

// Synthetic-data parameters for build-data --synthetic runs.
struct SyntheticDataConfig {
    bool enabled = false;
    int num_segments = 6;
    double sigma_px = 1.5;
};

struct DataConfig {
    std::string csv_path;
    CsvColumns columns;
    BBox bbox;  // continental US by default
    int resolution_h = 128;
    int resolution_w = 128;
    SigmaConfig sigma;
    double kernel_cutoff_sigmas = 0.0;  // 0 = full-grid evaluation
    double normalization_percentile = 99.9;
    std::optional<double> min_confidence;  // off by default
    int segment_length = 28;               // 1 conditioning + 27 horizons
    SplitRatios ratios;
    SyntheticDataConfig synthetic;
};

struct DiffusionConfig {
    int d_train = 1000;
    int d_test = 10;
    double beta_start = 1e-4;
    double beta_end = 0.02;
    bool stochastic = false;  // deterministic transitions by default
};

struct TreeConfig {
    int depth = 4;
};

struct TrainingConfig {
    double lr_max = 1e-4;
    double lr_min = 1e-6;
    int batch_size = 4;
    int epochs = 1;
    double p_tree = 0.8;
    double weight_decay = 1e-4;
    int val_interval = 0;
    int val_segments = 2;
    int checkpoint_interval = 0;
};

struct PathsConfig {
    std::string dataset_dir = "dataset";
    std::string checkpoint_dir = "checkpoints";
    std::string output_dir = "outputs";
};

struct ExperimentConfig {
    DataConfig data;
    DenoiserConfig model{.height = 128, .width = 128};
    DiffusionConfig diffusion;
    TreeConfig tree;
    TrainingConfig train;
    PathsConfig paths;
    uint64_t seed = 0;

    int horizons() const { return data.segment_length - 1; }
};

nlohmann::json to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);
void save_config(const std::filesystem::path& path, const ExperimentConfig& config);

// Apply one "dotted.path=value" override, e.g. "diffusion.d_test=20".
void apply_override(nlohmann::json& j, const std::string& assignment);

// Stable hash of the canonical JSON dump, reported in run manifests.
std::string config_hash(const ExperimentConfig& config);

}  // namespace firecast
