#pragma once

// On-disk formats. Risk maps are raw little-endian float32, row-major, one
// file per day, with a JSON sidecar and a dataset-level manifest; segment
// indices, checkpoint manifests and run manifests are JSON documents.

#include <filesystem>
#include <nlohmann/json.hpp>
#include <string>

#include "firecast/dataset.hpp"
#include "firecast/frm.hpp"
#include "firecast/model.hpp"
#include "firecast/schedule.hpp"
#include "firecast/treeplan.hpp"

namespace firecast {

std::filesystem::path frm_data_path(const std::filesystem::path& dir, int day_index);
std::filesystem::path frm_sidecar_path(const std::filesystem::path& dir, int day_index);

void write_frm(const std::filesystem::path& dir, const RiskMap& map, const BBox& bbox);
RiskMap read_frm(const std::filesystem::path& dir, int day_index);

void write_segment_index(const std::filesystem::path& path, const SegmentIndex& index);
SegmentIndex read_segment_index(const std::filesystem::path& path);

// Full dataset round-trip: frm files + manifest.json + segments_<split>.json.
void write_dataset(const std::filesystem::path& dir, const SegmentDataset& data);
SegmentDataset read_dataset(const std::filesystem::path& dir);

// Checkpoint manifest pinning the experiment context next to the parameter
// blob, so training and sampling provably share one schedule and plan.
struct CheckpointManifest {
    DenoiserConfig denoiser;
    int d_train = 1000;
    double beta_start = 1e-4;
    double beta_end = 0.02;
    int horizons = 27;
    int tree_depth = 4;
    double normalization_constant = 1.0;
    int64_t training_step = 0;
};

void write_checkpoint_manifest(const std::filesystem::path& path,
                               const CheckpointManifest& manifest);
CheckpointManifest read_checkpoint_manifest(const std::filesystem::path& path);

// Per-run provenance manifest written by every CLI command. `config_json`
// carries the fully resolved experiment config so the run can be reproduced
// from the manifest alone.
void write_run_manifest(const std::filesystem::path& path, const std::string& command,
                        uint64_t seed, const std::string& config_hash,
                        const nlohmann::json& extra,
                        const nlohmann::json& config_json = nullptr);

nlohmann::json tree_plan_json(const TreePlan& plan, const CostReport& report);

uint64_t hash_bytes(const void* data, size_t size, uint64_t seed = 0xcbf29ce484222325ULL);
uint64_t hash_grid(const GridF& grid, uint64_t seed = 0xcbf29ce484222325ULL);

}  // namespace firecast
