#include "firecast/io.hpp"

#include <cstdio>
#include <fstream>

#include "firecast/errors.hpp"

namespace firecast {

using nlohmann::json;

namespace {

std::string day_stem(int day_index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "frm_%05d", day_index);
    return buf;
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw DataError("malformed JSON in " + path.string() + ": " + e.what());
    }
    return j;
}

void write_json_file(const std::filesystem::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open " + path.string() + " for writing");
    out << j.dump(2) << "\n";
}

json bbox_json(const BBox& b) {
    return json{{"lat_min", b.lat_min},
                {"lat_max", b.lat_max},
                {"lon_min", b.lon_min},
                {"lon_max", b.lon_max}};
}

BBox bbox_from_json(const json& j) {
    return BBox{j.at("lat_min"), j.at("lat_max"), j.at("lon_min"), j.at("lon_max")};
}

}  // namespace

std::filesystem::path frm_data_path(const std::filesystem::path& dir, int day_index) {
    return dir / (day_stem(day_index) + ".f32");
}

std::filesystem::path frm_sidecar_path(const std::filesystem::path& dir, int day_index) {
    return dir / (day_stem(day_index) + ".json");
}

void write_frm(const std::filesystem::path& dir, const RiskMap& map, const BBox& bbox) {
    std::filesystem::create_directories(dir);
    const auto data_path = frm_data_path(dir, map.day_index);
    std::ofstream out(data_path, std::ios::binary);
    if (!out) throw DataError("write_frm: cannot open " + data_path.string());
    out.write(reinterpret_cast<const char*>(map.grid.v.data()),
              static_cast<std::streamsize>(map.grid.size() * sizeof(float)));
    if (!out) throw DataError("write_frm: write failed for " + data_path.string());

    write_json_file(frm_sidecar_path(dir, map.day_index),
                    json{{"day_index", map.day_index},
                         {"shape", {map.grid.h, map.grid.w}},
                         {"dtype", "f32le"},
                         {"normalization_constant", map.normalization_constant},
                         {"bbox", bbox_json(bbox)}});
}

RiskMap read_frm(const std::filesystem::path& dir, int day_index) {
    const json side = read_json_file(frm_sidecar_path(dir, day_index));
    if (side.at("dtype") != "f32le") {
        throw DataError("read_frm: unsupported dtype " + side.at("dtype").dump());
    }
    RiskMap map;
    map.day_index = side.at("day_index");
    map.normalization_constant = side.at("normalization_constant");
    const int h = side.at("shape").at(0);
    const int w = side.at("shape").at(1);
    map.grid = GridF(h, w);

    const auto data_path = frm_data_path(dir, day_index);
    std::ifstream in(data_path, std::ios::binary);
    if (!in) throw DataError("read_frm: cannot open " + data_path.string());
    in.read(reinterpret_cast<char*>(map.grid.v.data()),
            static_cast<std::streamsize>(map.grid.size() * sizeof(float)));
    if (!in) throw DataError("read_frm: truncated data in " + data_path.string());
    return map;
}

void write_segment_index(const std::filesystem::path& path, const SegmentIndex& index) {
    json segs = json::array();
    for (const Segment& s : index.segments) {
        segs.push_back({{"start_day", s.start_day}, {"length", s.length}});
    }
    write_json_file(path, json{{"split", index.split},
                               {"boundaries", {index.begin_day, index.end_day}},
                               {"segments", segs}});
}

SegmentIndex read_segment_index(const std::filesystem::path& path) {
    const json j = read_json_file(path);
    SegmentIndex index;
    index.split = j.at("split");
    index.begin_day = j.at("boundaries").at(0);
    index.end_day = j.at("boundaries").at(1);
    for (const auto& s : j.at("segments")) {
        index.segments.push_back({s.at("start_day"), s.at("length")});
    }
    return index;
}

void write_dataset(const std::filesystem::path& dir, const SegmentDataset& data) {
    std::filesystem::create_directories(dir);
    for (int d = 0; d < data.num_days(); ++d) {
        RiskMap map;
        map.day_index = d;
        map.grid = data.frames[static_cast<size_t>(d)];
        map.normalization_constant = static_cast<float>(data.normalization_constant);
        write_frm(dir, map, data.bbox);
    }
    for (const SegmentIndex& split : data.splits) {
        write_segment_index(dir / ("segments_" + split.split + ".json"), split);
    }
    write_json_file(dir / "manifest.json",
                    json{{"num_days", data.num_days()},
                         {"shape", {data.height(), data.width()}},
                         {"horizons", data.horizons},
                         {"segment_length", data.segment_length},
                         {"normalization_constant", data.normalization_constant},
                         {"bbox", bbox_json(data.bbox)}});
}

SegmentDataset read_dataset(const std::filesystem::path& dir) {
    const json manifest = read_json_file(dir / "manifest.json");
    SegmentDataset data;
    data.horizons = manifest.at("horizons");
    data.segment_length = manifest.at("segment_length");
    data.normalization_constant = manifest.at("normalization_constant");
    data.bbox = bbox_from_json(manifest.at("bbox"));
    const int num_days = manifest.at("num_days");
    data.frames.reserve(static_cast<size_t>(num_days));
    for (int d = 0; d < num_days; ++d) {
        data.frames.push_back(read_frm(dir, d).grid);
    }
    for (size_t i = 0; i < 3; ++i) {
        const std::array<std::string, 3> names = {"train", "val", "test"};
        data.splits[i] = read_segment_index(dir / ("segments_" + names[i] + ".json"));
    }
    data.validate();
    return data;
}

void write_checkpoint_manifest(const std::filesystem::path& path,
                               const CheckpointManifest& m) {
    write_json_file(path, json{{"denoiser",
                                {{"height", m.denoiser.height},
                                 {"width", m.denoiser.width},
                                 {"base_channels", m.denoiser.base_channels},
                                 {"depth", m.denoiser.depth},
                                 {"embed_dim", m.denoiser.embed_dim},
                                 {"embed_base", m.denoiser.embed_base}}},
                               {"schedule",
                                {{"d_train", m.d_train},
                                 {"beta_start", m.beta_start},
                                 {"beta_end", m.beta_end}}},
                               {"tree", {{"horizons", m.horizons}, {"depth", m.tree_depth}}},
                               {"normalization_constant", m.normalization_constant},
                               {"training_step", m.training_step}});
}

CheckpointManifest read_checkpoint_manifest(const std::filesystem::path& path) {
    const json j = read_json_file(path);
    CheckpointManifest m;
    const json& d = j.at("denoiser");
    m.denoiser.height = d.at("height");
    m.denoiser.width = d.at("width");
    m.denoiser.base_channels = d.at("base_channels");
    m.denoiser.depth = d.at("depth");
    m.denoiser.embed_dim = d.at("embed_dim");
    m.denoiser.embed_base = d.at("embed_base");
    const json& s = j.at("schedule");
    m.d_train = s.at("d_train");
    m.beta_start = s.at("beta_start");
    m.beta_end = s.at("beta_end");
    m.horizons = j.at("tree").at("horizons");
    m.tree_depth = j.at("tree").at("depth");
    m.normalization_constant = j.at("normalization_constant");
    m.training_step = j.at("training_step");
    return m;
}

void write_run_manifest(const std::filesystem::path& path, const std::string& command,
                        uint64_t seed, const std::string& config_hash,
                        const json& extra, const json& config_json) {
    json j{{"command", command},
           {"seed", seed},
           {"config_hash", config_hash},
           {"version", "firecast 0.1.0"}};
    if (!extra.is_null()) j["details"] = extra;
    if (!config_json.is_null()) j["config"] = config_json;
    write_json_file(path, j);
}

json tree_plan_json(const TreePlan& plan, const CostReport& report) {
    json levels = json::array();
    for (const auto& level : plan.levels) {
        json nodes = json::array();
        for (const TreeNode& n : level) {
            nodes.push_back({{"horizon", n.horizon},
                             {"parent_horizon", n.parent_horizon},
                             {"block", {n.block_lo, n.block_hi}}});
        }
        levels.push_back(std::move(nodes));
    }
    json j{{"horizons", plan.horizons},
           {"depth", plan.depth},
           {"total_steps", plan.total_steps},
           {"branching", plan.branching},
           {"segment_steps", plan.segment_steps},
           {"levels", levels},
           {"calls_nt", report.calls_nt},
           {"calls_traditional", report.calls_traditional},
           {"calls_shared", report.calls_shared},
           {"reduction_exact", report.reduction_exact},
           {"uniform", report.uniform}};
    if (report.uniform) {
        j["reduction_closed_form"] = report.reduction_closed_form;
        j["reduction_approx"] = report.reduction_approx;
    }
    return j;
}

uint64_t hash_bytes(const void* data, size_t size, uint64_t seed) {
    const auto* bytes = static_cast<const uint8_t*>(data);
    uint64_t h = seed;
    for (size_t i = 0; i < size; ++i) {
        h ^= bytes[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

uint64_t hash_grid(const GridF& grid, uint64_t seed) {
    return hash_bytes(grid.v.data(), grid.v.size() * sizeof(float), seed);
}

}  // namespace firecast
