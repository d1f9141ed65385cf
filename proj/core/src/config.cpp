#include "firecast/config.hpp"

#include <fstream>
#include <sstream>

#include "firecast/errors.hpp"
#include "firecast/io.hpp"

namespace firecast {

using nlohmann::json;

json to_json(const ExperimentConfig& c) {
    json j;
    j["data"] = {{"csv_path", c.data.csv_path},
                 {"columns",
                  {{"latitude", c.data.columns.latitude},
                   {"longitude", c.data.columns.longitude},
                   {"date", c.data.columns.date},
                   {"brightness", c.data.columns.brightness},
                   {"confidence", c.data.columns.confidence}}},
                 {"bbox",
                  {{"lat_min", c.data.bbox.lat_min},
                   {"lat_max", c.data.bbox.lat_max},
                   {"lon_min", c.data.bbox.lon_min},
                   {"lon_max", c.data.bbox.lon_max}}},
                 {"resolution", {c.data.resolution_h, c.data.resolution_w}},
                 {"sigma",
                  {{"b_lo", c.data.sigma.b_lo},
                   {"b_hi", c.data.sigma.b_hi},
                   {"sigma_min_px", c.data.sigma.sigma_min_px},
                   {"sigma_max_px", c.data.sigma.sigma_max_px},
                   {"isotropic", c.data.sigma.isotropic}}},
                 {"kernel_cutoff_sigmas", c.data.kernel_cutoff_sigmas},
                 {"normalization_percentile", c.data.normalization_percentile},
                 {"segment_length", c.data.segment_length},
                 {"ratios",
                  {{"train", c.data.ratios.train},
                   {"val", c.data.ratios.val},
                   {"test", c.data.ratios.test}}},
                 {"synthetic",
                  {{"enabled", c.data.synthetic.enabled},
                   {"num_segments", c.data.synthetic.num_segments},
                   {"sigma_px", c.data.synthetic.sigma_px}}}};
    if (c.data.min_confidence) j["data"]["min_confidence"] = *c.data.min_confidence;

    j["model"] = {{"height", c.model.height},
                  {"width", c.model.width},
                  {"base_channels", c.model.base_channels},
                  {"depth", c.model.depth},
                  {"embed_dim", c.model.embed_dim},
                  {"embed_base", c.model.embed_base}};
    j["diffusion"] = {{"d_train", c.diffusion.d_train},
                      {"d_test", c.diffusion.d_test},
                      {"beta_start", c.diffusion.beta_start},
                      {"beta_end", c.diffusion.beta_end},
                      {"stochastic", c.diffusion.stochastic}};
    j["tree"] = {{"depth", c.tree.depth}};
    j["train"] = {{"lr_max", c.train.lr_max},
                  {"lr_min", c.train.lr_min},
                  {"batch_size", c.train.batch_size},
                  {"epochs", c.train.epochs},
                  {"p_tree", c.train.p_tree},
                  {"weight_decay", c.train.weight_decay},
                  {"val_interval", c.train.val_interval},
                  {"val_segments", c.train.val_segments},
                  {"checkpoint_interval", c.train.checkpoint_interval}};
    j["paths"] = {{"dataset_dir", c.paths.dataset_dir},
                  {"checkpoint_dir", c.paths.checkpoint_dir},
                  {"output_dir", c.paths.output_dir}};
    j["seed"] = c.seed;
    return j;
}

namespace {

template <typename T>
void get_if(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

ExperimentConfig config_from_json(const json& j) {
    ExperimentConfig c;
    if (j.contains("data")) {
        const json& d = j.at("data");
        get_if(d, "csv_path", c.data.csv_path);
        if (d.contains("columns")) {
            const json& col = d.at("columns");
            get_if(col, "latitude", c.data.columns.latitude);
            get_if(col, "longitude", c.data.columns.longitude);
            get_if(col, "date", c.data.columns.date);
            get_if(col, "brightness", c.data.columns.brightness);
            get_if(col, "confidence", c.data.columns.confidence);
        }
        if (d.contains("bbox")) {
            const json& b = d.at("bbox");
            get_if(b, "lat_min", c.data.bbox.lat_min);
            get_if(b, "lat_max", c.data.bbox.lat_max);
            get_if(b, "lon_min", c.data.bbox.lon_min);
            get_if(b, "lon_max", c.data.bbox.lon_max);
        }
        if (d.contains("resolution")) {
            c.data.resolution_h = d.at("resolution").at(0);
            c.data.resolution_w = d.at("resolution").at(1);
        }
        if (d.contains("sigma")) {
            const json& s = d.at("sigma");
            get_if(s, "b_lo", c.data.sigma.b_lo);
            get_if(s, "b_hi", c.data.sigma.b_hi);
            get_if(s, "sigma_min_px", c.data.sigma.sigma_min_px);
            get_if(s, "sigma_max_px", c.data.sigma.sigma_max_px);
            get_if(s, "isotropic", c.data.sigma.isotropic);
        }
        get_if(d, "kernel_cutoff_sigmas", c.data.kernel_cutoff_sigmas);
        get_if(d, "normalization_percentile", c.data.normalization_percentile);
        get_if(d, "segment_length", c.data.segment_length);
        if (d.contains("min_confidence")) {
            c.data.min_confidence = d.at("min_confidence").get<double>();
        }
        if (d.contains("ratios")) {
            const json& r = d.at("ratios");
            get_if(r, "train", c.data.ratios.train);
            get_if(r, "val", c.data.ratios.val);
            get_if(r, "test", c.data.ratios.test);
        }
        if (d.contains("synthetic")) {
            const json& s = d.at("synthetic");
            get_if(s, "enabled", c.data.synthetic.enabled);
            get_if(s, "num_segments", c.data.synthetic.num_segments);
            get_if(s, "sigma_px", c.data.synthetic.sigma_px);
        }
    }
    if (j.contains("model")) {
        const json& m = j.at("model");
        get_if(m, "height", c.model.height);
        get_if(m, "width", c.model.width);
        get_if(m, "base_channels", c.model.base_channels);
        get_if(m, "depth", c.model.depth);
        get_if(m, "embed_dim", c.model.embed_dim);
        get_if(m, "embed_base", c.model.embed_base);
    }
    if (j.contains("diffusion")) {
        const json& d = j.at("diffusion");
        get_if(d, "d_train", c.diffusion.d_train);
        get_if(d, "d_test", c.diffusion.d_test);
        get_if(d, "beta_start", c.diffusion.beta_start);
        get_if(d, "beta_end", c.diffusion.beta_end);
        get_if(d, "stochastic", c.diffusion.stochastic);
    }
    if (j.contains("tree")) get_if(j.at("tree"), "depth", c.tree.depth);
    if (j.contains("train")) {
        const json& t = j.at("train");
        get_if(t, "lr_max", c.train.lr_max);
        get_if(t, "lr_min", c.train.lr_min);
        get_if(t, "batch_size", c.train.batch_size);
        get_if(t, "epochs", c.train.epochs);
        get_if(t, "p_tree", c.train.p_tree);
        get_if(t, "weight_decay", c.train.weight_decay);
        get_if(t, "val_interval", c.train.val_interval);
        get_if(t, "val_segments", c.train.val_segments);
        get_if(t, "checkpoint_interval", c.train.checkpoint_interval);
    }
    if (j.contains("paths")) {
        const json& p = j.at("paths");
        get_if(p, "dataset_dir", c.paths.dataset_dir);
        get_if(p, "checkpoint_dir", c.paths.checkpoint_dir);
        get_if(p, "output_dir", c.paths.output_dir);
    }
    get_if(j, "seed", c.seed);
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("config file not found: " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw DataError("malformed config " + path.string() + ": " + e.what());
    }
    return config_from_json(j);
}

void save_config(const std::filesystem::path& path, const ExperimentConfig& config) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write config " + path.string());
    out << to_json(config).dump(2) << "\n";
}

void apply_override(json& j, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw UsageError("override must be dotted.path=value, got '" + assignment + "'");
    }
    const std::string path = assignment.substr(0, eq);
    const std::string value = assignment.substr(eq + 1);

    json* cursor = &j;
    std::stringstream ss(path);
    std::string key;
    std::vector<std::string> keys;
    while (std::getline(ss, key, '.')) keys.push_back(key);
    if (keys.empty()) throw UsageError("empty override path");
    for (size_t i = 0; i + 1 < keys.size(); ++i) cursor = &(*cursor)[keys[i]];

    // Interpret the value as JSON when possible (numbers, booleans, arrays),
    // falling back to a plain string.
    json parsed = json::parse(value, nullptr, false);
    (*cursor)[keys.back()] = parsed.is_discarded() ? json(value) : parsed;
}

std::string config_hash(const ExperimentConfig& config) {
    const std::string dump = to_json(config).dump();
    const uint64_t h = hash_bytes(dump.data(), dump.size());
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace firecast
