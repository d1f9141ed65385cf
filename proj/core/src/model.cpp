#include "firecast/model.hpp"

#include <cstring>
#include <fstream>

#include "firecast/errors.hpp"

namespace firecast {

namespace {
constexpr char kMagic[8] = {'F', 'C', 'P', 'A', 'R', 'A', 'M', '1'};
}

std::vector<LayerCost> layer_costs(const DenoiserConfig& config) {
    return Denoiser<float>(config).layer_costs();
}

void save_params(const std::filesystem::path& path, const std::vector<float>& w) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("save_params: cannot open " + path.string());
    out.write(kMagic, sizeof(kMagic));
    const uint64_t count = w.size();
    out.write(reinterpret_cast<const char*>(&count), sizeof(count));
    out.write(reinterpret_cast<const char*>(w.data()),
              static_cast<std::streamsize>(w.size() * sizeof(float)));
    if (!out) throw DataError("save_params: write failed for " + path.string());
}

std::vector<float> load_params(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("load_params: cannot open " + path.string());
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        throw DataError("load_params: corrupted checkpoint (bad magic) in " + path.string());
    }
    uint64_t count = 0;
    in.read(reinterpret_cast<char*>(&count), sizeof(count));
    if (!in) throw DataError("load_params: corrupted checkpoint (truncated header)");
    std::vector<float> w(count);
    in.read(reinterpret_cast<char*>(w.data()),
            static_cast<std::streamsize>(count * sizeof(float)));
    if (!in) throw DataError("load_params: corrupted checkpoint (truncated data)");
    return w;
}

}  // namespace firecast
