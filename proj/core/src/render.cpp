#include "firecast/render.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <vector>

#include "firecast/errors.hpp"

namespace firecast {

namespace {

struct RampStop {
    double u;
    std::array<double, 3> rgb;
};

// Black -> purple -> red -> orange -> light yellow.
constexpr RampStop kRamp[] = {
    {0.00, {0.00, 0.00, 0.02}}, {0.25, {0.26, 0.05, 0.33}},
    {0.50, {0.74, 0.21, 0.24}}, {0.75, {0.98, 0.55, 0.04}},
    {1.00, {0.99, 0.99, 0.75}},
};

std::array<uint8_t, 3> heat_color(double u) {
    u = std::clamp(u, 0.0, 1.0);
    for (size_t i = 1; i < std::size(kRamp); ++i) {
        if (u <= kRamp[i].u) {
            const double span = kRamp[i].u - kRamp[i - 1].u;
            const double f = (u - kRamp[i - 1].u) / span;
            std::array<uint8_t, 3> out{};
            for (int c = 0; c < 3; ++c) {
                const double v = kRamp[i - 1].rgb[c] + f * (kRamp[i].rgb[c] - kRamp[i - 1].rgb[c]);
                out[static_cast<size_t>(c)] = static_cast<uint8_t>(std::lround(v * 255.0));
            }
            return out;
        }
    }
    return {255, 255, 255};
}

}  // namespace

void write_heatmap_png(const std::filesystem::path& path, const GridF& grid) {
    FILE* fp = std::fopen(path.string().c_str(), "wb");
    if (!fp) throw DataError("write_heatmap_png: cannot open " + path.string());

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info || setjmp(png_jmpbuf(png))) {
        if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
        std::fclose(fp);
        throw DataError("write_heatmap_png: libpng failure for " + path.string());
    }
    png_init_io(png, fp);
    png_set_IHDR(png, info, static_cast<png_uint_32>(grid.w), static_cast<png_uint_32>(grid.h),
                 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);

    std::vector<uint8_t> row(static_cast<size_t>(grid.w) * 3);
    for (int y = 0; y < grid.h; ++y) {
        for (int x = 0; x < grid.w; ++x) {
            const auto rgb = heat_color(grid.at(y, x));
            row[static_cast<size_t>(x) * 3 + 0] = rgb[0];
            row[static_cast<size_t>(x) * 3 + 1] = rgb[1];
            row[static_cast<size_t>(x) * 3 + 2] = rgb[2];
        }
        png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
}

}  // namespace firecast
