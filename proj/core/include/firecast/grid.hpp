#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "firecast/errors.hpp"

namespace firecast {

// Dense row-major H x W raster. The pipeline's risk maps, noise fields and
// sampler states are all grids of float; double instantiations exist for
// numeric oracles.
template <typename T>
struct Grid {
    int h = 0;
    int w = 0;
    std::vector<T> v;

    Grid() = default;
    Grid(int height, int width, T fill = T(0))
        : h(height), w(width), v(static_cast<size_t>(height) * width, fill) {}

    T& at(int y, int x) { return v[static_cast<size_t>(y) * w + x]; }
    T at(int y, int x) const { return v[static_cast<size_t>(y) * w + x]; }

    size_t size() const { return v.size(); }

    bool same_shape(const Grid& o) const { return h == o.h && w == o.w; }
};

using GridF = Grid<float>;
using GridD = Grid<double>;

template <typename T>
void require_same_shape(const Grid<T>& a, const Grid<T>& b, const char* what) {
    if (!a.same_shape(b)) {
        throw NumericError(std::string(what) + ": grid shape mismatch");
    }
}

template <typename T>
void clip01(Grid<T>& g) {
    for (auto& x : g.v) x = std::clamp(x, T(0), T(1));
}

template <typename T>
double grid_sum(const Grid<T>& g) {
    double s = 0.0;
    for (auto x : g.v) s += static_cast<double>(x);
    return s;
}

template <typename T>
T grid_max(const Grid<T>& g) {
    T m = g.v.empty() ? T(0) : g.v[0];
    for (auto x : g.v) m = std::max(m, x);
    return m;
}

}  // namespace firecast
