#pragma once

// Minimal CPU layer library with explicit backward passes. Parameters and
// gradients live in one flat store so the optimizer, checkpointing and
// finite-difference checks can treat the model as a single vector.

#include <Eigen/Core>
#include <cmath>
#include <cstdint>
#include <vector>

#include "firecast/errors.hpp"
#include "firecast/rng.hpp"

namespace firecast::nn {

template <typename T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using ColMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor>;

// Channel-major (c, y, x) feature map.
template <typename T>
struct Tensor {
    int c = 0, h = 0, w = 0;
    std::vector<T> v;

    Tensor() = default;
    Tensor(int c_, int h_, int w_, T fill = T(0))
        : c(c_), h(h_), w(w_), v(static_cast<size_t>(c_) * h_ * w_, fill) {}

    T& at(int ci, int y, int x) {
        return v[(static_cast<size_t>(ci) * h + y) * w + x];
    }
    T at(int ci, int y, int x) const {
        return v[(static_cast<size_t>(ci) * h + y) * w + x];
    }
    size_t size() const { return v.size(); }
};

template <typename T>
struct ParamStore {
    std::vector<T> w;
    std::vector<T> g;

    int add(int count) {
        const int offset = static_cast<int>(w.size());
        w.resize(w.size() + static_cast<size_t>(count), T(0));
        g.resize(w.size(), T(0));
        return offset;
    }
    void zero_grad() { std::fill(g.begin(), g.end(), T(0)); }
    int count() const { return static_cast<int>(w.size()); }
};

// ---------------------------------------------------------------------------
// im2col / col2im; pad = k/2, so stride 1 preserves the spatial size.

template <typename T>
void im2col(const Tensor<T>& x, int k, int stride, ColMat<T>& cols) {
    const int p = k / 2;
    const int oh = (x.h + 2 * p - k) / stride + 1;
    const int ow = (x.w + 2 * p - k) / stride + 1;
    cols.resize(static_cast<Eigen::Index>(x.c) * k * k,
                static_cast<Eigen::Index>(oh) * ow);
    for (int oy = 0; oy < oh; ++oy) {
        for (int ox = 0; ox < ow; ++ox) {
            T* dst = cols.data() + (static_cast<size_t>(oy) * ow + ox) * cols.rows();
            for (int ci = 0; ci < x.c; ++ci) {
                for (int ky = 0; ky < k; ++ky) {
                    const int iy = oy * stride + ky - p;
                    for (int kx = 0; kx < k; ++kx) {
                        const int ix = ox * stride + kx - p;
                        *dst++ = (iy >= 0 && iy < x.h && ix >= 0 && ix < x.w)
                                     ? x.at(ci, iy, ix)
                                     : T(0);
                    }
                }
            }
        }
    }
}

template <typename T>
void col2im_add(const ColMat<T>& cols, int k, int stride, Tensor<T>& gx) {
    const int p = k / 2;
    const int oh = (gx.h + 2 * p - k) / stride + 1;
    const int ow = (gx.w + 2 * p - k) / stride + 1;
    for (int oy = 0; oy < oh; ++oy) {
        for (int ox = 0; ox < ow; ++ox) {
            const T* src = cols.data() + (static_cast<size_t>(oy) * ow + ox) * cols.rows();
            for (int ci = 0; ci < gx.c; ++ci) {
                for (int ky = 0; ky < k; ++ky) {
                    const int iy = oy * stride + ky - p;
                    for (int kx = 0; kx < k; ++kx) {
                        const int ix = ox * stride + kx - p;
                        if (iy >= 0 && iy < gx.h && ix >= 0 && ix < gx.w) {
                            gx.at(ci, iy, ix) += *src;
                        }
                        ++src;
                    }
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Layers. Each holds offsets into the ParamStore; forward optionally fills a
// cache consumed by backward.

template <typename T>
struct Conv2d {
    int in_c = 0, out_c = 0, k = 3, stride = 1;
    int w_off = -1, b_off = -1;

    struct Cache {
        ColMat<T> cols;
        int in_h = 0, in_w = 0;
    };

    void init(ParamStore<T>& ps, int in_channels, int out_channels, int kernel,
              int str) {
        in_c = in_channels;
        out_c = out_channels;
        k = kernel;
        stride = str;
        w_off = ps.add(out_c * in_c * k * k);
        b_off = ps.add(out_c);
    }

    int weight_count() const { return out_c * in_c * k * k; }

    void he_init(ParamStore<T>& ps, Rng& rng, double scale = 1.0) const {
        const double std_dev = scale * std::sqrt(2.0 / (in_c * k * k));
        for (int i = 0; i < weight_count(); ++i) {
            ps.w[static_cast<size_t>(w_off) + i] = static_cast<T>(rng.normal() * std_dev);
        }
        for (int i = 0; i < out_c; ++i) ps.w[static_cast<size_t>(b_off) + i] = T(0);
    }

    Tensor<T> forward(const ParamStore<T>& ps, const Tensor<T>& x,
                      Cache* cache = nullptr) const {
        const int p = k / 2;
        const int oh = (x.h + 2 * p - k) / stride + 1;
        const int ow = (x.w + 2 * p - k) / stride + 1;
        ColMat<T> local;
        ColMat<T>& cols = cache ? cache->cols : local;
        im2col(x, k, stride, cols);
        if (cache) {
            cache->in_h = x.h;
            cache->in_w = x.w;
        }
        Tensor<T> y(out_c, oh, ow);
        Eigen::Map<const RowMat<T>> wm(ps.w.data() + w_off, out_c,
                                       static_cast<Eigen::Index>(in_c) * k * k);
        Eigen::Map<RowMat<T>> ym(y.v.data(), out_c, static_cast<Eigen::Index>(oh) * ow);
        ym.noalias() = wm * cols;
        for (int c = 0; c < out_c; ++c) {
            ym.row(c).array() += ps.w[static_cast<size_t>(b_off) + c];
        }
        return y;
    }

    // Accumulates parameter gradients; adds input gradient into gx (which
    // must be zero-initialized to the input shape by the caller).
    void backward(ParamStore<T>& ps, const Cache& cache, const Tensor<T>& gy,
                  Tensor<T>* gx) const {
        Eigen::Map<const RowMat<T>> gym(gy.v.data(), out_c,
                                        static_cast<Eigen::Index>(gy.h) * gy.w);
        Eigen::Map<RowMat<T>> gwm(ps.g.data() + w_off, out_c,
                                  static_cast<Eigen::Index>(in_c) * k * k);
        gwm.noalias() += gym * cache.cols.transpose();
        for (int c = 0; c < out_c; ++c) {
            ps.g[static_cast<size_t>(b_off) + c] += gym.row(c).sum();
        }
        if (gx) {
            Eigen::Map<const RowMat<T>> wm(ps.w.data() + w_off, out_c,
                                           static_cast<Eigen::Index>(in_c) * k * k);
            ColMat<T> gcols = wm.transpose() * gym;
            col2im_add(gcols, k, stride, *gx);
        }
    }
};

template <typename T>
struct Linear {
    int in_dim = 0, out_dim = 0;
    int w_off = -1, b_off = -1;

    void init(ParamStore<T>& ps, int in, int out) {
        in_dim = in;
        out_dim = out;
        w_off = ps.add(out * in);
        b_off = ps.add(out);
    }

    void he_init(ParamStore<T>& ps, Rng& rng, double scale = 1.0) const {
        const double std_dev = scale * std::sqrt(2.0 / in_dim);
        for (int i = 0; i < out_dim * in_dim; ++i) {
            ps.w[static_cast<size_t>(w_off) + i] = static_cast<T>(rng.normal() * std_dev);
        }
        for (int i = 0; i < out_dim; ++i) ps.w[static_cast<size_t>(b_off) + i] = T(0);
    }

    std::vector<T> forward(const ParamStore<T>& ps, const std::vector<T>& x) const {
        std::vector<T> y(static_cast<size_t>(out_dim));
        Eigen::Map<const RowMat<T>> wm(ps.w.data() + w_off, out_dim, in_dim);
        Eigen::Map<const Eigen::Matrix<T, Eigen::Dynamic, 1>> xv(x.data(), in_dim);
        Eigen::Map<Eigen::Matrix<T, Eigen::Dynamic, 1>> yv(y.data(), out_dim);
        yv.noalias() = wm * xv;
        for (int i = 0; i < out_dim; ++i) y[static_cast<size_t>(i)] += ps.w[static_cast<size_t>(b_off) + i];
        return y;
    }

    void backward(ParamStore<T>& ps, const std::vector<T>& x, const std::vector<T>& gy,
                  std::vector<T>* gx) const {
        Eigen::Map<RowMat<T>> gwm(ps.g.data() + w_off, out_dim, in_dim);
        Eigen::Map<const Eigen::Matrix<T, Eigen::Dynamic, 1>> xv(x.data(), in_dim);
        Eigen::Map<const Eigen::Matrix<T, Eigen::Dynamic, 1>> gyv(gy.data(), out_dim);
        gwm.noalias() += gyv * xv.transpose();
        for (int i = 0; i < out_dim; ++i) ps.g[static_cast<size_t>(b_off) + i] += gy[static_cast<size_t>(i)];
        if (gx) {
            gx->assign(static_cast<size_t>(in_dim), T(0));
            Eigen::Map<const RowMat<T>> wm(ps.w.data() + w_off, out_dim, in_dim);
            Eigen::Map<Eigen::Matrix<T, Eigen::Dynamic, 1>> gxv(gx->data(), in_dim);
            gxv.noalias() = wm.transpose() * gyv;
        }
    }
};

// ---------------------------------------------------------------------------
// Parameter-free ops.

template <typename T>
T sigmoid(T x) {
    return T(1) / (T(1) + std::exp(-x));
}

template <typename T>
Tensor<T> silu(const Tensor<T>& x) {
    Tensor<T> y(x.c, x.h, x.w);
    for (size_t i = 0; i < x.size(); ++i) y.v[i] = x.v[i] * sigmoid(x.v[i]);
    return y;
}

// gx += gy * silu'(x), evaluated from the pre-activation x.
template <typename T>
void silu_backward(const Tensor<T>& x, const Tensor<T>& gy, Tensor<T>& gx) {
    for (size_t i = 0; i < x.size(); ++i) {
        const T s = sigmoid(x.v[i]);
        gx.v[i] += gy.v[i] * s * (T(1) + x.v[i] * (T(1) - s));
    }
}

template <typename T>
Tensor<T> upsample2x(const Tensor<T>& x) {
    Tensor<T> y(x.c, x.h * 2, x.w * 2);
    for (int c = 0; c < x.c; ++c) {
        for (int yy = 0; yy < y.h; ++yy) {
            for (int xx = 0; xx < y.w; ++xx) {
                y.at(c, yy, xx) = x.at(c, yy / 2, xx / 2);
            }
        }
    }
    return y;
}

template <typename T>
Tensor<T> upsample2x_backward(const Tensor<T>& gy) {
    Tensor<T> gx(gy.c, gy.h / 2, gy.w / 2);
    for (int c = 0; c < gy.c; ++c) {
        for (int yy = 0; yy < gy.h; ++yy) {
            for (int xx = 0; xx < gy.w; ++xx) {
                gx.at(c, yy / 2, xx / 2) += gy.at(c, yy, xx);
            }
        }
    }
    return gx;
}

template <typename T>
std::vector<T> global_avg_pool(const Tensor<T>& x) {
    std::vector<T> y(static_cast<size_t>(x.c), T(0));
    const T inv = T(1) / static_cast<T>(x.h * x.w);
    for (int c = 0; c < x.c; ++c) {
        T acc = T(0);
        for (int yy = 0; yy < x.h; ++yy) {
            for (int xx = 0; xx < x.w; ++xx) acc += x.at(c, yy, xx);
        }
        y[static_cast<size_t>(c)] = acc * inv;
    }
    return y;
}

template <typename T>
void global_avg_pool_backward(const std::vector<T>& gy, Tensor<T>& gx) {
    const T inv = T(1) / static_cast<T>(gx.h * gx.w);
    for (int c = 0; c < gx.c; ++c) {
        const T g = gy[static_cast<size_t>(c)] * inv;
        for (int yy = 0; yy < gx.h; ++yy) {
            for (int xx = 0; xx < gx.w; ++xx) gx.at(c, yy, xx) += g;
        }
    }
}

template <typename T>
Tensor<T> concat_channels(const Tensor<T>& a, const Tensor<T>& b) {
    if (a.h != b.h || a.w != b.w) {
        throw NumericError("concat_channels: spatial shape mismatch");
    }
    Tensor<T> y(a.c + b.c, a.h, a.w);
    std::copy(a.v.begin(), a.v.end(), y.v.begin());
    std::copy(b.v.begin(), b.v.end(), y.v.begin() + static_cast<std::ptrdiff_t>(a.size()));
    return y;
}

template <typename T>
void split_channels(const Tensor<T>& g, int c_first, Tensor<T>& ga, Tensor<T>& gb) {
    ga = Tensor<T>(c_first, g.h, g.w);
    gb = Tensor<T>(g.c - c_first, g.h, g.w);
    std::copy(g.v.begin(), g.v.begin() + static_cast<std::ptrdiff_t>(ga.size()), ga.v.begin());
    std::copy(g.v.begin() + static_cast<std::ptrdiff_t>(ga.size()), g.v.end(), gb.v.begin());
}

// Sinusoidal position code at signed integer positions; base follows the
// standard transformer construction.
template <typename T>
std::vector<T> sinusoidal_embedding(double position, int dim, double base = 10000.0) {
    if (dim < 2 || dim % 2 != 0) {
        throw NumericError("sinusoidal_embedding: dim must be even and >= 2");
    }
    std::vector<T> out(static_cast<size_t>(dim));
    for (int i = 0; i < dim / 2; ++i) {
        const double freq = std::pow(base, -2.0 * i / dim);
        out[static_cast<size_t>(2 * i)] = static_cast<T>(std::sin(position * freq));
        out[static_cast<size_t>(2 * i + 1)] = static_cast<T>(std::cos(position * freq));
    }
    return out;
}

}  // namespace firecast::nn
