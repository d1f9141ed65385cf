#pragma once

// Shifting-conditioned denoiser: a U-Net style encoder/decoder over the
// channel stack [noisy, condition] whose bottleneck latent is FiLM-modulated
// by four embeddings — condition, noise level, absolute horizon, and the
// relative horizon shift injected at branch transitions.

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "firecast/grid.hpp"
#include "firecast/nn.hpp"
#include "firecast/rng.hpp"

namespace firecast {

struct DenoiserConfig {
    int height = 128;
    int width = 128;
    int base_channels = 32;
    int depth = 3;        // resolution levels; the default yields the reference
                          // 3 encoder + 1 middle + 3 decoder blocks + final conv
    int embed_dim = 64;
    double embed_base = 10000.0;

    bool operator==(const DenoiserConfig&) const = default;
};

// The four conditioning vectors feeding the FiLM affine layer.
template <typename T>
struct EmbeddingSet {
    std::vector<T> h_cond;
    std::vector<T> h_step;
    std::vector<T> h_time;
    std::vector<T> h_shift;
};

// One conv or affine layer's shape, for analytic FLOPs accounting.
struct LayerCost {
    std::string name;
    int64_t out_elements = 0;
    int64_t kernel_volume = 0;
    int64_t in_channels = 0;

    int64_t macs() const { return out_elements * kernel_volume * in_channels; }
};

namespace detail {

// Atomic invocation counter that stays copyable so the model keeps value
// semantics.
struct CallCounter {
    std::atomic<int64_t> n{0};
    CallCounter() = default;
    CallCounter(const CallCounter& o) : n(o.n.load()) {}
    CallCounter& operator=(const CallCounter& o) {
        n.store(o.n.load());
        return *this;
    }
};

}  // namespace detail

template <typename T>
class Denoiser {
    using Tensor_ = nn::Tensor<T>;

    struct ResBlock {
        nn::Conv2d<T> conv1, conv2, skip;
        bool has_skip = false;

        struct Cache {
            Tensor_ x;
            Tensor_ pre;  // conv1 output
            Tensor_ act;  // silu(pre)
            typename nn::Conv2d<T>::Cache c1, c2, cs;
        };

        void init(nn::ParamStore<T>& ps, int in_c, int out_c) {
            conv1.init(ps, in_c, out_c, 3, 1);
            conv2.init(ps, out_c, out_c, 3, 1);
            has_skip = in_c != out_c;
            if (has_skip) skip.init(ps, in_c, out_c, 1, 1);
        }

        Tensor_ forward(const nn::ParamStore<T>& ps, const Tensor_& x,
                        Cache* cache) const {
            Tensor_ pre = conv1.forward(ps, x, cache ? &cache->c1 : nullptr);
            Tensor_ act = nn::silu(pre);
            Tensor_ y = conv2.forward(ps, act, cache ? &cache->c2 : nullptr);
            if (has_skip) {
                Tensor_ sk = skip.forward(ps, x, cache ? &cache->cs : nullptr);
                for (size_t i = 0; i < y.size(); ++i) y.v[i] += sk.v[i];
            } else {
                for (size_t i = 0; i < y.size(); ++i) y.v[i] += x.v[i];
            }
            if (cache) {
                cache->x = x;
                cache->pre = std::move(pre);
                cache->act = std::move(act);
            }
            return y;
        }

        Tensor_ backward(nn::ParamStore<T>& ps, const Cache& cache,
                         const Tensor_& gy) const {
            Tensor_ gx(cache.x.c, cache.x.h, cache.x.w);
            Tensor_ gact(cache.act.c, cache.act.h, cache.act.w);
            conv2.backward(ps, cache.c2, gy, &gact);
            Tensor_ gpre(cache.pre.c, cache.pre.h, cache.pre.w);
            nn::silu_backward(cache.pre, gact, gpre);
            conv1.backward(ps, cache.c1, gpre, &gx);
            if (has_skip) {
                skip.backward(ps, cache.cs, gy, &gx);
            } else {
                for (size_t i = 0; i < gx.size(); ++i) gx.v[i] += gy.v[i];
            }
            return gx;
        }
    };

public:
    struct Cache {
        Tensor_ input;
        std::vector<typename ResBlock::Cache> enc;
        std::vector<typename nn::Conv2d<T>::Cache> down;
        // FiLM site
        std::vector<T> embed_concat;
        std::vector<T> gamma_raw, beta;
        Tensor_ latent;  // pre-modulation bottleneck
        typename ResBlock::Cache mid;
        std::vector<typename nn::Conv2d<T>::Cache> up;
        std::vector<typename ResBlock::Cache> dec;
        typename ResBlock::Cache dec_tail;
        typename nn::Conv2d<T>::Cache final_conv;
        // condition encoder
        Tensor_ ce_pre1, ce_act1, ce_pre2, ce_act2;
        typename nn::Conv2d<T>::Cache ce_c1, ce_c2;
        std::vector<T> ce_pooled;
    };

    explicit Denoiser(const DenoiserConfig& config);

    const DenoiserConfig& config() const { return config_; }

    // He init everywhere except the FiLM affine layer, which starts at zero so
    // modulation begins as the identity (gamma = 1, beta = 0).
    void init_params(Rng& rng);

    nn::ParamStore<T>& params() { return params_; }
    const nn::ParamStore<T>& params() const { return params_; }
    int param_count() const { return params_.count(); }

    const std::vector<LayerCost>& layer_costs() const { return costs_; }

    // Epsilon prediction for one reverse transition. `shift` is the relative
    // horizon offset (nonzero only on the first transition after a branch).
    Grid<T> predict(const Grid<T>& noisy, const Grid<T>& cond, int s, int t,
                    int shift) const;

    Grid<T> forward(const Grid<T>& noisy, const Grid<T>& cond, int s, int t,
                    int shift, Cache& cache) const;
    // Accumulates parameter gradients for d(loss)/d(output) = grad_out.
    void backward(const Cache& cache, const Grid<T>& grad_out);

    EmbeddingSet<T> embeddings(const Grid<T>& cond, int s, int t, int shift) const;
    // (gamma, beta) broadcast over the bottleneck latent's channels.
    std::pair<std::vector<T>, std::vector<T>> film_params(
        const EmbeddingSet<T>& emb) const;

    int64_t calls() const { return calls_.n.load(); }
    void reset_calls() { calls_.n.store(0); }

    // Flat offset and count of the FiLM affine parameters (weights + bias).
    std::pair<int, int> film_param_range() const {
        return {film_.w_off, film_.out_dim * film_.in_dim + film_.out_dim};
    }

private:
    Tensor_ run_forward(const Tensor_& input, const Tensor_& cond, int s, int t,
                        int shift, Cache* cache) const;
    Tensor_ stack_inputs(const Grid<T>& noisy, const Grid<T>& cond) const;
    std::vector<T> cond_features(const Tensor_& cond, Cache* cache) const;
    void check_inputs(const Grid<T>& noisy, const Grid<T>& cond, int s, int t,
                      int shift) const;

    DenoiserConfig config_;
    nn::ParamStore<T> params_;
    std::vector<LayerCost> costs_;

    std::vector<int> channels_;
    std::vector<ResBlock> enc_blocks_;
    std::vector<nn::Conv2d<T>> down_convs_;
    ResBlock mid_block_;
    std::vector<nn::Conv2d<T>> up_convs_;
    std::vector<ResBlock> dec_blocks_;
    ResBlock dec_tail_;
    nn::Conv2d<T> final_conv_;

    nn::Conv2d<T> ce_conv1_, ce_conv2_;
    nn::Linear<T> ce_fc_;
    nn::Linear<T> film_;

    mutable detail::CallCounter calls_;
};

using DenoiserF = Denoiser<float>;
using DenoiserD = Denoiser<double>;

// Architecture shape walk for the analytic FLOPs estimator.
std::vector<LayerCost> layer_costs(const DenoiserConfig& config);

// Raw parameter blob IO (float32 on disk). The JSON manifest that pins the
// full experiment context is written by the io module.
void save_params(const std::filesystem::path& path, const std::vector<float>& w);
std::vector<float> load_params(const std::filesystem::path& path);

}  // namespace firecast

#include "firecast/model_impl.hpp"
