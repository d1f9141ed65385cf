#pragma once

// Template implementation for firecast/model.hpp.

#include <cmath>
#include <string>

#include "firecast/errors.hpp"

namespace firecast {

template <typename T>
Denoiser<T>::Denoiser(const DenoiserConfig& config) : config_(config) {
    const int depth = config_.depth;
    if (depth < 1) throw NumericError("denoiser: depth must be >= 1");
    if (config_.embed_dim < 4 || config_.embed_dim % 2 != 0) {
        throw NumericError("denoiser: embed_dim must be even and >= 4");
    }
    const int div = 1 << (depth - 1);
    if (config_.height % div != 0 || config_.width % div != 0) {
        throw NumericError("denoiser: resolution must be divisible by 2^(depth-1)");
    }
    if (config_.height / div < 1 || config_.width / div < 1) {
        throw NumericError("denoiser: resolution too small for depth");
    }

    channels_.resize(static_cast<size_t>(depth));
    for (int l = 0; l < depth; ++l) channels_[static_cast<size_t>(l)] = config_.base_channels << l;
    const int ch_top = channels_.back();

    auto level_h = [&](int l) { return config_.height >> l; };
    auto level_w = [&](int l) { return config_.width >> l; };
    auto add_conv_cost = [&](const std::string& name, const nn::Conv2d<T>& conv,
                             int in_h, int in_w) {
        const int p = conv.k / 2;
        const int out_h = (in_h + 2 * p - conv.k) / conv.stride + 1;
        const int out_w = (in_w + 2 * p - conv.k) / conv.stride + 1;
        costs_.push_back({name, static_cast<int64_t>(conv.out_c) * out_h * out_w,
                          static_cast<int64_t>(conv.k) * conv.k, conv.in_c});
    };
    auto add_linear_cost = [&](const std::string& name, const nn::Linear<T>& lin) {
        costs_.push_back({name, lin.out_dim, 1, lin.in_dim});
    };
    auto add_block_cost = [&](const std::string& name, const ResBlock& block, int l) {
        add_conv_cost(name + ".conv1", block.conv1, level_h(l), level_w(l));
        add_conv_cost(name + ".conv2", block.conv2, level_h(l), level_w(l));
        if (block.has_skip) add_conv_cost(name + ".skip", block.skip, level_h(l), level_w(l));
    };

    // Encoder: one residual block per level, strided conv between levels.
    enc_blocks_.resize(static_cast<size_t>(depth));
    down_convs_.resize(static_cast<size_t>(depth - 1));
    enc_blocks_[0].init(params_, 2, channels_[0]);
    add_block_cost("enc0", enc_blocks_[0], 0);
    for (int l = 1; l < depth; ++l) {
        down_convs_[static_cast<size_t>(l) - 1].init(params_, channels_[static_cast<size_t>(l) - 1],
                                                     channels_[static_cast<size_t>(l)], 3, 2);
        add_conv_cost("down" + std::to_string(l - 1), down_convs_[static_cast<size_t>(l) - 1],
                      level_h(l - 1), level_w(l - 1));
        enc_blocks_[static_cast<size_t>(l)].init(params_, channels_[static_cast<size_t>(l)],
                                                 channels_[static_cast<size_t>(l)]);
        add_block_cost("enc" + std::to_string(l), enc_blocks_[static_cast<size_t>(l)], l);
    }

    // Condition encoder: two strided convs, pooled to an embed_dim vector.
    ce_conv1_.init(params_, 1, config_.base_channels, 3, 2);
    add_conv_cost("cond.conv1", ce_conv1_, config_.height, config_.width);
    ce_conv2_.init(params_, config_.base_channels, config_.base_channels, 3, 2);
    add_conv_cost("cond.conv2", ce_conv2_, (config_.height + 1) / 2, (config_.width + 1) / 2);
    ce_fc_.init(params_, config_.base_channels, config_.embed_dim);
    add_linear_cost("cond.fc", ce_fc_);

    // FiLM affine over the concatenated four embeddings.
    film_.init(params_, 4 * config_.embed_dim, 2 * ch_top);
    add_linear_cost("film", film_);

    mid_block_.init(params_, ch_top, ch_top);
    add_block_cost("mid", mid_block_, depth - 1);

    // Decoder: upsample + conv, then residual block over [up, skip].
    up_convs_.resize(static_cast<size_t>(depth - 1));
    dec_blocks_.resize(static_cast<size_t>(depth - 1));
    for (int i = 0; i < depth - 1; ++i) {
        const int level = depth - 2 - i;
        up_convs_[static_cast<size_t>(i)].init(params_, channels_[static_cast<size_t>(level) + 1],
                                               channels_[static_cast<size_t>(level)], 3, 1);
        add_conv_cost("up" + std::to_string(i), up_convs_[static_cast<size_t>(i)], level_h(level),
                      level_w(level));
        dec_blocks_[static_cast<size_t>(i)].init(params_, 2 * channels_[static_cast<size_t>(level)],
                                                 channels_[static_cast<size_t>(level)]);
        add_block_cost("dec" + std::to_string(i), dec_blocks_[static_cast<size_t>(i)], level);
    }
    dec_tail_.init(params_, channels_[0], channels_[0]);
    add_block_cost("dec_tail", dec_tail_, 0);

    final_conv_.init(params_, channels_[0], 1, 3, 1);
    add_conv_cost("final", final_conv_, config_.height, config_.width);
}

template <typename T>
void Denoiser<T>::init_params(Rng& rng) {
    auto block_init = [&](const ResBlock& block) {
        block.conv1.he_init(params_, rng);
        block.conv2.he_init(params_, rng, 0.1);  // near-identity residual start
        if (block.has_skip) block.skip.he_init(params_, rng);
    };
    for (const auto& block : enc_blocks_) block_init(block);
    for (const auto& conv : down_convs_) conv.he_init(params_, rng);
    ce_conv1_.he_init(params_, rng);
    ce_conv2_.he_init(params_, rng);
    ce_fc_.he_init(params_, rng);
    // Zero FiLM affine: gamma = 1, beta = 0 until training moves them.
    for (int i = 0; i < film_.out_dim * film_.in_dim; ++i) {
        params_.w[static_cast<size_t>(film_.w_off) + i] = T(0);
    }
    for (int i = 0; i < film_.out_dim; ++i) {
        params_.w[static_cast<size_t>(film_.b_off) + i] = T(0);
    }
    block_init(mid_block_);
    for (const auto& conv : up_convs_) conv.he_init(params_, rng);
    for (const auto& block : dec_blocks_) block_init(block);
    block_init(dec_tail_);
    final_conv_.he_init(params_, rng, 0.1);
}

template <typename T>
void Denoiser<T>::check_inputs(const Grid<T>& noisy, const Grid<T>& cond, int s,
                               int t, int shift) const {
    if (noisy.h != config_.height || noisy.w != config_.width) {
        throw NumericError("denoiser: noisy grid does not match configured resolution");
    }
    if (cond.h != config_.height || cond.w != config_.width) {
        throw NumericError("denoiser: condition grid does not match configured resolution");
    }
    if (s < 1) throw NumericError("denoiser: noise level must be >= 1");
    if (t < 0) throw NumericError("denoiser: horizon must be >= 0");
    if (t - shift < 0) throw NumericError("denoiser: parent horizon t - shift must be >= 0");
}

template <typename T>
typename Denoiser<T>::Tensor_ Denoiser<T>::stack_inputs(const Grid<T>& noisy,
                                                        const Grid<T>& cond) const {
    Tensor_ x(2, config_.height, config_.width);
    std::copy(noisy.v.begin(), noisy.v.end(), x.v.begin());
    std::copy(cond.v.begin(), cond.v.end(),
              x.v.begin() + static_cast<std::ptrdiff_t>(noisy.size()));
    return x;
}

template <typename T>
std::vector<T> Denoiser<T>::cond_features(const Tensor_& cond, Cache* cache) const {
    Tensor_ pre1 = ce_conv1_.forward(params_, cond, cache ? &cache->ce_c1 : nullptr);
    Tensor_ act1 = nn::silu(pre1);
    Tensor_ pre2 = ce_conv2_.forward(params_, act1, cache ? &cache->ce_c2 : nullptr);
    Tensor_ act2 = nn::silu(pre2);
    std::vector<T> pooled = nn::global_avg_pool(act2);
    std::vector<T> h_cond = ce_fc_.forward(params_, pooled);
    if (cache) {
        cache->ce_pre1 = std::move(pre1);
        cache->ce_act1 = std::move(act1);
        cache->ce_pre2 = std::move(pre2);
        cache->ce_act2 = std::move(act2);
        cache->ce_pooled = std::move(pooled);
    }
    return h_cond;
}

template <typename T>
EmbeddingSet<T> Denoiser<T>::embeddings(const Grid<T>& cond, int s, int t,
                                        int shift) const {
    Tensor_ c(1, cond.h, cond.w);
    std::copy(cond.v.begin(), cond.v.end(), c.v.begin());
    EmbeddingSet<T> emb;
    emb.h_cond = cond_features(c, nullptr);
    emb.h_step = nn::sinusoidal_embedding<T>(s, config_.embed_dim, config_.embed_base);
    emb.h_time = nn::sinusoidal_embedding<T>(t, config_.embed_dim, config_.embed_base);
    emb.h_shift = nn::sinusoidal_embedding<T>(shift, config_.embed_dim, config_.embed_base);
    return emb;
}

template <typename T>
std::pair<std::vector<T>, std::vector<T>> Denoiser<T>::film_params(
    const EmbeddingSet<T>& emb) const {
    std::vector<T> cat;
    cat.reserve(static_cast<size_t>(4) * config_.embed_dim);
    for (const auto* part : {&emb.h_cond, &emb.h_step, &emb.h_time, &emb.h_shift}) {
        cat.insert(cat.end(), part->begin(), part->end());
    }
    std::vector<T> fb = film_.forward(params_, cat);
    const int ch_top = channels_.back();
    std::vector<T> gamma(static_cast<size_t>(ch_top));
    std::vector<T> beta(static_cast<size_t>(ch_top));
    for (int c = 0; c < ch_top; ++c) {
        gamma[static_cast<size_t>(c)] = T(1) + fb[static_cast<size_t>(c)];
        beta[static_cast<size_t>(c)] = fb[static_cast<size_t>(ch_top + c)];
    }
    return {std::move(gamma), std::move(beta)};
}

template <typename T>
typename Denoiser<T>::Tensor_ Denoiser<T>::run_forward(const Tensor_& input,
                                                       const Tensor_& cond, int s,
                                                       int t, int shift,
                                                       Cache* cache) const {
    const int depth = config_.depth;
    if (cache) {
        cache->input = input;
        cache->enc.resize(static_cast<size_t>(depth));
        cache->down.resize(static_cast<size_t>(depth) - 1);
        cache->up.resize(static_cast<size_t>(depth) - 1);
        cache->dec.resize(static_cast<size_t>(depth) - 1);
    }

    // Encoder.
    std::vector<Tensor_> skips(static_cast<size_t>(depth) - 1);
    Tensor_ x = enc_blocks_[0].forward(params_, input, cache ? &cache->enc[0] : nullptr);
    for (int l = 1; l < depth; ++l) {
        skips[static_cast<size_t>(l) - 1] = x;
        x = down_convs_[static_cast<size_t>(l) - 1].forward(
            params_, x, cache ? &cache->down[static_cast<size_t>(l) - 1] : nullptr);
        x = enc_blocks_[static_cast<size_t>(l)].forward(
            params_, x, cache ? &cache->enc[static_cast<size_t>(l)] : nullptr);
    }

    // FiLM modulation of the bottleneck latent by the four embeddings.
    std::vector<T> h_cond = cond_features(cond, cache);
    std::vector<T> cat;
    cat.reserve(static_cast<size_t>(4) * config_.embed_dim);
    cat.insert(cat.end(), h_cond.begin(), h_cond.end());
    const std::vector<T> h_step =
        nn::sinusoidal_embedding<T>(s, config_.embed_dim, config_.embed_base);
    const std::vector<T> h_time =
        nn::sinusoidal_embedding<T>(t, config_.embed_dim, config_.embed_base);
    const std::vector<T> h_shift =
        nn::sinusoidal_embedding<T>(shift, config_.embed_dim, config_.embed_base);
    cat.insert(cat.end(), h_step.begin(), h_step.end());
    cat.insert(cat.end(), h_time.begin(), h_time.end());
    cat.insert(cat.end(), h_shift.begin(), h_shift.end());
    std::vector<T> fb = film_.forward(params_, cat);
    const int ch_top = channels_.back();
    Tensor_ z(x.c, x.h, x.w);
    const size_t plane = static_cast<size_t>(x.h) * x.w;
    for (int c = 0; c < ch_top; ++c) {
        const T gamma = T(1) + fb[static_cast<size_t>(c)];
        const T beta = fb[static_cast<size_t>(ch_top + c)];
        const T* src = x.v.data() + static_cast<size_t>(c) * plane;
        T* dst = z.v.data() + static_cast<size_t>(c) * plane;
        for (size_t i = 0; i < plane; ++i) dst[i] = gamma * src[i] + beta;
    }
    if (cache) {
        cache->latent = x;
        cache->embed_concat = std::move(cat);
        cache->gamma_raw.assign(fb.begin(), fb.begin() + ch_top);
        cache->beta.assign(fb.begin() + ch_top, fb.end());
    }

    x = mid_block_.forward(params_, z, cache ? &cache->mid : nullptr);

    // Decoder with skip connections.
    for (int i = 0; i < depth - 1; ++i) {
        const int level = depth - 2 - i;
        x = nn::upsample2x(x);
        x = up_convs_[static_cast<size_t>(i)].forward(
            params_, x, cache ? &cache->up[static_cast<size_t>(i)] : nullptr);
        x = nn::concat_channels(x, skips[static_cast<size_t>(level)]);
        x = dec_blocks_[static_cast<size_t>(i)].forward(
            params_, x, cache ? &cache->dec[static_cast<size_t>(i)] : nullptr);
    }
    x = dec_tail_.forward(params_, x, cache ? &cache->dec_tail : nullptr);
    return final_conv_.forward(params_, x, cache ? &cache->final_conv : nullptr);
}

template <typename T>
Grid<T> Denoiser<T>::predict(const Grid<T>& noisy, const Grid<T>& cond, int s,
                             int t, int shift) const {
    check_inputs(noisy, cond, s, t, shift);
    Tensor_ input = stack_inputs(noisy, cond);
    Tensor_ c(1, cond.h, cond.w);
    std::copy(cond.v.begin(), cond.v.end(), c.v.begin());
    Tensor_ out = run_forward(input, c, s, t, shift, nullptr);
    calls_.n.fetch_add(1, std::memory_order_relaxed);
    Grid<T> grid(out.h, out.w);
    grid.v = std::move(out.v);
    return grid;
}

template <typename T>
Grid<T> Denoiser<T>::forward(const Grid<T>& noisy, const Grid<T>& cond, int s,
                             int t, int shift, Cache& cache) const {
    check_inputs(noisy, cond, s, t, shift);
    Tensor_ input = stack_inputs(noisy, cond);
    Tensor_ c(1, cond.h, cond.w);
    std::copy(cond.v.begin(), cond.v.end(), c.v.begin());
    Tensor_ out = run_forward(input, c, s, t, shift, &cache);
    Grid<T> grid(out.h, out.w);
    grid.v = std::move(out.v);
    return grid;
}

template <typename T>
void Denoiser<T>::backward(const Cache& cache, const Grid<T>& grad_out) {
    const int depth = config_.depth;
    Tensor_ g(1, grad_out.h, grad_out.w);
    g.v = grad_out.v;

    Tensor_ gx(channels_[0], grad_out.h, grad_out.w);
    final_conv_.backward(params_, cache.final_conv, g, &gx);
    Tensor_ gcur = dec_tail_.backward(params_, cache.dec_tail, gx);

    std::vector<Tensor_> skip_grads(static_cast<size_t>(depth) - 1);
    for (int i = depth - 2; i >= 0; --i) {
        const int level = depth - 2 - i;
        Tensor_ gcat = dec_blocks_[static_cast<size_t>(i)].backward(
            params_, cache.dec[static_cast<size_t>(i)], gcur);
        Tensor_ gup, gskip;
        nn::split_channels(gcat, channels_[static_cast<size_t>(level)], gup, gskip);
        skip_grads[static_cast<size_t>(level)] = std::move(gskip);
        Tensor_ gupsampled(channels_[static_cast<size_t>(level) + 1], gup.h, gup.w);
        up_convs_[static_cast<size_t>(i)].backward(
            params_, cache.up[static_cast<size_t>(i)], gup, &gupsampled);
        gcur = nn::upsample2x_backward(gupsampled);
    }

    Tensor_ gz = mid_block_.backward(params_, cache.mid, gcur);

    // FiLM backward: latent, affine layer and the condition-encoder path.
    const int ch_top = channels_.back();
    const size_t plane = static_cast<size_t>(gz.h) * gz.w;
    Tensor_ glatent(gz.c, gz.h, gz.w);
    std::vector<T> gfb(static_cast<size_t>(2) * ch_top, T(0));
    for (int c = 0; c < ch_top; ++c) {
        const T gamma = T(1) + cache.gamma_raw[static_cast<size_t>(c)];
        const T* gsrc = gz.v.data() + static_cast<size_t>(c) * plane;
        const T* lat = cache.latent.v.data() + static_cast<size_t>(c) * plane;
        T* gdst = glatent.v.data() + static_cast<size_t>(c) * plane;
        T acc_gamma = T(0), acc_beta = T(0);
        for (size_t i = 0; i < plane; ++i) {
            gdst[i] = gamma * gsrc[i];
            acc_gamma += gsrc[i] * lat[i];
            acc_beta += gsrc[i];
        }
        gfb[static_cast<size_t>(c)] = acc_gamma;
        gfb[static_cast<size_t>(ch_top + c)] = acc_beta;
    }
    std::vector<T> gembed;
    film_.backward(params_, cache.embed_concat, gfb, &gembed);

    // Condition-encoder chain from the h_cond slice of the embedding grad.
    std::vector<T> gh_cond(gembed.begin(), gembed.begin() + config_.embed_dim);
    std::vector<T> gpooled;
    ce_fc_.backward(params_, cache.ce_pooled, gh_cond, &gpooled);
    Tensor_ gact2(cache.ce_act2.c, cache.ce_act2.h, cache.ce_act2.w);
    nn::global_avg_pool_backward(gpooled, gact2);
    Tensor_ gpre2(cache.ce_pre2.c, cache.ce_pre2.h, cache.ce_pre2.w);
    nn::silu_backward(cache.ce_pre2, gact2, gpre2);
    Tensor_ gact1(cache.ce_act1.c, cache.ce_act1.h, cache.ce_act1.w);
    ce_conv2_.backward(params_, cache.ce_c2, gpre2, &gact1);
    Tensor_ gpre1(cache.ce_pre1.c, cache.ce_pre1.h, cache.ce_pre1.w);
    nn::silu_backward(cache.ce_pre1, gact1, gpre1);
    ce_conv1_.backward(params_, cache.ce_c1, gpre1, nullptr);

    // Encoder backward.
    gcur = enc_blocks_[static_cast<size_t>(depth) - 1].backward(
        params_, cache.enc[static_cast<size_t>(depth) - 1], glatent);
    for (int l = depth - 2; l >= 0; --l) {
        Tensor_ gs(channels_[static_cast<size_t>(l)], grad_out.h >> l, grad_out.w >> l);
        down_convs_[static_cast<size_t>(l)].backward(
            params_, cache.down[static_cast<size_t>(l)], gcur, &gs);
        const Tensor_& extra = skip_grads[static_cast<size_t>(l)];
        for (size_t i = 0; i < gs.size(); ++i) gs.v[i] += extra.v[i];
        gcur = enc_blocks_[static_cast<size_t>(l)].backward(
            params_, cache.enc[static_cast<size_t>(l)], gs);
    }
}

}  // namespace firecast
