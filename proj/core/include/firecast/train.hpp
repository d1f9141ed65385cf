#pragma once

// Dual-path training: the standard noise-prediction objective plus the
// shifted objective that regresses a reused noisy state toward a different
// horizon's clean map, applied symmetrically over a sampled horizon pair.

#include <cmath>
#include <filesystem>
#include <optional>
#include <vector>

#include "firecast/dataset.hpp"
#include "firecast/model.hpp"
#include "firecast/schedule.hpp"
#include "firecast/treeplan.hpp"

namespace firecast {

template <typename T>
struct PairBatch {
    Grid<T> cond;
    int t_i = 0, t_j = 0;
    Grid<T> clean_i, clean_j;
    int s = 1;
    Grid<T> eps_i, eps_j;
};

struct LossBreakdown {
    double l1_i = 0.0;
    double l1_j = 0.0;
    double l2_ij = 0.0;
    double l2_ji = 0.0;
    double total() const { return l1_i + l1_j + l2_ij + l2_ji; }
};

template <typename T>
double mse(const Grid<T>& a, const Grid<T>& b) {
    require_same_shape(a, b, "mse");
    double acc = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        const double r = static_cast<double>(a.v[i]) - static_cast<double>(b.v[i]);
        acc += r * r;
    }
    return acc / static_cast<double>(a.size());
}

// Regression target (noisy - sqrt(abar) * clean) / sqrt(1 - abar). When
// `clean` is the map the noisy state was built from, this is the injected
// noise; under a shift it is the cross-horizon residual.
template <typename T>
Grid<T> noise_residual_target(const Grid<T>& noisy, const Grid<T>& clean,
                              double alpha_bar) {
    require_same_shape(noisy, clean, "noise_residual_target");
    const T a = static_cast<T>(std::sqrt(alpha_bar));
    const T inv_b = static_cast<T>(1.0 / std::sqrt(1.0 - alpha_bar));
    Grid<T> target(noisy.h, noisy.w);
    for (size_t i = 0; i < noisy.size(); ++i) {
        target.v[i] = (noisy.v[i] - a * clean.v[i]) * inv_b;
    }
    return target;
}

// One objective term: epsilon-MSE of the model against the residual target,
// conditioned on (s, t, shift). Optionally backpropagates grad_scale * dL.
template <typename T>
double dual_path_term(Denoiser<T>& model, const Grid<T>& noisy, const Grid<T>& cond,
                 const Grid<T>& clean_target, double alpha_bar, int s, int t,
                 int shift, bool accumulate_grads = false, double grad_scale = 1.0) {
    const Grid<T> target = noise_residual_target(noisy, clean_target, alpha_bar);
    if (!accumulate_grads) {
        const Grid<T> pred = model.predict(noisy, cond, s, t, shift);
        return mse(pred, target);
    }
    typename Denoiser<T>::Cache cache;
    const Grid<T> pred = model.forward(noisy, cond, s, t, shift, cache);
    const double loss = mse(pred, target);
    Grid<T> grad(pred.h, pred.w);
    const double scale = 2.0 * grad_scale / static_cast<double>(pred.size());
    for (size_t i = 0; i < pred.size(); ++i) {
        grad.v[i] = static_cast<T>(scale * (static_cast<double>(pred.v[i]) -
                                            static_cast<double>(target.v[i])));
    }
    model.backward(cache, grad);
    return loss;
}

// Standard path: noisy state rooted at clean_i, conditioned with shift 0.
template <typename T>
double loss_standard(Denoiser<T>& model, const PairBatch<T>& batch,
                     const NoiseSchedule& sched) {
    const Grid<T> noisy = forward_noise(batch.clean_i, batch.s, sched, batch.eps_i);
    return dual_path_term(model, noisy, batch.cond, batch.clean_i,
                     sched.alpha_bar(batch.s), batch.s, batch.t_i, 0);
}

enum class ShiftDirection { i_to_j, j_to_i };

// Shifted path: the noisy state is reused (no second forward noising); the
// target and conditioning move to the other horizon.
template <typename T>
double loss_shifted(Denoiser<T>& model, const PairBatch<T>& batch,
                    const NoiseSchedule& sched, ShiftDirection direction) {
    if (direction == ShiftDirection::i_to_j) {
        const Grid<T> noisy = forward_noise(batch.clean_i, batch.s, sched, batch.eps_i);
        return dual_path_term(model, noisy, batch.cond, batch.clean_j,
                         sched.alpha_bar(batch.s), batch.s, batch.t_j,
                         batch.t_j - batch.t_i);
    }
    const Grid<T> noisy = forward_noise(batch.clean_j, batch.s, sched, batch.eps_j);
    return dual_path_term(model, noisy, batch.cond, batch.clean_i,
                     sched.alpha_bar(batch.s), batch.s, batch.t_i,
                     batch.t_i - batch.t_j);
}

// All four terms of one pair, with gradient accumulation.
template <typename T>
LossBreakdown dual_path_terms(Denoiser<T>& model, const PairBatch<T>& batch,
                         const NoiseSchedule& sched, bool accumulate_grads,
                         double grad_scale = 1.0) {
    const double abar = sched.alpha_bar(batch.s);
    const Grid<T> noisy_i = forward_noise(batch.clean_i, batch.s, sched, batch.eps_i);
    const Grid<T> noisy_j = forward_noise(batch.clean_j, batch.s, sched, batch.eps_j);
    LossBreakdown lb;
    lb.l1_i = dual_path_term(model, noisy_i, batch.cond, batch.clean_i, abar, batch.s,
                        batch.t_i, 0, accumulate_grads, grad_scale);
    lb.l1_j = dual_path_term(model, noisy_j, batch.cond, batch.clean_j, abar, batch.s,
                        batch.t_j, 0, accumulate_grads, grad_scale);
    lb.l2_ij = dual_path_term(model, noisy_i, batch.cond, batch.clean_j, abar, batch.s,
                         batch.t_j, batch.t_j - batch.t_i, accumulate_grads, grad_scale);
    lb.l2_ji = dual_path_term(model, noisy_j, batch.cond, batch.clean_i, abar, batch.s,
                         batch.t_i, batch.t_i - batch.t_j, accumulate_grads, grad_scale);
    return lb;
}

// ---------------------------------------------------------------------------
// Optimization.

struct OptimizerConfig {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double weight_decay = 1e-4;
};

class AdamW {
public:
    AdamW(int param_count, OptimizerConfig config = {});

    void step(std::vector<float>& w, const std::vector<float>& g, double lr);

    int64_t steps() const { return steps_; }
    std::vector<float>& moment1() { return m_; }
    std::vector<float>& moment2() { return v_; }
    void set_steps(int64_t steps) { steps_ = steps; }

private:
    OptimizerConfig config_;
    std::vector<float> m_, v_;
    int64_t steps_ = 0;
};

double cosine_lr(int64_t step, int64_t total_steps, double lr_max, double lr_min);

// ---------------------------------------------------------------------------
// Pair sampling and the training loop.

// With probability p_tree draw a (parent, child) horizon pair realized at a
// branch transition of the plan, uniformly over transitions; otherwise draw
// t_i = t_j uniformly.
std::pair<int, int> sample_pair(const TreePlan& plan, double p_tree, Rng& rng);

// All (parent, child) horizon pairs at branch transitions of the plan.
std::vector<std::pair<int, int>> branch_transitions(const TreePlan& plan);

struct TrainOptions {
    int epochs = 1;
    int batch_size = 4;
    double lr_max = 1e-4;
    double lr_min = 1e-6;
    double weight_decay = 1e-4;
    double p_tree = 0.8;
    uint64_t seed = 0;
    int d_test = 10;          // validation sampling steps
    int val_interval = 0;     // steps between validations; 0 = each epoch end
    int val_segments = 2;     // validation segments evaluated per pass
    int checkpoint_interval = 0;  // steps; 0 = each epoch end
    std::filesystem::path checkpoint_dir;  // empty = no checkpoints
    std::filesystem::path metrics_log;     // JSONL; empty = disabled
    std::optional<std::filesystem::path> resume_from;  // params file
};

struct StepRecord {
    int64_t step = 0;
    LossBreakdown loss;
    double lr = 0.0;
};

struct TrainResult {
    int64_t steps = 0;
    int64_t best_step = 0;
    double untrained_val_rmse = 0.0;
    double best_val_rmse = 0.0;
    double final_val_rmse = 0.0;
    std::filesystem::path best_checkpoint;
    std::filesystem::path last_checkpoint;
    std::vector<StepRecord> history;
};

TrainResult train_loop(DenoiserF& model, const SegmentDataset& data,
                       const TreePlan& plan, const NoiseSchedule& sched,
                       const TrainOptions& options);

// Validation RMSE of the tree sampler against split targets (capped segment
// count); shared by the training loop and the evaluate command.
double validation_rmse(DenoiserF& model, const SegmentDataset& data,
                       const SegmentIndex& split, const TreePlan& plan,
                       const NoiseSchedule& sched, int d_test, int max_segments,
                       uint64_t seed);

}  // namespace firecast
