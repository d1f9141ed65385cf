#include "firecast/train.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include "firecast/eval.hpp"
#include "firecast/log.hpp"
#include "firecast/sample.hpp"

namespace firecast {

AdamW::AdamW(int param_count, OptimizerConfig config)
    : config_(config),
      m_(static_cast<size_t>(param_count), 0.0f),
      v_(static_cast<size_t>(param_count), 0.0f) {}

void AdamW::step(std::vector<float>& w, const std::vector<float>& g, double lr) {
    ++steps_;
    const double bc1 = 1.0 - std::pow(config_.beta1, static_cast<double>(steps_));
    const double bc2 = 1.0 - std::pow(config_.beta2, static_cast<double>(steps_));
    const float b1 = static_cast<float>(config_.beta1);
    const float b2 = static_cast<float>(config_.beta2);
    for (size_t i = 0; i < w.size(); ++i) {
        m_[i] = b1 * m_[i] + (1.0f - b1) * g[i];
        v_[i] = b2 * v_[i] + (1.0f - b2) * g[i] * g[i];
        const double mhat = m_[i] / bc1;
        const double vhat = v_[i] / bc2;
        // Decoupled weight decay.
        w[i] -= static_cast<float>(lr * (mhat / (std::sqrt(vhat) + config_.eps) +
                                         config_.weight_decay * w[i]));
    }
}

double cosine_lr(int64_t step, int64_t total_steps, double lr_max, double lr_min) {
    if (total_steps <= 1) return lr_max;
    const double u = static_cast<double>(std::min(step, total_steps - 1)) /
                     static_cast<double>(total_steps - 1);
    return lr_min + 0.5 * (lr_max - lr_min) * (1.0 + std::cos(std::numbers::pi * u));
}

std::vector<std::pair<int, int>> branch_transitions(const TreePlan& plan) {
    std::vector<std::pair<int, int>> transitions;
    for (int level = 2; level <= plan.depth; ++level) {
        for (const TreeNode& n : plan.levels[static_cast<size_t>(level) - 1]) {
            transitions.emplace_back(n.parent_horizon, n.horizon);
        }
    }
    return transitions;
}

std::pair<int, int> sample_pair(const TreePlan& plan, double p_tree, Rng& rng) {
    if (plan.horizons == 1) return {0, 0};
    if (rng.uniform() < p_tree) {
        const auto transitions = branch_transitions(plan);
        const auto& pick =
            transitions[static_cast<size_t>(rng.uniform_int(0, static_cast<int64_t>(transitions.size()) - 1))];
        return pick;
    }
    const int t = static_cast<int>(rng.uniform_int(0, plan.horizons - 1));
    return {t, t};
}

double validation_rmse(DenoiserF& model, const SegmentDataset& data,
                       const SegmentIndex& split, const TreePlan& plan,
                       const NoiseSchedule& sched, int d_test, int max_segments,
                       uint64_t seed) {
    const InferenceStepping stepping = subsample_levels(sched.steps(), d_test);
    const int count = std::min<int>(max_segments, static_cast<int>(split.segments.size()));
    if (count == 0) throw DataError("validation_rmse: split holds no segments");
    double acc = 0.0;
    for (int i = 0; i < count; ++i) {
        const Segment& seg = split.segments[static_cast<size_t>(i)];
        const SamplerRun run =
            run_tree(model, plan, stepping, data.conditioning(seg), sched,
                     derive_seed(seed, "valseg", static_cast<uint64_t>(i)));
        acc += quality(run.outputs, data.targets(seg)).rmse;
    }
    return acc / count;
}

namespace {

GridF draw_noise_grid(int h, int w, Rng& rng) {
    GridF g(h, w);
    for (auto& v : g.v) v = static_cast<float>(rng.normal());
    return g;
}

void append_metrics(const std::filesystem::path& path, const StepRecord& rec) {
    if (path.empty()) return;
    std::ofstream out(path, std::ios::app);
    out << "{\"step\":" << rec.step << ",\"l1_i\":" << rec.loss.l1_i
        << ",\"l1_j\":" << rec.loss.l1_j << ",\"l2_ij\":" << rec.loss.l2_ij
        << ",\"l2_ji\":" << rec.loss.l2_ji << ",\"total\":" << rec.loss.total()
        << ",\"lr\":" << rec.lr << "}\n";
}

}  // namespace

TrainResult train_loop(DenoiserF& model, const SegmentDataset& data,
                       const TreePlan& plan, const NoiseSchedule& sched,
                       const TrainOptions& options) {
    data.validate();
    const auto& train_split = data.train();
    if (train_split.segments.empty()) {
        throw DataError("train_loop: train split holds no segments");
    }
    if (options.resume_from) {
        std::vector<float> w = load_params(*options.resume_from);
        if (static_cast<int>(w.size()) != model.param_count()) {
            throw DataError("train_loop: checkpoint parameter count mismatch");
        }
        model.params().w = std::move(w);
    }

    const int num_segments = static_cast<int>(train_split.segments.size());
    const int steps_per_epoch = (num_segments + options.batch_size - 1) / options.batch_size;
    const int64_t total_steps = static_cast<int64_t>(options.epochs) * steps_per_epoch;

    AdamW optimizer(model.param_count(), OptimizerConfig{.weight_decay = options.weight_decay});
    Rng order_rng(derive_seed(options.seed, "order"));
    Rng pair_rng(derive_seed(options.seed, "pair"));
    Rng noise_rng(derive_seed(options.seed, "noise"));

    TrainResult result;
    const uint64_t val_seed = derive_seed(options.seed, "val");
    const bool has_val = !data.val().segments.empty();
    auto validate = [&]() {
        return has_val ? validation_rmse(model, data, data.val(), plan, sched,
                                         options.d_test, options.val_segments, val_seed)
                       : std::numeric_limits<double>::quiet_NaN();
    };
    result.untrained_val_rmse = validate();
    result.best_val_rmse = result.untrained_val_rmse;

    auto checkpoint = [&](const std::string& stem) {
        if (options.checkpoint_dir.empty()) return std::filesystem::path{};
        std::filesystem::create_directories(options.checkpoint_dir);
        const auto path = options.checkpoint_dir / (stem + ".params");
        save_params(path, model.params().w);
        return path;
    };

    std::vector<int> order(static_cast<size_t>(num_segments));
    for (int i = 0; i < num_segments; ++i) order[static_cast<size_t>(i)] = i;

    int64_t step = 0;
    for (int epoch = 0; epoch < options.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), order_rng.engine());
        for (int b = 0; b < steps_per_epoch; ++b) {
            const double lr = cosine_lr(step, total_steps, options.lr_max, options.lr_min);
            model.params().zero_grad();

            LossBreakdown mean_loss;
            int items = 0;
            for (int k = 0; k < options.batch_size; ++k) {
                const int pick = order[static_cast<size_t>((b * options.batch_size + k) % num_segments)];
                const Segment& seg = train_split.segments[static_cast<size_t>(pick)];
                PairBatch<float> batch;
                std::tie(batch.t_i, batch.t_j) = sample_pair(plan, options.p_tree, pair_rng);
                batch.s = static_cast<int>(noise_rng.uniform_int(1, sched.steps()));
                batch.cond = data.conditioning(seg);
                batch.clean_i = data.target(seg, batch.t_i);
                batch.clean_j = data.target(seg, batch.t_j);
                batch.eps_i = draw_noise_grid(data.height(), data.width(), noise_rng);
                batch.eps_j = draw_noise_grid(data.height(), data.width(), noise_rng);

                const LossBreakdown lb =
                    dual_path_terms(model, batch, sched, true, 1.0 / options.batch_size);
                if (!std::isfinite(lb.total())) {
                    throw NumericError(
                        "train_loop: non-finite loss at step " + std::to_string(step) +
                        " (segment " + std::to_string(seg.start_day) + ", t_i=" +
                        std::to_string(batch.t_i) + ", t_j=" + std::to_string(batch.t_j) +
                        ", s=" + std::to_string(batch.s) + ")");
                }
                mean_loss.l1_i += lb.l1_i;
                mean_loss.l1_j += lb.l1_j;
                mean_loss.l2_ij += lb.l2_ij;
                mean_loss.l2_ji += lb.l2_ji;
                ++items;
            }
            mean_loss.l1_i /= items;
            mean_loss.l1_j /= items;
            mean_loss.l2_ij /= items;
            mean_loss.l2_ji /= items;

            optimizer.step(model.params().w, model.params().g, lr);
            ++step;

            const StepRecord rec{step, mean_loss, lr};
            result.history.push_back(rec);
            append_metrics(options.metrics_log, rec);

            const bool interval_hit =
                options.val_interval > 0 && step % options.val_interval == 0;
            const bool epoch_end = b + 1 == steps_per_epoch;
            if (has_val && (interval_hit || (options.val_interval == 0 && epoch_end))) {
                const double rmse = validate();
                result.final_val_rmse = rmse;
                if (rmse < result.best_val_rmse) {
                    result.best_val_rmse = rmse;
                    result.best_step = step;
                    result.best_checkpoint = checkpoint("best");
                }
            }
            const bool ckpt_hit =
                options.checkpoint_interval > 0 && step % options.checkpoint_interval == 0;
            if (ckpt_hit || epoch_end) {
                result.last_checkpoint = checkpoint("last");
            }
        }
    }
    result.steps = step;
    if (has_val && result.best_checkpoint.empty()) {
        result.best_checkpoint = result.last_checkpoint;
    }
    return result;
}

}  // namespace firecast
