#include <benchmark/benchmark.h>

#include "firecast/eval.hpp"
#include "firecast/frm.hpp"
#include "firecast/sample.hpp"

namespace fc = firecast;

namespace {

fc::DenoiserConfig bench_model_config() {
    fc::DenoiserConfig cfg;
    cfg.height = 32;
    cfg.width = 32;
    cfg.base_channels = 8;
    cfg.depth = 3;
    cfg.embed_dim = 32;
    return cfg;
}

struct BenchContext {
    fc::DenoiserF model;
    fc::NoiseSchedule sched;
    fc::TreePlan plan;
    fc::GridF cond;

    BenchContext()
        : model(bench_model_config()),
          sched(fc::make_linear_schedule(1000, 1e-4, 0.02)),
          plan(fc::build_plan(9, 3, 1000)),
          cond(32, 32, 0.0f) {
        fc::Rng rng(1);
        model.init_params(rng);
        cond.at(16, 16) = 1.0f;
    }
};

BenchContext& context() {
    static BenchContext ctx;
    return ctx;
}

}  // namespace

static void BM_RasterizeKernel(benchmark::State& state) {
    const int size = static_cast<int>(state.range(0));
    const fc::KernelSpec spec{size / 2.0, size / 2.0, 2.5, 2.5};
    for (auto _ : state) {
        benchmark::DoNotOptimize(fc::rasterize_kernel(spec, size, size));
    }
}
BENCHMARK(BM_RasterizeKernel)->Arg(64)->Arg(128);

static void BM_DenoiserPredict(benchmark::State& state) {
    auto& ctx = context();
    fc::GridF noisy(32, 32, 0.3f);
    for (auto _ : state) {
        benchmark::DoNotOptimize(ctx.model.predict(noisy, ctx.cond, 500, 3, 0));
    }
}
BENCHMARK(BM_DenoiserPredict);

static void BM_SamplerCalls(benchmark::State& state, const char* name) {
    auto& ctx = context();
    const auto stepping =
        fc::subsample_levels(1000, static_cast<int>(state.range(0)));
    int64_t calls = 0;
    for (auto _ : state) {
        const auto run =
            fc::run_sampler(name, ctx.model, ctx.plan, stepping, ctx.cond, ctx.sched, 7);
        calls = run.call_count;
        benchmark::DoNotOptimize(run.outputs.data());
    }
    state.counters["denoiser_calls"] = static_cast<double>(calls);
}
BENCHMARK_CAPTURE(BM_SamplerCalls, tree, "tree")->Arg(10)->Arg(20)
    ->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_SamplerCalls, independent, "independent")->Arg(10)->Arg(20)
    ->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_SamplerCalls, shared, "shared")->Arg(10)->Arg(20)
    ->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
