// End-to-end tests driving the installed CLI binary.

#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <string>

#include "firecast/io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string kCli = FIRECAST_CLI_PATH;

struct RunResult {
    int exit_code = -1;
    std::string output;
};

RunResult run(const std::string& args) {
    const std::string cmd = kCli + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult result;
    std::array<char, 4096> buf;
    while (fgets(buf.data(), buf.size(), pipe)) result.output += buf.data();
    const int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

json read_json(const fs::path& path) {
    std::ifstream in(path);
    REQUIRE(in);
    json j;
    in >> j;
    return j;
}

uint64_t hash_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::string bytes((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
    return firecast::hash_bytes(bytes.data(), bytes.size());
}

struct TempDir {
    fs::path path;
    explicit TempDir(const char* name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

// Tiny synthetic experiment shared by the pipeline tests.
std::string tiny_overrides() {
    return "--set data.synthetic.enabled=true --set data.synthetic.num_segments=7 "
           "--set data.resolution=[16,16] --set data.segment_length=5 "
           "--set model.height=16 --set model.width=16 --set model.base_channels=4 "
           "--set model.depth=2 --set model.embed_dim=8 "
           "--set diffusion.d_train=40 --set diffusion.d_test=5 "
           "--set diffusion.beta_end=0.15 --set tree.depth=3 "
           "--set train.epochs=1 --set train.batch_size=2 --seed 21";
}

}  // namespace

TEST_CASE("plan-tree prints the default plan and writes JSON") {
    TempDir dir("firecast_cli_plan");
    const auto out = dir.path / "plan.json";
    const RunResult r = run("plan-tree --json " + out.string());
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("calls_nt          = 10000") != std::string::npos);
    const json j = read_json(out);
    CHECK(j.at("calls_nt") == 10000);
    CHECK(j.at("calls_traditional") == 27000);
    CHECK(j.at("reduction_exact") == doctest::Approx(2.7));

    const RunResult l2 = run("plan-tree --L 2 --json " + out.string());
    CHECK(l2.exit_code == 0);
    const json j2 = read_json(out);
    CHECK(j2.at("branching") == json::array({27}));
    CHECK(j2.at("reduction_exact") == doctest::Approx(27.0 / 14.0));

    const RunResult l3 = run("plan-tree --L 3 --curve --json " + out.string());
    CHECK(l3.exit_code == 0);
    const json j3 = read_json(out);
    CHECK(j3.at("branching") == json::array({9, 3}));
    CHECK(j3.contains("depth_sweep"));
}

TEST_CASE("full toy pipeline: build-data, train, sample, evaluate, render") {
    TempDir dir("firecast_cli_pipeline");
    const std::string data_dir = (dir.path / "data").string();
    const std::string ckpt_dir = (dir.path / "ckpt").string();
    const std::string out_dir = (dir.path / "samples").string();

    // build-data, twice: outputs must be byte-identical (idempotence).
    const std::string build_cmd = "build-data " + tiny_overrides() + " --out " + data_dir;
    const RunResult b1 = run(build_cmd);
    REQUIRE_MESSAGE(b1.exit_code == 0, b1.output);
    REQUIRE(fs::exists(fs::path(data_dir) / "manifest.json"));
    const uint64_t frame0 = hash_file(fs::path(data_dir) / "frm_00000.f32");
    const uint64_t manifest_hash = hash_file(fs::path(data_dir) / "manifest.json");
    const RunResult b2 = run(build_cmd);
    REQUIRE(b2.exit_code == 0);
    CHECK(hash_file(fs::path(data_dir) / "frm_00000.f32") == frame0);
    CHECK(hash_file(fs::path(data_dir) / "manifest.json") == manifest_hash);

    const json manifest = read_json(fs::path(data_dir) / "manifest.json");
    CHECK(manifest.at("num_days") == 7 * 5);
    CHECK(manifest.at("horizons") == 4);

    // train one epoch.
    const RunResult t = run("train " + tiny_overrides() + " --dataset " + data_dir +
                            " --out " + ckpt_dir);
    REQUIRE_MESSAGE(t.exit_code == 0, t.output);
    REQUIRE(fs::exists(fs::path(ckpt_dir) / "last.params"));
    REQUIRE(fs::exists(fs::path(ckpt_dir) / "last.json"));
    REQUIRE(fs::exists(fs::path(ckpt_dir) / "metrics.jsonl"));
    const json ckpt_manifest = read_json(fs::path(ckpt_dir) / "last.json");
    CHECK(ckpt_manifest.at("tree").at("horizons") == 4);
    CHECK(ckpt_manifest.at("schedule").at("d_train") == 40);

    // sample with the tree sampler.
    const std::string params = (fs::path(ckpt_dir) / "last.params").string();
    const RunResult s = run("sample " + tiny_overrides() + " --checkpoint " + params +
                            " --dataset " + data_dir + " --day 0 --sampler tree --out " +
                            out_dir);
    REQUIRE_MESSAGE(s.exit_code == 0, s.output);
    const json run_manifest = read_json(fs::path(out_dir) / "run_manifest.json");
    CHECK(run_manifest.at("details").at("sampler") == "tree");
    // depth 3 over 5 steps: segments (2,2,1) -> 1*2 + 2*2 + 4*1 = 10 calls.
    CHECK(run_manifest.at("details").at("call_counter") == 10);
    for (int t_idx = 0; t_idx < 4; ++t_idx) {
        CHECK(fs::exists(firecast::frm_data_path(out_dir, t_idx)));
    }

    // evaluate on the test split, with heatmap emission.
    const auto metrics_path = dir.path / "metrics.json";
    const auto render_dir = dir.path / "heatmaps";
    const RunResult e = run("evaluate " + tiny_overrides() + " --checkpoint " + params +
                            " --dataset " + data_dir + " --split test --json " +
                            metrics_path.string() + " --render " + render_dir.string());
    REQUIRE_MESSAGE(e.exit_code == 0, e.output);
    const json metrics = read_json(metrics_path);
    CHECK(metrics.at("rmse").get<double>() >= 0.0);
    CHECK(metrics.at("rmse").get<double>() < 10.0);
    CHECK(metrics.at("kl_direction").get<std::string>().find("KL(target||pred)") !=
          std::string::npos);
    CHECK(metrics.at("provenance").at("config_hash").is_string());
    CHECK(fs::exists(render_dir / "pred_t00.png"));
    CHECK(fs::exists(render_dir / "target_t03.png"));

    // render a stored frame and a sampled horizon.
    const auto png = dir.path / "day0.png";
    const RunResult r1 = run("render --dataset " + data_dir + " --day 0 --out " +
                             png.string());
    REQUIRE_MESSAGE(r1.exit_code == 0, r1.output);
    std::ifstream png_in(png, std::ios::binary);
    std::array<unsigned char, 8> magic{};
    png_in.read(reinterpret_cast<char*>(magic.data()), 8);
    CHECK(magic == std::array<unsigned char, 8>{0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'});

    // bench over two step counts.
    const auto bench_path = dir.path / "bench.json";
    const RunResult bench = run("bench " + tiny_overrides() + " --checkpoint " + params +
                                " --dataset " + data_dir +
                                " --steps 4 --steps 8 --repeats 3 --json " +
                                bench_path.string());
    REQUIRE_MESSAGE(bench.exit_code == 0, bench.output);
    const json bench_json = read_json(bench_path);
    CHECK(bench_json.at("rows").size() == 6);  // 3 samplers x 2 step counts
    CHECK(bench_json.at("tree_below_independent").is_boolean());
}

TEST_CASE("cli error paths map to the documented exit codes") {
    TempDir dir("firecast_cli_errors");

    // Usage error: unknown subcommand.
    CHECK(run("frobnicate").exit_code == 1);

    // Data error: missing csv names the path.
    const RunResult missing =
        run("build-data --set data.csv_path=/nonexistent/file.csv --out " +
            (dir.path / "d").string());
    CHECK(missing.exit_code == 2);
    CHECK(missing.output.find("/nonexistent/file.csv") != std::string::npos);

    // Usage error: synthetic off and no csv configured.
    const RunResult nocsv = run("build-data --out " + (dir.path / "d2").string());
    CHECK(nocsv.exit_code == 1);

    // Data error: train without a dataset.
    const RunResult notrain =
        run("train --dataset " + (dir.path / "nothing").string());
    CHECK(notrain.exit_code == 2);
    CHECK(notrain.output.find("build-data") != std::string::npos);
}

TEST_CASE("sample rejects a checkpoint whose resolution mismatches the dataset") {
    TempDir dir("firecast_cli_mismatch");
    const std::string data16 = (dir.path / "d16").string();
    const std::string data32 = (dir.path / "d32").string();
    const std::string ckpt = (dir.path / "ckpt").string();

    REQUIRE(run("build-data " + tiny_overrides() + " --out " + data16).exit_code == 0);
    REQUIRE(run("train " + tiny_overrides() + " --dataset " + data16 + " --out " + ckpt)
                .exit_code == 0);

    std::string big = tiny_overrides();
    const std::string from = "data.resolution=[16,16]";
    big.replace(big.find(from), from.size(), "data.resolution=[32,32]");
    REQUIRE(run("build-data " + big + " --out " + data32).exit_code == 0);

    const std::string params = (fs::path(ckpt) / "last.params").string();
    const RunResult r = run("sample " + tiny_overrides() + " --checkpoint " + params +
                            " --dataset " + data32 + " --day 0");
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("resolution") != std::string::npos);
}

TEST_CASE("sampling reruns with one seed are reproducible through the CLI") {
    TempDir dir("firecast_cli_repro");
    const std::string data_dir = (dir.path / "data").string();
    const std::string ckpt_dir = (dir.path / "ckpt").string();
    REQUIRE(run("build-data " + tiny_overrides() + " --out " + data_dir).exit_code == 0);
    REQUIRE(run("train " + tiny_overrides() + " --dataset " + data_dir + " --out " +
                ckpt_dir)
                .exit_code == 0);
    const std::string params = (fs::path(ckpt_dir) / "last.params").string();

    const std::string out_a = (dir.path / "a").string();
    const std::string out_b = (dir.path / "b").string();
    for (const std::string& out : {out_a, out_b}) {
        REQUIRE(run("sample " + tiny_overrides() + " --checkpoint " + params +
                    " --dataset " + data_dir + " --day 2 --out " + out)
                    .exit_code == 0);
    }
    for (int t = 0; t < 4; ++t) {
        CHECK(hash_file(firecast::frm_data_path(out_a, t)) ==
              hash_file(firecast::frm_data_path(out_b, t)));
    }
}
