// End-to-end runs of the installed binary.  Each test gets its own scratch
// directory; the helper captures exit code, stdout, and stderr.

#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ambiup/checkpoint.hpp"
#include "ambiup/grid.hpp"
#include "ambiup/synth.hpp"
#include "ambiup/wav.hpp"

namespace ambiup {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class CliTest : public ::testing::Test {
  protected:
    void SetUp() override {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir_ = fs::temp_directory_path() /
               ("ambiup_cli_" + std::to_string(::getpid()) + "_" + info->name());
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    int run(const std::string& args) {
        const std::string out = path("cli_stdout.txt");
        const std::string err = path("cli_stderr.txt");
        const std::string cmd =
            std::string(AMBIUP_CLI_PATH) + " " + args + " >" + out + " 2>" + err;
        const int status = std::system(cmd.c_str());
        stdout_text = slurp(out);
        stderr_text = slurp(err);
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    }

    static std::string slurp(const std::string& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    std::string write_mono(const std::string& name, double duration_s, double rate) {
        WavData wav;
        wav.sample_rate = rate;
        wav.channels = {pink_noise(duration_s, rate, 11)};
        const std::string p = path(name);
        write_wav(p, wav);
        return p;
    }

    std::string write_model_config(const std::string& name) {
        const json cfg = {{"n_enc", 8},    {"kernel_len", 8}, {"enc_stride", 4},
                          {"n_bottleneck", 6}, {"n_conv", 8},     {"p_kernel", 3},
                          {"x_blocks", 2},  {"repeats", 1},    {"sample_rate", 8000.0}};
        const std::string p = path(name);
        std::ofstream(p) << cfg.dump(2);
        return p;
    }

    fs::path dir_;
    std::string stdout_text;
    std::string stderr_text;
};

TEST_F(CliTest, EncodeProducesChannelsSidecarAndManifest) {
    const std::string in = write_mono("mono.wav", 0.05, 8000.0);
    const std::string out = path("enc.wav");
    ASSERT_EQ(run("encode --in " + in + " --az 30 --el 10 --order 3 --out " + out), 0)
        << stderr_text;

    const WavData enc = read_wav(out);
    EXPECT_EQ(enc.channels.size(), 16u);
    EXPECT_EQ(enc.sample_rate, 8000.0);

    const json side = json::parse(slurp(out + ".ambix.json"));
    EXPECT_EQ(side["channel_order"], "ACN");
    EXPECT_EQ(side["normalization"], "SN3D");
    EXPECT_EQ(side["order"], 3);

    const json manifest = json::parse(slurp(out + ".manifest.json"));
    EXPECT_EQ(manifest["subcommand"], "encode");
    EXPECT_EQ(manifest["args"]["az_deg"], 30.0);
}

TEST_F(CliTest, DecodeConcentratesEnergyAtSourcePoint) {
    // Encode exactly at a grid point; the sampling decoder's kernel then peaks
    // at that point and nowhere else.
    const GridLayout grid = fibonacci_grid(8);
    const double az_deg = grid.points[3].azimuth() * 180.0 / M_PI;
    const double el_deg = grid.points[3].elevation() * 180.0 / M_PI;
    std::ostringstream angles;
    angles << std::setprecision(17) << "--az " << az_deg << " --el " << el_deg;

    const std::string in = write_mono("mono.wav", 0.05, 8000.0);
    const std::string enc = path("enc.wav");
    ASSERT_EQ(run("encode --in " + in + " " + angles.str() + " --out " + enc), 0) << stderr_text;

    const std::string feeds_path = path("feeds.wav");
    ASSERT_EQ(run("decode --in " + enc + " --grid fib:8 --decoder sampling --out " + feeds_path),
              0)
        << stderr_text;

    const WavData feeds = read_wav(feeds_path);
    ASSERT_EQ(feeds.channels.size(), 8u);
    std::size_t argmax = 0;
    double best = -1.0;
    for (std::size_t q = 0; q < feeds.channels.size(); ++q) {
        double e = 0.0;
        for (double v : feeds.channels[q]) e += v * v;
        if (e > best) {
            best = e;
            argmax = q;
        }
    }
    EXPECT_EQ(argmax, 3u);
}

TEST_F(CliTest, DecodeRejectsUnknownDecoder) {
    const std::string in = write_mono("mono.wav", 0.02, 8000.0);
    const std::string enc = path("enc.wav");
    ASSERT_EQ(run("encode --in " + in + " --az 0 --el 0 --out " + enc), 0);
    EXPECT_EQ(run("decode --in " + enc + " --grid fib:4 --decoder magic --out " + path("f.wav")),
              2);
    EXPECT_NE(stderr_text.find("argument error"), std::string::npos);
}

TEST_F(CliTest, EvaluateWritesCsvSummaryAndManifest) {
    const std::string out = path("eval.csv");
    ASSERT_EQ(run("evaluate --renderers foa,hoa3 --grid fib:4 --duration 0.02 --rate 8000 "
                  "--out " + out),
              0)
        << stderr_text;

    std::istringstream csv(slurp(out));
    std::string header;
    std::getline(csv, header);
    EXPECT_EQ(header,
              "point_index,azimuth_deg,elevation_deg,foa-linear_error_db,hoa3-linear_error_db");
    int rows = 0;
    for (std::string line; std::getline(csv, line);) {
        if (!line.empty()) ++rows;
    }
    EXPECT_EQ(rows, 4);

    const json summary = json::parse(slurp(out + ".summary.json"));
    EXPECT_TRUE(summary["renderers"].contains("foa-linear"));
    EXPECT_TRUE(summary["renderers"]["foa-linear"].contains("mean_db"));
    EXPECT_TRUE(summary["deltas"].contains("foa-linear-minus-hoa3-linear"));

    const json manifest = json::parse(slurp(out + ".manifest.json"));
    EXPECT_EQ(manifest["subcommand"], "evaluate");
    EXPECT_EQ(manifest["grid_points"], 4);
}

TEST_F(CliTest, EvaluateMissingCheckpointFailsWithIoError) {
    EXPECT_EQ(run("evaluate --renderers upscaled:" + path("nope.ckpt") +
                  " --grid fib:4 --duration 0.02 --rate 8000 --out " + path("e.csv")),
              3);
    EXPECT_NE(stderr_text.find("io error"), std::string::npos);
}

TEST_F(CliTest, BadInvocationsFailCleanly) {
    EXPECT_NE(run("encode --in " + path("mono.wav")), 0);  // missing required flags
    EXPECT_NE(run("frobnicate"), 0);                       // unknown subcommand
    EXPECT_EQ(run("evaluate --renderers hoa2 --grid fib:4 --out " + path("e.csv")), 2);
    EXPECT_EQ(run("encode --in " + path("absent.wav") + " --az 0 --el 0 --out " + path("o.wav")),
              3);
    EXPECT_NE(stderr_text.find("io error"), std::string::npos);
}

TEST_F(CliTest, GridCheckReportsExactnessOfBundledDesign) {
    const std::string design = (fs::path(AMBIUP_DATA_DIR) / "tdesign24.txt").string();
    const std::string out = path("report.json");
    ASSERT_EQ(run("grid-check --grid " + design + " --order 4 --out " + out), 0) << stderr_text;

    const json report = json::parse(slurp(out));
    EXPECT_EQ(report["points"], 24);
    ASSERT_EQ(report["orders"].size(), 4u);
    for (int l = 0; l < 3; ++l) {
        EXPECT_TRUE(report["orders"][l]["exact_at_1e-10"].get<bool>()) << "order " << (l + 1);
    }
    EXPECT_FALSE(report["orders"][3]["exact_at_1e-10"].get<bool>());
    EXPECT_NE(stdout_text.find("quadrature_error"), std::string::npos);
}

TEST_F(CliTest, AugmentWritesSceneTriplesDeterministically) {
    const std::string args =
        " --count 3 --min-sources 1 --max-sources 2 --duration 0.25 --rate 8000";
    ASSERT_EQ(run("--seed 5 augment --out " + path("corpus_a") + args), 0) << stderr_text;
    ASSERT_EQ(run("--seed 5 augment --out " + path("corpus_b") + args), 0) << stderr_text;

    for (int i = 0; i < 3; ++i) {
        char stem[32];
        std::snprintf(stem, sizeof(stem), "scene_%06d", i);
        const std::string base_a = (fs::path(path("corpus_a")) / stem).string();
        const WavData foa = read_wav(base_a + "_foa.wav");
        const WavData hoa = read_wav(base_a + "_hoa3.wav");
        EXPECT_EQ(foa.channels.size(), 4u);
        EXPECT_EQ(hoa.channels.size(), 16u);
        EXPECT_EQ(foa.channels[0].size(), 2000u);  // 0.25 s at 8 kHz

        const json scene = json::parse(slurp(base_a + ".scene.json"));
        EXPECT_TRUE(scene.contains("sources"));

        const std::string base_b = (fs::path(path("corpus_b")) / stem).string();
        EXPECT_EQ(slurp(base_a + "_foa.wav"), slurp(base_b + "_foa.wav")) << stem;
        EXPECT_EQ(slurp(base_a + "_hoa3.wav"), slurp(base_b + "_hoa3.wav")) << stem;
    }
    const json manifest = json::parse(slurp((fs::path(path("corpus_a")) / "run.manifest.json").string()));
    EXPECT_EQ(manifest["subcommand"], "augment");
    EXPECT_EQ(manifest["args"]["count"], 3);
}

TEST_F(CliTest, TrainThenUpscaleRoundTrip) {
    ASSERT_EQ(run("--seed 9 augment --out " + path("corpus") +
                  " --count 6 --min-sources 1 --max-sources 1 --duration 0.125 --rate 8000"),
              0)
        << stderr_text;
    const std::string config = write_model_config("config.json");
    const std::string ckpt = path("model.ckpt");

    ASSERT_EQ(run("--seed 3 --config " + config + " train --corpus " + path("corpus") +
                  " --steps 8 --lr 1e-3 --validate-count 2 --out " + ckpt),
              0)
        << stderr_text;

    CheckpointMeta meta;
    const Model<float> model = load_checkpoint(ckpt, &meta);
    EXPECT_EQ(meta.step, 8);
    EXPECT_EQ(meta.seed, 3u);
    EXPECT_EQ(model.config.n_enc, 8);

    const json manifest = json::parse(slurp(ckpt + ".manifest.json"));
    EXPECT_EQ(manifest["result"]["steps_run"], 8);
    EXPECT_GT(manifest["result"]["parameter_count"].get<std::int64_t>(), 0);

    const std::string foa_in = (fs::path(path("corpus")) / "scene_000000_foa.wav").string();
    const std::string up_out = path("up.wav");
    ASSERT_EQ(run("upscale --in " + foa_in + " --model " + ckpt + " --out " + up_out), 0)
        << stderr_text;
    const WavData up = read_wav(up_out);
    const WavData foa = read_wav(foa_in);
    EXPECT_EQ(up.channels.size(), 16u);
    EXPECT_EQ(up.channels[0].size(), foa.channels[0].size());

    // A 16-channel input is not FOA.
    const std::string hoa_in = (fs::path(path("corpus")) / "scene_000000_hoa3.wav").string();
    EXPECT_EQ(run("upscale --in " + hoa_in + " --model " + ckpt + " --out " + path("x.wav")), 2);
}

TEST_F(CliTest, TrainFailsOnEmptyCorpus) {
    fs::create_directories(path("empty"));
    EXPECT_EQ(run("train --corpus " + path("empty") + " --out " + path("m.ckpt")), 3);
    EXPECT_NE(stderr_text.find("io error"), std::string::npos);
}

}  // namespace
}  // namespace ambiup
