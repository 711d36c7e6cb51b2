#include "ambiup/eval.hpp"

#include <gtest/gtest.h>

#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ambiup/checkpoint.hpp"
#include "ambiup/errors.hpp"
#include "ambiup/synth.hpp"

namespace ambiup {
namespace {

namespace fs = std::filesystem;

GridLayout design_grid() {
    return load_grid_file(fs::path(AMBIUP_DATA_DIR) / "tdesign24.txt");
}

ModelConfig eval_model_config() {
    ModelConfig cfg;
    cfg.n_enc = 8;
    cfg.kernel_len = 8;
    cfg.enc_stride = 4;
    cfg.n_bottleneck = 6;
    cfg.n_conv = 8;
    cfg.p_kernel = 3;
    cfg.x_blocks = 2;
    cfg.repeats = 1;
    cfg.sample_rate = 8000.0;
    return cfg;
}

TEST(Eval, GroundTruthFeedsAreOneHot) {
    GridLayout grid = fibonacci_grid(6);
    std::vector<double> mono{0.5, -1.0, 0.25};
    auto feeds = ground_truth_feeds(grid, 2, mono);
    ASSERT_EQ(feeds.size(), 6u);
    EXPECT_EQ(feeds[2], mono);
    for (std::size_t q = 0; q < 6; ++q) {
        if (q == 2) continue;
        for (double v : feeds[q]) EXPECT_EQ(v, 0.0);
    }
    EXPECT_THROW(ground_truth_feeds(grid, 6, mono), std::invalid_argument);
}

TEST(Eval, PerfectFeedsClampToFloor) {
    GridLayout grid = fibonacci_grid(5);
    std::vector<double> mono{1.0, 2.0, -1.0};
    auto feeds = ground_truth_feeds(grid, 1, mono);
    EXPECT_EQ(positional_error_from_feeds(feeds, 1, mono), -120.0);
    EXPECT_EQ(positional_error_from_feeds(feeds, 1, mono, -90.0), -90.0);
}

TEST(Eval, KnownErrorValues) {
    GridLayout grid = fibonacci_grid(4);
    std::vector<double> mono{0.3, -0.7, 1.1, 0.2};

    // 10% amplitude error at the true point: 20*log10(0.1) = -20 dB.
    auto feeds = ground_truth_feeds(grid, 0, mono);
    for (std::size_t t = 0; t < mono.size(); ++t) feeds[0][t] = 1.1 * mono[t];
    EXPECT_NEAR(positional_error_from_feeds(feeds, 0, mono), -20.0, 1e-9);

    // Perfect true feed plus a half-amplitude leak elsewhere: ratio 0.25.
    feeds = ground_truth_feeds(grid, 0, mono);
    for (std::size_t t = 0; t < mono.size(); ++t) feeds[3][t] = 0.5 * mono[t];
    EXPECT_NEAR(positional_error_from_feeds(feeds, 0, mono), 10.0 * std::log10(0.25), 1e-9);
}

TEST(Eval, ErrorIsScaleInvariant) {
    GridLayout grid = fibonacci_grid(5);
    std::vector<double> mono{0.4, -0.2, 0.9};
    auto feeds = ground_truth_feeds(grid, 2, mono);
    feeds[0] = {0.1, 0.1, 0.1};
    feeds[2][1] += 0.05;
    const double base = positional_error_from_feeds(feeds, 2, mono);

    const double alpha = 3.7;
    for (auto& f : feeds) {
        for (auto& v : f) v *= alpha;
    }
    std::vector<double> scaled = mono;
    for (auto& v : scaled) v *= alpha;
    EXPECT_NEAR(positional_error_from_feeds(feeds, 2, scaled), base, 1e-12);
}

TEST(Eval, ValidationOfFeedArguments) {
    GridLayout grid = fibonacci_grid(4);
    std::vector<double> mono{1.0, 2.0};
    auto feeds = ground_truth_feeds(grid, 0, mono);
    EXPECT_THROW(positional_error_from_feeds(feeds, 9, mono), std::invalid_argument);

    feeds[2].resize(3);
    EXPECT_THROW(positional_error_from_feeds(feeds, 0, mono), std::invalid_argument);

    feeds = ground_truth_feeds(grid, 0, mono);
    std::vector<double> silent{0.0, 0.0};
    auto zero_feeds = ground_truth_feeds(grid, 0, silent);
    EXPECT_THROW(positional_error_from_feeds(zero_feeds, 0, silent), std::invalid_argument);
}

TEST(Eval, RendererKindParsing) {
    EXPECT_EQ(RendererKind::parse("foa").type, RendererKind::Type::FoaLinear);
    EXPECT_EQ(RendererKind::parse("foa-linear").name(), "foa-linear");
    EXPECT_EQ(RendererKind::parse("hoa3").name(), "hoa3-linear");
    RendererKind up = RendererKind::parse("upscaled:/tmp/m.ckpt");
    EXPECT_EQ(up.type, RendererKind::Type::Upscaled);
    EXPECT_EQ(up.checkpoint_path, fs::path("/tmp/m.ckpt"));
    EXPECT_EQ(up.name(), "upscaled");

    EXPECT_THROW(RendererKind::parse("hoa2"), std::invalid_argument);
    EXPECT_THROW(RendererKind::parse("upscaled:"), std::invalid_argument);
}

// On the exact design the truncation error has a closed form independent of
// the probe: 10*log10(1 - (L+1)^2 / P) at every point.
TEST(Eval, ExactDesignErrorsMatchClosedForm) {
    GridLayout grid = design_grid();
    EvalOptions options;
    options.signal.duration_s = 0.05;
    options.signal.sample_rate = 8000.0;

    EvalRun run = run_evaluation(
        {RendererKind::parse("foa"), RendererKind::parse("hoa3")}, grid, options);
    ASSERT_EQ(run.maps.size(), 2u);
    const double foa_want = 10.0 * std::log10(1.0 - 4.0 / 24.0);
    const double hoa3_want = 10.0 * std::log10(1.0 - 16.0 / 24.0);

    for (std::size_t p = 0; p < grid.size(); ++p) {
        EXPECT_NEAR(run.maps[0].error_db[p], foa_want, 1e-6) << "point " << p;
        EXPECT_NEAR(run.maps[1].error_db[p], hoa3_want, 1e-6) << "point " << p;
        EXPECT_GT(run.maps[0].error_db[p], run.maps[1].error_db[p]);
    }
    EXPECT_NEAR(run.summary.mean_deltas.at("foa-linear-minus-hoa3-linear"),
                foa_want - hoa3_want, 1e-6);
}

TEST(Eval, ErrorMapsAreThreadCountInvariant) {
    GridLayout grid = fibonacci_grid(12);
    EvalOptions one;
    one.signal.duration_s = 0.02;
    one.signal.sample_rate = 8000.0;
    one.threads = 1;
    EvalOptions four = one;
    four.threads = 4;

    EvalRun a = run_evaluation({RendererKind::parse("foa")}, grid, one);
    EvalRun b = run_evaluation({RendererKind::parse("foa")}, grid, four);
    EXPECT_EQ(a.maps[0].error_db, b.maps[0].error_db);  // bitwise
}

TEST(Eval, RepeatRunsAreDeterministic) {
    GridLayout grid = fibonacci_grid(8);
    EvalOptions options;
    options.signal.duration_s = 0.02;
    options.signal.sample_rate = 8000.0;
    EvalRun a = run_evaluation({RendererKind::parse("hoa3")}, grid, options);
    EvalRun b = run_evaluation({RendererKind::parse("hoa3")}, grid, options);
    EXPECT_EQ(a.maps[0].error_db, b.maps[0].error_db);
}

TEST(Eval, SummarizeStatsAndDeltas) {
    ErrorMap a;
    a.renderer = "a";
    a.grid_label = "g";
    a.error_db = {-1.0, -3.0, -2.0, -6.0};
    ErrorMap b;
    b.renderer = "b";
    b.grid_label = "g";
    b.error_db = {-5.0, -5.0, -5.0, -5.0};

    ErrorSummary s = summarize({a, b});
    EXPECT_DOUBLE_EQ(s.renderers["a"].mean_db, -3.0);
    EXPECT_DOUBLE_EQ(s.renderers["a"].median_db, -2.5);
    EXPECT_DOUBLE_EQ(s.renderers["a"].max_db, -1.0);
    EXPECT_DOUBLE_EQ(s.renderers["b"].median_db, -5.0);
    EXPECT_DOUBLE_EQ(s.mean_deltas["a-minus-b"], 2.0);
    EXPECT_DOUBLE_EQ(s.mean_deltas["b-minus-a"], -2.0);

    const auto doc = summary_to_json(s);
    EXPECT_DOUBLE_EQ(doc["renderers"]["a"]["mean_db"].get<double>(), -3.0);
    EXPECT_DOUBLE_EQ(doc["deltas"]["a-minus-b"].get<double>(), 2.0);
}

TEST(Eval, SummarizeRejectsMismatchedMaps) {
    ErrorMap a;
    a.renderer = "a";
    a.grid_label = "g1";
    a.error_db = {-1.0};
    ErrorMap b;
    b.renderer = "b";
    b.grid_label = "g2";
    b.error_db = {-1.0};
    EXPECT_THROW(summarize({a, b}), std::invalid_argument);
    EXPECT_THROW(summarize({}), std::invalid_argument);
}

TEST(Eval, CsvExportLayout) {
    GridLayout grid = fibonacci_grid(4);
    ErrorMap a;
    a.renderer = "foa-linear";
    a.grid_label = grid.label;
    a.error_db = {-1.0, -2.0, -3.0, -4.0};
    ErrorMap b = a;
    b.renderer = "hoa3-linear";
    b.error_db = {-5.0, -6.0, -7.0, -8.0};

    const fs::path p = fs::temp_directory_path() /
                       ("ambiup_eval_" + std::to_string(::getpid()) + ".csv");
    export_csv({a, b}, grid, p);

    std::ifstream in(p);
    std::string header;
    std::getline(in, header);
    EXPECT_EQ(header,
              "point_index,azimuth_deg,elevation_deg,foa-linear_error_db,hoa3-linear_error_db");
    int rows = 0;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) ++rows;
    }
    EXPECT_EQ(rows, 4);
    fs::remove(p);
}

TEST(Eval, UpscaledRendererViaModelPointer) {
    Model<float> model = build_model<float>(eval_model_config(), 31);
    RendererKind up;
    up.type = RendererKind::Type::Upscaled;
    up.model = &model;

    GridLayout grid = fibonacci_grid(6);
    EvalOptions options;
    options.signal.duration_s = 0.05;
    options.signal.sample_rate = 8000.0;

    EvalRun run = run_evaluation({up}, grid, options);
    ASSERT_EQ(run.maps.size(), 1u);
    EXPECT_EQ(run.maps[0].renderer, "upscaled");
    for (double v : run.maps[0].error_db) {
        EXPECT_TRUE(std::isfinite(v));
        EXPECT_GE(v, -120.0);
    }
}

TEST(Eval, UpscaledRendererViaCheckpointFile) {
    Model<float> model = build_model<float>(eval_model_config(), 32);
    const fs::path ckpt = fs::temp_directory_path() /
                          ("ambiup_eval_" + std::to_string(::getpid()) + ".ckpt");
    save_checkpoint(ckpt, model, CheckpointMeta{});

    GridLayout grid = fibonacci_grid(4);
    EvalOptions options;
    options.signal.duration_s = 0.05;
    options.signal.sample_rate = 8000.0;

    RendererKind up = RendererKind::parse("upscaled:" + ckpt.string());
    const double err = positional_error(up, grid, 0, options);
    EXPECT_TRUE(std::isfinite(err));

    // Same weights through the file and through the pointer agree exactly.
    RendererKind direct;
    direct.type = RendererKind::Type::Upscaled;
    direct.model = &model;
    EXPECT_EQ(positional_error(direct, grid, 0, options), err);
    fs::remove(ckpt);
}

TEST(Eval, UpscaledRendererFailures) {
    GridLayout grid = fibonacci_grid(4);
    EvalOptions options;
    options.signal.duration_s = 0.05;
    options.signal.sample_rate = 8000.0;

    RendererKind missing = RendererKind::parse("upscaled:/nonexistent/model.ckpt");
    EXPECT_THROW(positional_error(missing, grid, 0, options), IoError);

    Model<float> model = build_model<float>(eval_model_config(), 33);  // 8 kHz model
    RendererKind up;
    up.type = RendererKind::Type::Upscaled;
    up.model = &model;
    options.signal.sample_rate = 16000.0;
    EXPECT_THROW(positional_error(up, grid, 0, options), std::invalid_argument);
}

TEST(Eval, RunValidatesArguments) {
    GridLayout grid = fibonacci_grid(4);
    EvalOptions options;
    options.signal.duration_s = 0.01;
    options.signal.sample_rate = 8000.0;
    EXPECT_THROW(run_evaluation({}, grid, options), std::invalid_argument);
    EXPECT_THROW(positional_error(RendererKind::parse("foa"), grid, 99, options),
                 std::invalid_argument);
}

}  // namespace
}  // namespace ambiup
