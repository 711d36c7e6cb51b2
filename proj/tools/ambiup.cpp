// ambiup: FOA -> HOA3 upscaling pipeline driver.
//
// Subcommands: encode, decode, upscale, augment, train, evaluate, grid-check.
// Every run writes a machine-readable manifest next to its main output so the
// exact invocation (flags, seed, thread count) can be replayed.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ambiup/catalog.hpp"
#include "ambiup/checkpoint.hpp"
#include "ambiup/decoder.hpp"
#include "ambiup/errors.hpp"
#include "ambiup/eval.hpp"
#include "ambiup/grid.hpp"
#include "ambiup/model.hpp"
#include "ambiup/rng.hpp"
#include "ambiup/scene.hpp"
#include "ambiup/signal.hpp"
#include "ambiup/train.hpp"
#include "ambiup/wav.hpp"

namespace {

constexpr const char* kToolVersion = "1.0.0";
constexpr double kDegToRad = M_PI / 180.0;

using nlohmann::json;

struct GlobalOpts {
    std::uint64_t seed = 0;
    int threads = 1;
    std::string config_path;
};

json base_manifest(const std::string& subcommand, const GlobalOpts& g) {
    return {
        {"tool", "ambiup"},
        {"version", kToolVersion},
        {"subcommand", subcommand},
        {"seed", g.seed},
        {"threads", g.threads},
        {"decisions", json::array()},
    };
}

void write_manifest(const std::filesystem::path& beside, const json& doc) {
    std::filesystem::path path = beside;
    path += ".manifest.json";
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw ambiup::IoError("manifest: cannot create " + path.string());
    out << doc.dump(2) << "\n";
}

ambiup::ModelConfig load_model_config(const std::string& path) {
    if (path.empty()) return ambiup::ModelConfig{};
    std::ifstream in(path);
    if (!in) throw ambiup::IoError("config: cannot open " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ambiup::FormatError("config: bad JSON in " + path + ": " + e.what());
    }
    return ambiup::ModelConfig::from_json(doc);
}

ambiup::AmbisonicSignal wav_to_ambisonic(const ambiup::WavData& wav, const std::string& origin) {
    const std::size_t n = wav.channels.size();
    int order = 0;
    while (static_cast<std::size_t>((order + 1) * (order + 1)) < n) ++order;
    if (static_cast<std::size_t>((order + 1) * (order + 1)) != n) {
        throw std::invalid_argument(origin + ": channel count " + std::to_string(n) +
                                    " is not (order+1)^2");
    }
    ambiup::AmbisonicSignal sig;
    sig.order = order;
    sig.sample_rate = wav.sample_rate;
    sig.channels = wav.channels;
    sig.validate();
    return sig;
}

int run_encode(const GlobalOpts& g, const std::string& in_path, double az_deg, double el_deg,
               int order, double gain_db, const std::string& out_path) {
    const ambiup::WavData wav = ambiup::read_wav(in_path);
    if (wav.channels.size() != 1) {
        throw std::invalid_argument("encode: input must be mono, got " +
                                    std::to_string(wav.channels.size()) + " channels");
    }
    const ambiup::Direction dir(az_deg * kDegToRad, el_deg * kDegToRad);
    const double gain = std::pow(10.0, gain_db / 20.0);
    const ambiup::AmbisonicSignal encoded =
        ambiup::encode_point_source(wav.channels[0], dir, order, gain, wav.sample_rate);

    ambiup::WavData out;
    out.sample_rate = wav.sample_rate;
    out.channels = encoded.channels;
    ambiup::write_wav(out_path, out);
    ambiup::write_ambix_sidecar(out_path, order, wav.sample_rate);

    json manifest = base_manifest("encode", g);
    manifest["args"] = {{"in", in_path},     {"az_deg", az_deg}, {"el_deg", el_deg},
                        {"order", order},    {"gain_db", gain_db}, {"out", out_path}};
    write_manifest(out_path, manifest);
    std::cout << "encoded " << in_path << " -> " << out_path << " (order " << order << ", "
              << encoded.channels.size() << " channels)\n";
    return 0;
}

int run_decode(const GlobalOpts& g, const std::string& in_path, const std::string& grid_spec,
               const std::string& decoder_kind, const std::string& out_path) {
    const ambiup::WavData wav = ambiup::read_wav(in_path);
    const ambiup::AmbisonicSignal sig = wav_to_ambisonic(wav, "decode");
    const ambiup::GridLayout grid = ambiup::parse_grid_spec(grid_spec);

    ambiup::DecoderMatrix dec;
    if (decoder_kind == "sampling") {
        dec = ambiup::sampling_decoder(grid, sig.order);
    } else if (decoder_kind == "pinv") {
        dec = ambiup::pseudoinverse_decoder(grid, sig.order);
    } else {
        throw std::invalid_argument("decode: unknown decoder '" + decoder_kind +
                                    "' (want sampling or pinv)");
    }

    ambiup::WavData out;
    out.sample_rate = wav.sample_rate;
    out.channels = ambiup::decode(sig, dec);
    ambiup::write_wav(out_path, out);

    json manifest = base_manifest("decode", g);
    manifest["args"] = {{"in", in_path},
                        {"grid", grid_spec},
                        {"decoder", decoder_kind},
                        {"out", out_path},
                        {"order", sig.order},
                        {"grid_points", grid.size()}};
    write_manifest(out_path, manifest);
    std::cout << "decoded " << in_path << " (order " << sig.order << ") to " << grid.size()
              << " feeds -> " << out_path << "\n";
    return 0;
}

int run_upscale(const GlobalOpts& g, const std::string& in_path, const std::string& model_path,
                const std::string& out_path) {
    const ambiup::WavData wav = ambiup::read_wav(in_path);
    if (wav.channels.size() != 4) {
        throw std::invalid_argument("upscale: input must have 4 channels, got " +
                                    std::to_string(wav.channels.size()));
    }
    ambiup::CheckpointMeta meta;
    const ambiup::Model<float> model = ambiup::load_checkpoint(model_path, &meta);

    ambiup::AmbisonicSignal foa;
    foa.order = 1;
    foa.sample_rate = wav.sample_rate;
    foa.channels = wav.channels;
    const ambiup::AmbisonicSignal hoa = ambiup::upscale(model, foa, g.threads);

    ambiup::WavData out;
    out.sample_rate = wav.sample_rate;
    out.channels = hoa.channels;
    ambiup::write_wav(out_path, out);
    ambiup::write_ambix_sidecar(out_path, 3, wav.sample_rate);

    json manifest = base_manifest("upscale", g);
    manifest["args"] = {{"in", in_path}, {"model", model_path}, {"out", out_path}};
    manifest["model"] = {{"trained_steps", meta.step}, {"train_seed", meta.seed}};
    write_manifest(out_path, manifest);
    std::cout << "upscaled " << in_path << " -> " << out_path << " (16 channels)\n";
    return 0;
}

int run_augment(const GlobalOpts& g, const std::string& catalog_path, std::int64_t count,
                const std::string& out_dir, const ambiup::SceneConstraints& constraints) {
    const ambiup::Catalog catalog = catalog_path.empty()
                                        ? ambiup::Catalog::builtin()
                                        : ambiup::Catalog::load_manifest(catalog_path);
    std::filesystem::create_directories(out_dir);

    for (std::int64_t i = 0; i < count; ++i) {
        ambiup::Rng mixer = ambiup::Rng::child(g.seed, static_cast<std::uint64_t>(i));
        const std::uint64_t scene_seed = mixer.next_u64();
        const ambiup::SceneSpec scene = ambiup::sample_scene(scene_seed, catalog, constraints);
        const ambiup::TrainingPair pair = ambiup::render_scene(scene, catalog);

        char stem[32];
        std::snprintf(stem, sizeof(stem), "scene_%06lld", static_cast<long long>(i));
        const std::filesystem::path base = std::filesystem::path(out_dir) / stem;

        ambiup::WavData foa;
        foa.sample_rate = scene.sample_rate;
        foa.channels = pair.input.channels;
        ambiup::write_wav(base.string() + "_foa.wav", foa);

        ambiup::WavData hoa;
        hoa.sample_rate = scene.sample_rate;
        hoa.channels = pair.target.channels;
        ambiup::write_wav(base.string() + "_hoa3.wav", hoa);

        std::ofstream side(base.string() + ".scene.json", std::ios::trunc);
        if (!side) throw ambiup::IoError("augment: cannot write scene sidecar for " + base.string());
        side << ambiup::scene_to_json(scene).dump(2) << "\n";
    }

    json manifest = base_manifest("augment", g);
    manifest["args"] = {{"catalog", catalog_path.empty() ? "builtin" : catalog_path},
                        {"count", count},
                        {"out", out_dir},
                        {"min_sources", constraints.min_sources},
                        {"max_sources", constraints.max_sources},
                        {"duration_s", constraints.duration_s},
                        {"sample_rate", constraints.sample_rate},
                        {"room_probability", constraints.room_probability}};
    manifest["outputs"] = {{"pattern", "scene_NNNNNN_{foa,hoa3}.wav + scene_NNNNNN.scene.json"},
                           {"scenes", count}};
    write_manifest(std::filesystem::path(out_dir) / "run", manifest);
    std::cout << "wrote " << count << " scenes to " << out_dir << "\n";
    return 0;
}

int run_train(const GlobalOpts& g, const std::string& corpus_dir, std::int64_t steps, double lr,
              std::int64_t checkpoint_every, std::int64_t validate_count,
              const std::string& out_path) {
    // corpus scan: matched *_foa.wav / *_hoa3.wav stems, sorted
    std::vector<std::filesystem::path> stems;
    for (const auto& entry : std::filesystem::directory_iterator(corpus_dir)) {
        const std::string name = entry.path().filename().string();
        const std::string tail = "_foa.wav";
        if (name.size() > tail.size() && name.substr(name.size() - tail.size()) == tail) {
            stems.push_back(entry.path().parent_path() /
                            name.substr(0, name.size() - tail.size()));
        }
    }
    std::sort(stems.begin(), stems.end());
    if (stems.empty()) {
        throw ambiup::IoError("train: no *_foa.wav files under " + corpus_dir);
    }
    for (const auto& stem : stems) {
        if (!std::filesystem::exists(stem.string() + "_hoa3.wav")) {
            throw ambiup::IoError("train: missing target for " + stem.string());
        }
    }

    ambiup::ModelConfig config = load_model_config(g.config_path);
    auto load_pair = [&stems, &config](std::size_t idx) {
        const auto& stem = stems[idx];
        const ambiup::WavData foa = ambiup::read_wav(stem.string() + "_foa.wav");
        const ambiup::WavData hoa = ambiup::read_wav(stem.string() + "_hoa3.wav");
        if (foa.sample_rate != config.sample_rate) {
            throw std::invalid_argument("train: corpus rate " + std::to_string(foa.sample_rate) +
                                        " != model rate " + std::to_string(config.sample_rate));
        }
        ambiup::TrainingPair pair;
        pair.input.order = 1;
        pair.input.sample_rate = foa.sample_rate;
        pair.input.channels = foa.channels;
        pair.target.order = 3;
        pair.target.sample_rate = hoa.sample_rate;
        pair.target.channels = hoa.channels;
        pair.input.validate();
        pair.target.validate();
        return pair;
    };

    std::size_t val_count = 0;
    if (validate_count > 0) {
        val_count = std::min<std::size_t>(static_cast<std::size_t>(validate_count),
                                          stems.size() / 2);
    }
    const std::size_t train_count = stems.size() - val_count;
    if (train_count == 0) throw std::invalid_argument("train: validation set leaves no data");

    ambiup::Model<float> model = ambiup::build_model<float>(config, g.seed);

    ambiup::TrainConfig tc;
    tc.lr = lr;
    tc.steps = steps;
    tc.seed = g.seed;
    tc.threads = g.threads;
    tc.checkpoint_every = checkpoint_every;
    if (checkpoint_every > 0) {
        tc.checkpoint_dir = std::filesystem::path(out_path).parent_path();
        if (tc.checkpoint_dir.empty()) tc.checkpoint_dir = ".";
    }

    ambiup::PairSource pairs = [&](std::int64_t step) {
        return load_pair(static_cast<std::size_t>(step) % train_count);
    };
    ambiup::ValidationSet validation;
    const ambiup::ValidationSet* validation_ptr = nullptr;
    if (val_count > 0) {
        validation.count = static_cast<std::int64_t>(val_count);
        validation.source = [&, train_count](std::int64_t i) {
            return load_pair(train_count + static_cast<std::size_t>(i));
        };
        tc.validate_every = std::max<std::int64_t>(steps / 20, 1);
        validation_ptr = &validation;
    }

    const ambiup::TrainResult result = ambiup::train(model, pairs, tc, validation_ptr);

    ambiup::CheckpointMeta meta;
    meta.step = result.steps_run;
    meta.seed = g.seed;
    meta.final_loss = result.loss_trace.empty() ? 0.0 : result.loss_trace.back();
    meta.loss_digest = ambiup::fnv1a_bytes(result.loss_trace.data(),
                                           result.loss_trace.size() * sizeof(float));
    ambiup::save_checkpoint(out_path, model, meta);

    json manifest = base_manifest("train", g);
    manifest["args"] = {{"corpus", corpus_dir},       {"steps", steps},
                        {"lr", lr},                   {"out", out_path},
                        {"config", g.config_path},    {"validate_count", validate_count},
                        {"checkpoint_every", checkpoint_every}};
    manifest["result"] = {{"steps_run", result.steps_run},
                          {"final_loss", meta.final_loss},
                          {"loss_digest", meta.loss_digest},
                          {"converged", result.converged},
                          {"parameter_count", ambiup::parameter_count(config)}};
    write_manifest(out_path, manifest);
    std::cout << "trained " << result.steps_run << " steps, final L1 " << meta.final_loss
              << ", checkpoint " << out_path << "\n";
    return 0;
}

int run_evaluate(const GlobalOpts& g, const std::string& renderers_csv,
                 const std::string& grid_spec, double duration_s, double sample_rate,
                 double floor_db, const std::string& out_path) {
    std::vector<ambiup::RendererKind> renderers;
    std::string token;
    std::istringstream stream(renderers_csv);
    while (std::getline(stream, token, ',')) {
        if (!token.empty()) renderers.push_back(ambiup::RendererKind::parse(token));
    }
    if (renderers.empty()) throw std::invalid_argument("evaluate: no renderers given");

    const ambiup::GridLayout grid = ambiup::parse_grid_spec(grid_spec);
    ambiup::EvalOptions options;
    options.signal.duration_s = duration_s;
    options.signal.sample_rate = sample_rate;
    options.signal.seed = g.seed;
    options.threads = g.threads;
    options.floor_db = floor_db;

    const ambiup::EvalRun run = ambiup::run_evaluation(renderers, grid, options);
    ambiup::export_csv(run.maps, grid, out_path);

    const json summary = ambiup::summary_to_json(run.summary);
    std::filesystem::path summary_path = out_path;
    summary_path += ".summary.json";
    std::ofstream sout(summary_path, std::ios::trunc);
    if (!sout) throw ambiup::IoError("evaluate: cannot create " + summary_path.string());
    sout << summary.dump(2) << "\n";

    json manifest = base_manifest("evaluate", g);
    manifest["args"] = {{"renderers", renderers_csv}, {"grid", grid_spec},
                        {"duration_s", duration_s},   {"sample_rate", sample_rate},
                        {"floor_db", floor_db},       {"out", out_path}};
    manifest["grid_points"] = grid.size();
    write_manifest(out_path, manifest);

    std::cout << summary.dump(2) << "\n";
    return 0;
}

int run_grid_check(const GlobalOpts& g, const std::string& grid_spec, int order,
                   const std::string& out_path) {
    const ambiup::GridLayout grid = ambiup::parse_grid_spec(grid_spec);
    json report = {{"grid", grid.label}, {"points", grid.size()}, {"orders", json::array()}};
    for (int l = 1; l <= order; ++l) {
        const double err = ambiup::quadrature_error(grid, l);
        report["orders"].push_back({{"order", l},
                                    {"quadrature_error", err},
                                    {"exact_at_1e-10", err < 1e-10}});
    }
    std::cout << report.dump(2) << "\n";
    if (!out_path.empty()) {
        std::ofstream out(out_path, std::ios::trunc);
        if (!out) throw ambiup::IoError("grid-check: cannot create " + out_path);
        out << report.dump(2) << "\n";
        json manifest = base_manifest("grid-check", g);
        manifest["args"] = {{"grid", grid_spec}, {"order", order}, {"out", out_path}};
        write_manifest(out_path, manifest);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"FOA to third-order ambisonics upscaling pipeline"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOpts g;
    app.add_option("--seed", g.seed, "global random seed");
    app.add_option("--threads", g.threads, "worker threads for eval/inference");
    app.add_option("--config", g.config_path, "model config JSON (train)");

    // encode
    auto* enc = app.add_subcommand("encode", "encode a mono WAV as an ambisonic point source");
    std::string enc_in, enc_out;
    double enc_az = 0.0, enc_el = 0.0, enc_gain = 0.0;
    int enc_order = 3;
    enc->add_option("--in", enc_in, "mono input WAV")->required();
    enc->add_option("--az", enc_az, "azimuth, degrees")->required();
    enc->add_option("--el", enc_el, "elevation, degrees")->required();
    enc->add_option("--order", enc_order, "ambisonic order (default 3)");
    enc->add_option("--gain-db", enc_gain, "source gain in dB");
    enc->add_option("--out", enc_out, "output WAV")->required();

    // decode
    auto* dec = app.add_subcommand("decode", "decode an ambisonic WAV to grid feeds");
    std::string dec_in, dec_grid = "fib:484", dec_kind = "sampling", dec_out;
    dec->add_option("--in", dec_in, "ambisonic input WAV")->required();
    dec->add_option("--grid", dec_grid, "grid spec: fib:N or a grid file");
    dec->add_option("--decoder", dec_kind, "sampling (default) or pinv");
    dec->add_option("--out", dec_out, "output multichannel WAV of feeds")->required();

    // upscale
    auto* ups = app.add_subcommand("upscale", "upscale a FOA WAV to HOA3 with a trained model");
    std::string ups_in, ups_model, ups_out;
    ups->add_option("--in", ups_in, "4-channel FOA WAV")->required();
    ups->add_option("--model", ups_model, "model checkpoint")->required();
    ups->add_option("--out", ups_out, "16-channel output WAV")->required();

    // augment
    auto* aug = app.add_subcommand("augment", "synthesize a training corpus of scenes");
    std::string aug_catalog, aug_out;
    std::int64_t aug_count = 100;
    ambiup::SceneConstraints aug_constraints;
    aug->add_option("--catalog", aug_catalog, "catalog manifest JSON (default: builtin)");
    aug->add_option("--count", aug_count, "number of scenes");
    aug->add_option("--out", aug_out, "output directory")->required();
    aug->add_option("--min-sources", aug_constraints.min_sources, "min sources per scene");
    aug->add_option("--max-sources", aug_constraints.max_sources, "max sources per scene");
    aug->add_option("--duration", aug_constraints.duration_s, "scene seconds (default 4)");
    aug->add_option("--rate", aug_constraints.sample_rate, "sample rate (default 48000)");
    aug->add_option("--room-prob", aug_constraints.room_probability,
                    "probability a scene gets a simulated room (default 0)");

    // train
    auto* trn = app.add_subcommand("train", "train the upscaler on a rendered corpus");
    std::string trn_corpus, trn_out;
    std::int64_t trn_steps = 1000, trn_ckpt_every = 0, trn_val = 0;
    double trn_lr = 1e-3;
    trn->add_option("--corpus", trn_corpus, "corpus directory from augment")->required();
    trn->add_option("--steps", trn_steps, "training steps");
    trn->add_option("--lr", trn_lr, "Adam learning rate");
    trn->add_option("--checkpoint-every", trn_ckpt_every, "periodic checkpoint cadence (0 = off)");
    trn->add_option("--validate-count", trn_val, "pairs held out for validation (0 = off)");
    trn->add_option("--out", trn_out, "output checkpoint path")->required();

    // evaluate
    auto* evl = app.add_subcommand("evaluate", "positional-error sweep over a grid");
    std::string evl_renderers = "foa,hoa3", evl_grid = "fib:484", evl_out;
    double evl_duration = 0.25, evl_rate = 48000.0, evl_floor = -120.0;
    evl->add_option("--renderers", evl_renderers, "comma list: foa,hoa3,upscaled:<ckpt>");
    evl->add_option("--grid", evl_grid, "grid spec: fib:N or a grid file");
    evl->add_option("--duration", evl_duration, "probe seconds (default 0.25)");
    evl->add_option("--rate", evl_rate, "probe sample rate (default 48000)");
    evl->add_option("--floor", evl_floor, "error floor in dB (default -120)");
    evl->add_option("--out", evl_out, "output CSV path")->required();

    // grid-check
    auto* gch = app.add_subcommand("grid-check", "quadrature report for a grid");
    std::string gch_grid, gch_out;
    int gch_order = 3;
    gch->add_option("--grid", gch_grid, "grid spec: fib:N or a grid file")->required();
    gch->add_option("--order", gch_order, "highest order to check (default 3)");
    gch->add_option("--out", gch_out, "optional JSON report path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (enc->parsed()) {
            return run_encode(g, enc_in, enc_az, enc_el, enc_order, enc_gain, enc_out);
        }
        if (dec->parsed()) return run_decode(g, dec_in, dec_grid, dec_kind, dec_out);
        if (ups->parsed()) return run_upscale(g, ups_in, ups_model, ups_out);
        if (aug->parsed()) return run_augment(g, aug_catalog, aug_count, aug_out, aug_constraints);
        if (trn->parsed()) {
            return run_train(g, trn_corpus, trn_steps, trn_lr, trn_ckpt_every, trn_val, trn_out);
        }
        if (evl->parsed()) {
            return run_evaluate(g, evl_renderers, evl_grid, evl_duration, evl_rate, evl_floor,
                                evl_out);
        }
        if (gch->parsed()) return run_grid_check(g, gch_grid, gch_order, gch_out);
    } catch (const ambiup::FormatError& e) {
        std::cerr << "format error: " << e.what() << "\n";
        return 3;
    } catch (const ambiup::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "argument error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
