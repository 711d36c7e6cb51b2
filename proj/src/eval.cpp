#include "ambiup/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <mutex>
#include <stdexcept>

#include "ambiup/checkpoint.hpp"
#include "ambiup/decoder.hpp"
#include "ambiup/errors.hpp"
#include "ambiup/parallel.hpp"
#include "ambiup/sh.hpp"
#include "ambiup/synth.hpp"

namespace ambiup {

namespace {

constexpr double kFloorRatio = 1e-12;  // ratio below this clamps to the floor

// Streaming form of positional_error_from_feeds: one decoded feed at a time.
struct ErrorAccumulator {
    double numerator = 0.0;
    double gt_energy = 0.0;

    double finish(double floor_db) const {
        if (gt_energy <= 0.0) throw std::invalid_argument("positional_error: silent ground truth");
        const double ratio = numerator / gt_energy;
        if (!(ratio > kFloorRatio)) return floor_db;
        return std::max(floor_db, 10.0 * std::log10(ratio));
    }
};

// Everything shared across grid points for one renderer.
struct RendererContext {
    RendererKind kind;
    int encode_order = 1;
    DecoderMatrix decoder;          // at the renderer's output order
    Model<float> loaded_model;      // Upscaled via checkpoint path
    const Model<float>* model = nullptr;
};

RendererContext make_context(const RendererKind& renderer, const GridLayout& grid,
                             const EvalOptions& options) {
    RendererContext ctx;
    ctx.kind = renderer;
    switch (renderer.type) {
        case RendererKind::Type::FoaLinear:
            ctx.encode_order = 1;
            ctx.decoder = sampling_decoder(grid, 1);
            break;
        case RendererKind::Type::Hoa3Linear:
            ctx.encode_order = 3;
            ctx.decoder = sampling_decoder(grid, 3);
            break;
        case RendererKind::Type::Upscaled:
            ctx.encode_order = 1;
            ctx.decoder = sampling_decoder(grid, 3);
            if (renderer.model) {
                ctx.model = renderer.model;
            } else {
                try {
                    ctx.loaded_model = load_checkpoint(renderer.checkpoint_path);
                } catch (const std::exception& e) {
                    throw IoError("evaluate: cannot load checkpoint '" +
                                  renderer.checkpoint_path.string() + "': " + e.what());
                }
                ctx.model = &ctx.loaded_model;
            }
            if (ctx.model->config.sample_rate != options.signal.sample_rate) {
                throw std::invalid_argument(
                    "evaluate: model sample rate does not match the probe signal rate");
            }
            break;
    }
    return ctx;
}

double point_error(const RendererContext& ctx, const GridLayout& grid, std::size_t p,
                   const std::vector<double>& mono, double sample_rate, double floor_db) {
    const AmbisonicSignal encoded =
        encode_point_source(mono, grid.points[p], ctx.encode_order, 1.0, sample_rate);
    const AmbisonicSignal* rendered = &encoded;
    AmbisonicSignal upscaled_sig;
    if (ctx.kind.type == RendererKind::Type::Upscaled) {
        upscaled_sig = upscale(*ctx.model, encoded, 1);
        rendered = &upscaled_sig;
    }

    ErrorAccumulator acc;
    for (double v : mono) acc.gt_energy += v * v;

    // feeds one row at a time: feed_q = decoder row q dot rendered channels
    std::vector<double> feed(mono.size());
    const std::size_t channels = ctx.decoder.cols;
    for (std::size_t q = 0; q < ctx.decoder.rows; ++q) {
        const double* row = ctx.decoder.row(q);
        std::fill(feed.begin(), feed.end(), 0.0);
        for (std::size_t c = 0; c < channels; ++c) {
            const double w = row[c];
            if (w == 0.0) continue;
            const auto& ch = rendered->channels[c];
            for (std::size_t t = 0; t < feed.size(); ++t) feed[t] += w * ch[t];
        }
        if (q == p) {
            for (std::size_t t = 0; t < feed.size(); ++t) {
                const double d = feed[t] - mono[t];
                acc.numerator += d * d;
            }
        } else {
            for (double v : feed) acc.numerator += v * v;
        }
    }
    return acc.finish(floor_db);
}

}  // namespace

std::string RendererKind::name() const {
    switch (type) {
        case Type::FoaLinear: return "foa-linear";
        case Type::Hoa3Linear: return "hoa3-linear";
        case Type::Upscaled: return "upscaled";
    }
    return "unknown";
}

RendererKind RendererKind::parse(const std::string& spec) {
    RendererKind r;
    if (spec == "foa" || spec == "foa-linear") {
        r.type = Type::FoaLinear;
    } else if (spec == "hoa3" || spec == "hoa3-linear") {
        r.type = Type::Hoa3Linear;
    } else if (spec.rfind("upscaled:", 0) == 0) {
        r.type = Type::Upscaled;
        r.checkpoint_path = spec.substr(9);
        if (r.checkpoint_path.empty()) {
            throw std::invalid_argument("renderer: upscaled needs a checkpoint path");
        }
    } else {
        throw std::invalid_argument("renderer: unknown spec '" + spec +
                                    "' (want foa, hoa3, or upscaled:<ckpt>)");
    }
    return r;
}

std::vector<std::vector<double>> ground_truth_feeds(const GridLayout& grid, std::size_t p,
                                                    const std::vector<double>& mono) {
    if (p >= grid.size()) throw std::invalid_argument("ground_truth_feeds: point out of range");
    std::vector<std::vector<double>> feeds(grid.size(), std::vector<double>(mono.size(), 0.0));
    feeds[p].assign(mono.begin(), mono.end());
    return feeds;
}

double positional_error_from_feeds(const std::vector<std::vector<double>>& feeds, std::size_t p,
                                   const std::vector<double>& mono, double floor_db) {
    if (p >= feeds.size()) throw std::invalid_argument("positional_error: point out of range");
    ErrorAccumulator acc;
    for (double v : mono) acc.gt_energy += v * v;
    for (std::size_t q = 0; q < feeds.size(); ++q) {
        if (feeds[q].size() != mono.size()) {
            throw std::invalid_argument("positional_error: feed length mismatch");
        }
        if (q == p) {
            for (std::size_t t = 0; t < mono.size(); ++t) {
                const double d = feeds[q][t] - mono[t];
                acc.numerator += d * d;
            }
        } else {
            for (double v : feeds[q]) acc.numerator += v * v;
        }
    }
    return acc.finish(floor_db);
}

double positional_error(const RendererKind& renderer, const GridLayout& grid, std::size_t p,
                        const EvalOptions& options) {
    if (p >= grid.size()) throw std::invalid_argument("positional_error: point out of range");
    const RendererContext ctx = make_context(renderer, grid, options);
    const std::vector<double> mono =
        pink_noise(options.signal.duration_s, options.signal.sample_rate, options.signal.seed);
    return point_error(ctx, grid, p, mono, options.signal.sample_rate, options.floor_db);
}

EvalRun run_evaluation(const std::vector<RendererKind>& renderers, const GridLayout& grid,
                       const EvalOptions& options) {
    if (renderers.empty()) throw std::invalid_argument("run_evaluation: no renderers");
    if (grid.size() == 0) throw std::invalid_argument("run_evaluation: empty grid");

    const std::vector<double> mono =
        pink_noise(options.signal.duration_s, options.signal.sample_rate, options.signal.seed);

    EvalRun run;
    for (const auto& renderer : renderers) {
        const RendererContext ctx = make_context(renderer, grid, options);
        ErrorMap map;
        map.renderer = renderer.name();
        map.grid_label = grid.label;
        map.signal = options.signal;
        map.error_db.assign(grid.size(), 0.0);

        std::exception_ptr failure;
        std::mutex failure_mutex;
        parallel_for(static_cast<std::int64_t>(grid.size()), options.threads,
                     [&](std::int64_t p) {
                         try {
                             map.error_db[static_cast<std::size_t>(p)] =
                                 point_error(ctx, grid, static_cast<std::size_t>(p), mono,
                                             options.signal.sample_rate, options.floor_db);
                         } catch (...) {
                             std::lock_guard<std::mutex> lock(failure_mutex);
                             if (!failure) failure = std::current_exception();
                         }
                     });
        if (failure) {
            try {
                std::rethrow_exception(failure);
            } catch (const std::exception& e) {
                throw std::runtime_error("run_evaluation: renderer '" + map.renderer +
                                         "' failed: " + e.what());
            }
        }
        run.maps.push_back(std::move(map));
    }
    run.summary = summarize(run.maps);
    return run;
}

ErrorSummary summarize(const std::vector<ErrorMap>& maps) {
    if (maps.empty()) throw std::invalid_argument("summarize: no maps");
    for (const auto& m : maps) {
        if (m.grid_label != maps[0].grid_label || m.error_db.size() != maps[0].error_db.size()) {
            throw std::invalid_argument("summarize: maps from different grids");
        }
    }

    ErrorSummary summary;
    for (const auto& m : maps) {
        RendererStats stats;
        std::vector<double> sorted = m.error_db;
        std::sort(sorted.begin(), sorted.end());
        double total = 0.0;
        for (double v : sorted) total += v;
        stats.mean_db = total / static_cast<double>(sorted.size());
        const std::size_t n = sorted.size();
        stats.median_db = (n % 2 == 1) ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
        stats.max_db = sorted.back();
        summary.renderers[m.renderer] = stats;
    }
    for (std::size_t i = 0; i < maps.size(); ++i) {
        for (std::size_t j = 0; j < maps.size(); ++j) {
            if (i == j) continue;
            const std::string key = maps[i].renderer + "-minus-" + maps[j].renderer;
            summary.mean_deltas[key] = summary.renderers[maps[i].renderer].mean_db -
                                       summary.renderers[maps[j].renderer].mean_db;
        }
    }
    return summary;
}

void export_csv(const std::vector<ErrorMap>& maps, const GridLayout& grid,
                const std::filesystem::path& path) {
    if (maps.empty()) throw std::invalid_argument("export_csv: no maps");
    for (const auto& m : maps) {
        if (m.error_db.size() != grid.size()) {
            throw std::invalid_argument("export_csv: map size does not match grid");
        }
    }
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("export_csv: cannot create " + path.string());

    out << "point_index,azimuth_deg,elevation_deg";
    for (const auto& m : maps) out << "," << m.renderer << "_error_db";
    out << "\n";
    out.precision(10);
    const double to_deg = 180.0 / M_PI;
    for (std::size_t p = 0; p < grid.size(); ++p) {
        out << p << "," << grid.points[p].azimuth() * to_deg << ","
            << grid.points[p].elevation() * to_deg;
        for (const auto& m : maps) out << "," << m.error_db[p];
        out << "\n";
    }
    if (!out) throw IoError("export_csv: write failed for " + path.string());
}

nlohmann::json summary_to_json(const ErrorSummary& summary) {
    nlohmann::json renderers = nlohmann::json::object();
    for (const auto& [name, stats] : summary.renderers) {
        renderers[name] = {
            {"mean_db", stats.mean_db},
            {"median_db", stats.median_db},
            {"max_db", stats.max_db},
        };
    }
    nlohmann::json deltas = nlohmann::json::object();
    for (const auto& [name, value] : summary.mean_deltas) deltas[name] = value;
    return {{"renderers", renderers}, {"deltas", deltas}};
}

}  // namespace ambiup
