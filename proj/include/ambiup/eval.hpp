#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "ambiup/grid.hpp"
#include "ambiup/model.hpp"
#include "ambiup/signal.hpp"

namespace ambiup {

// A renderer under evaluation: linear decode of the order-1 encode, linear
// decode of the order-3 encode, or the upscaler bridging the two.
struct RendererKind {
    enum class Type { FoaLinear, Hoa3Linear, Upscaled };
    Type type = Type::FoaLinear;
    std::filesystem::path checkpoint_path;   // Upscaled, loaded on demand
    const Model<float>* model = nullptr;     // Upscaled, overrides the path

    std::string name() const;
    static RendererKind parse(const std::string& spec);  // "foa" | "hoa3" | "upscaled:<ckpt>"
};

// Probe signal rendered at each grid point: seeded pink noise.
struct EvalSignalSpec {
    double duration_s = 0.25;
    double sample_rate = 48000.0;
    std::uint64_t seed = 0;
};

struct ErrorMap {
    std::string renderer;
    std::string grid_label;
    std::vector<double> error_db;  // one finite value per grid point
    std::string normalization = "per-point ground-truth energy; no global offset";
    EvalSignalSpec signal;
};

struct RendererStats {
    double mean_db = 0.0;
    double median_db = 0.0;
    double max_db = 0.0;
};

struct ErrorSummary {
    std::map<std::string, RendererStats> renderers;
    std::map<std::string, double> mean_deltas;  // "a-minus-b" -> mean_a - mean_b
};

struct EvalOptions {
    EvalSignalSpec signal;
    int threads = 1;
    double floor_db = -120.0;
};

struct EvalRun {
    std::vector<ErrorMap> maps;
    ErrorSummary summary;
};

// The ideal reference: the probe on channel p, silence elsewhere.
std::vector<std::vector<double>> ground_truth_feeds(const GridLayout& grid, std::size_t p,
                                                    const std::vector<double>& mono);

// 10*log10( sum_{q,t} (feed - gt)^2 / sum_{q,t} gt^2 ), clamped to floor_db.
double positional_error_from_feeds(const std::vector<std::vector<double>>& feeds, std::size_t p,
                                   const std::vector<double>& mono, double floor_db = -120.0);

// One renderer at one point: encode the probe at grid point p (order 1 or 3),
// process (identity or model inference), decode through the sampling decoder
// of the renderer's output order, and score against the ideal feeds.
double positional_error(const RendererKind& renderer, const GridLayout& grid, std::size_t p,
                        const EvalOptions& options);

// Full sweep, deterministic for any thread count.
EvalRun run_evaluation(const std::vector<RendererKind>& renderers, const GridLayout& grid,
                       const EvalOptions& options);

ErrorSummary summarize(const std::vector<ErrorMap>& maps);

// point_index, azimuth_deg, elevation_deg, then one error column per renderer.
void export_csv(const std::vector<ErrorMap>& maps, const GridLayout& grid,
                const std::filesystem::path& path);

nlohmann::json summary_to_json(const ErrorSummary& summary);

}  // namespace ambiup
