#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ambiup/catalog.hpp"
#include "ambiup/direction.hpp"
#include "ambiup/room.hpp"
#include "ambiup/signal.hpp"

namespace ambiup {

// One source placement inside a scene.
struct SourceSpec {
    std::string signal_ref;       // catalog item id
    int channel = 0;              // channel picked from a multichannel item
    double segment_start_s = 0.0;
    Direction direction;
    double gain_db = 0.0;
    double distance_m = 1.0;
};

// A fully pinned scene: rendering it is deterministic given a catalog.
struct SceneSpec {
    std::uint64_t seed = 0;
    double sample_rate = 48000.0;
    double duration_s = 4.0;
    std::vector<SourceSpec> sources;
    std::optional<RoomSpec> room;
};

// Bounds for the scene sampler.
struct SceneConstraints {
    int min_sources = 1;
    int max_sources = 12;
    double duration_s = 4.0;
    double sample_rate = 48000.0;
    double gain_range_db = 6.0;     // gains drawn uniform in [-range, +range]
    double source_distance_m = 1.0;
    double room_probability = 0.0;  // anechoic unless asked for rooms
    int room_image_order = 2;
};

// Draws a scene from the catalog: source count uniform on
// [min_sources, max_sources], directions uniform on the sphere, segment
// starts, channels and gains uniform.  Same seed, same scene.
SceneSpec sample_scene(std::uint64_t seed, const Catalog& catalog,
                       const SceneConstraints& constraints = {});

// First-order input plus third-order target for one scene.  The input block
// is a copy of target channels 0..3, so the pair is consistent by
// construction.
struct TrainingPair {
    AmbisonicSignal input;   // order 1
    AmbisonicSignal target;  // order 3
    SceneSpec scene;
};

// Renders every source (direct path plus image sources when a room is set)
// into a third-order signal.  Anechoic sources arrive with unit amplitude and
// zero delay; in a room each image arrives from its own direction with
// amplitude scaled by reflection losses and 1/distance, delayed by
// distance / c with linear-interpolation fractional delay.
TrainingPair render_scene(const SceneSpec& scene, const Catalog& catalog);

// JSON round trip for corpus sidecars.
nlohmann::json scene_to_json(const SceneSpec& scene);
SceneSpec scene_from_json(const nlohmann::json& doc);

}  // namespace ambiup
