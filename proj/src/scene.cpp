#include "ambiup/scene.hpp"

#include <cmath>
#include <stdexcept>

#include "ambiup/rng.hpp"
#include "ambiup/sh.hpp"

namespace ambiup {

namespace {

constexpr std::uint64_t kSceneStream = 0x7363656eULL;  // "scen"

// out[t] += gain * x[t - delay] with linear interpolation between samples.
void add_delayed(std::vector<double>& out, const std::vector<double>& x, double delay_samples,
                 double gain) {
    if (gain == 0.0) return;
    const auto k = static_cast<std::ptrdiff_t>(std::floor(delay_samples));
    const double frac = delay_samples - static_cast<double>(k);
    const double w0 = gain * (1.0 - frac);
    const double w1 = gain * frac;
    const auto n = static_cast<std::ptrdiff_t>(out.size());
    const auto m = static_cast<std::ptrdiff_t>(x.size());
    for (std::ptrdiff_t t = 0; t < n; ++t) {
        const std::ptrdiff_t s0 = t - k;
        const std::ptrdiff_t s1 = s0 - 1;
        double v = 0.0;
        if (s0 >= 0 && s0 < m) v += w0 * x[s0];
        if (s1 >= 0 && s1 < m) v += w1 * x[s1];
        out[t] += v;
    }
}

void accumulate_encoded(AmbisonicSignal& acc, const std::vector<double>& mono,
                        const Direction& direction, double gain, double delay_samples) {
    double sh[16];
    real_sh_into(acc.order, direction, sh);
    const int channels = sh_channel_count(acc.order);
    for (int c = 0; c < channels; ++c) {
        add_delayed(acc.channels[static_cast<std::size_t>(c)], mono, delay_samples, gain * sh[c]);
    }
}

}  // namespace

SceneSpec sample_scene(std::uint64_t seed, const Catalog& catalog,
                       const SceneConstraints& constraints) {
    if (constraints.min_sources < 1 || constraints.max_sources < constraints.min_sources) {
        throw std::invalid_argument("sample_scene: bad source count bounds");
    }
    if (catalog.items().empty()) throw std::invalid_argument("sample_scene: empty catalog");

    Rng rng = Rng::child(seed, kSceneStream);
    SceneSpec scene;
    scene.seed = seed;
    scene.sample_rate = constraints.sample_rate;
    scene.duration_s = constraints.duration_s;

    const auto n_sources =
        static_cast<int>(rng.uniform_int(constraints.min_sources, constraints.max_sources));
    for (int i = 0; i < n_sources; ++i) {
        const auto& item =
            catalog.items()[static_cast<std::size_t>(rng.uniform_int(
                0, static_cast<std::int64_t>(catalog.items().size()) - 1))];
        if (item.duration_s < constraints.duration_s) {
            throw std::invalid_argument("sample_scene: item '" + item.id +
                                        "' is shorter than the scene duration");
        }
        SourceSpec src;
        src.signal_ref = item.id;
        src.channel = static_cast<int>(rng.uniform_int(0, item.channels - 1));
        src.segment_start_s = rng.uniform(0.0, item.duration_s - constraints.duration_s);
        const double az = rng.uniform(-M_PI, M_PI);
        const double el = std::asin(rng.uniform(-1.0, 1.0));  // uniform on the sphere
        src.direction = Direction(az, el);
        src.gain_db = rng.uniform(-constraints.gain_range_db, constraints.gain_range_db);
        src.distance_m = constraints.source_distance_m;
        scene.sources.push_back(src);
    }

    if (rng.uniform() < constraints.room_probability) {
        RoomSpec room;
        room.dimensions = {rng.uniform(4.0, 10.0), rng.uniform(4.0, 10.0), rng.uniform(2.5, 4.0)};
        for (int w = 0; w < 6; ++w) room.absorption[static_cast<std::size_t>(w)] = rng.uniform(0.2, 0.9);
        for (int axis = 0; axis < 3; ++axis) {
            // 1.2 m margin keeps every 1 m source ball inside the room
            room.listener_position[static_cast<std::size_t>(axis)] =
                rng.uniform(1.2, room.dimensions[static_cast<std::size_t>(axis)] - 1.2);
        }
        room.max_image_order = constraints.room_image_order;
        scene.room = room;
    }
    return scene;
}

TrainingPair render_scene(const SceneSpec& scene, const Catalog& catalog) {
    if (scene.duration_s <= 0.0 || scene.sample_rate <= 0.0) {
        throw std::invalid_argument("render_scene: bad duration or sample rate");
    }
    const auto frames =
        static_cast<std::size_t>(std::llround(scene.duration_s * scene.sample_rate));

    AmbisonicSignal target;
    target.order = 3;
    target.sample_rate = scene.sample_rate;
    target.channels.assign(16, std::vector<double>(frames, 0.0));

    for (const auto& src : scene.sources) {
        const auto& item = catalog.find(src.signal_ref);
        const std::vector<double> mono =
            catalog.fetch(item, src.channel, src.segment_start_s, scene.duration_s,
                          scene.sample_rate);
        const double gain = std::pow(10.0, src.gain_db / 20.0);

        if (!scene.room) {
            accumulate_encoded(target, mono, src.direction, gain, 0.0);
            continue;
        }

        const auto& room = *scene.room;
        const auto u = src.direction.unit_vector();
        std::array<double, 3> src_pos;
        for (int axis = 0; axis < 3; ++axis) {
            src_pos[static_cast<std::size_t>(axis)] =
                room.listener_position[static_cast<std::size_t>(axis)] +
                src.distance_m * u[static_cast<std::size_t>(axis)];
        }
        const auto images = image_source_model(room, src_pos, room.max_image_order);
        for (const auto& img : images) {
            accumulate_encoded(target, mono, img.arrival, gain * img.amplitude,
                               img.delay_s * scene.sample_rate);
        }
    }

    TrainingPair pair;
    pair.scene = scene;
    pair.target = std::move(target);
    pair.input.order = 1;
    pair.input.sample_rate = scene.sample_rate;
    pair.input.channels.assign(pair.target.channels.begin(), pair.target.channels.begin() + 4);
    return pair;
}

nlohmann::json scene_to_json(const SceneSpec& scene) {
    nlohmann::json sources = nlohmann::json::array();
    for (const auto& src : scene.sources) {
        sources.push_back({
            {"signal_ref", src.signal_ref},
            {"channel", src.channel},
            {"segment_start_s", src.segment_start_s},
            {"azimuth_rad", src.direction.azimuth()},
            {"elevation_rad", src.direction.elevation()},
            {"gain_db", src.gain_db},
            {"distance_m", src.distance_m},
        });
    }
    nlohmann::json doc = {
        {"seed", scene.seed},
        {"sample_rate", scene.sample_rate},
        {"duration_s", scene.duration_s},
        {"sources", sources},
    };
    if (scene.room) {
        doc["room"] = {
            {"dimensions", scene.room->dimensions},
            {"absorption", scene.room->absorption},
            {"listener_position", scene.room->listener_position},
            {"max_image_order", scene.room->max_image_order},
        };
    }
    return doc;
}

SceneSpec scene_from_json(const nlohmann::json& doc) {
    SceneSpec scene;
    scene.seed = doc.at("seed").get<std::uint64_t>();
    scene.sample_rate = doc.at("sample_rate").get<double>();
    scene.duration_s = doc.at("duration_s").get<double>();
    for (const auto& s : doc.at("sources")) {
        SourceSpec src;
        src.signal_ref = s.at("signal_ref").get<std::string>();
        src.channel = s.at("channel").get<int>();
        src.segment_start_s = s.at("segment_start_s").get<double>();
        src.direction = Direction(s.at("azimuth_rad").get<double>(),
                                  s.at("elevation_rad").get<double>());
        src.gain_db = s.at("gain_db").get<double>();
        src.distance_m = s.value("distance_m", 1.0);
        scene.sources.push_back(src);
    }
    if (doc.contains("room")) {
        RoomSpec room;
        const auto& r = doc["room"];
        room.dimensions = r.at("dimensions").get<std::array<double, 3>>();
        room.absorption = r.at("absorption").get<std::array<double, 6>>();
        room.listener_position = r.at("listener_position").get<std::array<double, 3>>();
        room.max_image_order = r.at("max_image_order").get<int>();
        scene.room = room;
    }
    return scene;
}

}  // namespace ambiup
