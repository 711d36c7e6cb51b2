#include "ambiup/catalog.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "ambiup/errors.hpp"
#include "ambiup/synth.hpp"
#include "ambiup/wav.hpp"

namespace ambiup {

namespace {

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

constexpr double kBuiltinDuration = 8.0;

}  // namespace

Catalog Catalog::builtin() {
    Catalog cat;
    const char* kinds[] = {"pink", "tone", "am-noise"};
    for (const char* kind : kinds) {
        for (int i = 1; i <= 8; ++i) {
            CatalogItem item;
            item.kind = kind;
            item.id = std::string(kind) + "-0" + std::to_string(i);
            item.channels = 1;
            item.duration_s = kBuiltinDuration;
            item.seed = fnv1a(item.id);
            cat.items_.push_back(item);
        }
    }
    return cat;
}

Catalog Catalog::load_manifest(const std::filesystem::path& manifest_path) {
    std::ifstream in(manifest_path);
    if (!in) throw IoError("catalog: cannot open " + manifest_path.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("catalog: bad JSON in " + manifest_path.string() + ": " + e.what());
    }
    if (!doc.contains("items") || !doc["items"].is_array()) {
        throw FormatError("catalog: manifest needs an \"items\" array");
    }

    Catalog cat;
    cat.base_dir_ = manifest_path.parent_path();
    for (const auto& entry : doc["items"]) {
        CatalogItem item;
        item.kind = "wav";
        item.id = entry.at("id").get<std::string>();
        item.path = entry.at("path").get<std::string>();
        const auto full = cat.base_dir_ / item.path;
        const WavData wav = read_wav(full);
        item.channels = static_cast<int>(wav.channels.size());
        item.duration_s = static_cast<double>(wav.frames()) / wav.sample_rate;
        cat.items_.push_back(item);
    }
    if (cat.items_.empty()) throw FormatError("catalog: manifest has no items");
    return cat;
}

const CatalogItem& Catalog::find(const std::string& id) const {
    for (const auto& item : items_) {
        if (item.id == id) return item;
    }
    throw std::invalid_argument("catalog: unknown item '" + id + "'");
}

const std::vector<std::vector<double>>& Catalog::materialize(const CatalogItem& item,
                                                             double sample_rate) const {
    const std::string key = item.id + "@" + std::to_string(sample_rate);
    std::lock_guard<std::mutex> lock(cache_->mutex);
    auto it = cache_->entries.find(key);
    if (it != cache_->entries.end()) return it->second;

    std::vector<std::vector<double>> channels;
    if (item.kind == "pink") {
        channels.push_back(pink_noise(item.duration_s, sample_rate, item.seed));
    } else if (item.kind == "tone") {
        channels.push_back(tone_complex(item.duration_s, sample_rate, item.seed));
    } else if (item.kind == "am-noise") {
        channels.push_back(am_noise(item.duration_s, sample_rate, item.seed));
    } else if (item.kind == "wav") {
        const WavData wav = read_wav(base_dir_ / item.path);
        if (wav.sample_rate != sample_rate) {
            throw std::invalid_argument("catalog: item '" + item.id + "' is at " +
                                        std::to_string(wav.sample_rate) + " Hz, scene wants " +
                                        std::to_string(sample_rate));
        }
        channels = wav.channels;
    } else {
        throw std::invalid_argument("catalog: unknown item kind '" + item.kind + "'");
    }

    if (cache_->entries.size() > 64) cache_->entries.clear();
    return cache_->entries.emplace(key, std::move(channels)).first->second;
}

std::vector<double> Catalog::fetch(const CatalogItem& item, int channel, double start_s,
                                   double duration_s, double sample_rate) const {
    if (channel < 0 || channel >= item.channels) {
        throw std::invalid_argument("catalog: channel out of range for item '" + item.id + "'");
    }
    if (start_s < 0.0 || duration_s <= 0.0) {
        throw std::invalid_argument("catalog: bad segment bounds");
    }
    const auto& channels = materialize(item, sample_rate);
    const auto& full = channels[static_cast<std::size_t>(channel)];

    const std::size_t start = static_cast<std::size_t>(std::llround(start_s * sample_rate));
    const std::size_t count = static_cast<std::size_t>(std::llround(duration_s * sample_rate));
    if (start + count > full.size()) {
        throw std::invalid_argument("catalog: segment extends past item '" + item.id + "'");
    }
    return std::vector<double>(full.begin() + static_cast<std::ptrdiff_t>(start),
                               full.begin() + static_cast<std::ptrdiff_t>(start + count));
}

}  // namespace ambiup
