#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace ambiup {

// One source signal available to scene sampling.  Builtin items are synthesized
// on demand from their seed; file items point at WAV assets.
struct CatalogItem {
    std::string id;
    std::string kind;  // "pink", "tone", "am-noise", or "wav"
    std::string path;  // file items only
    int channels = 1;
    double duration_s = 0.0;
    std::uint64_t seed = 0;  // builtin items only
};

class Catalog {
public:
    // Deterministic synthetic catalog: eight pink, eight tonal, and eight
    // amplitude-modulated noise items, 8 s each, seeded from their ids.
    static Catalog builtin();

    // JSON manifest {"items": [{"id", "path"}, ...]}; channel count and
    // duration are read from each WAV header.  Paths resolve relative to the
    // manifest location.
    static Catalog load_manifest(const std::filesystem::path& manifest_path);

    const std::vector<CatalogItem>& items() const { return items_; }
    const CatalogItem& find(const std::string& id) const;

    // One channel of a time slice, rendered/loaded at `sample_rate`.  File
    // items must already be at that rate (no resampling here); the requested
    // segment must lie inside the item.
    std::vector<double> fetch(const CatalogItem& item, int channel, double start_s,
                              double duration_s, double sample_rate) const;

private:
    struct Cache {
        std::mutex mutex;
        std::map<std::string, std::vector<std::vector<double>>> entries;  // id@rate -> channels
    };

    std::vector<CatalogItem> items_;
    std::filesystem::path base_dir_;
    std::shared_ptr<Cache> cache_ = std::make_shared<Cache>();

    const std::vector<std::vector<double>>& materialize(const CatalogItem& item,
                                                        double sample_rate) const;
};

}  // namespace ambiup
