#include "ambiup/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include <json.hpp>

#include "ambiup/errors.hpp"

namespace ambiup {

namespace {

constexpr char kMagic[8] = {'A', 'M', 'B', 'I', 'U', 'P', 'C', '1'};
constexpr int kVersion = 1;

}  // namespace

std::uint64_t fnv1a_bytes(const void* data, std::size_t size, std::uint64_t basis) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    std::uint64_t h = basis;
    for (std::size_t i = 0; i < size; ++i) {
        h ^= bytes[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

void save_checkpoint(const std::filesystem::path& path, const Model<float>& model,
                     const CheckpointMeta& meta) {
    nlohmann::json tensors = nlohmann::json::object();
    std::vector<const Tensor<float>*> ordered;
    std::int64_t offset = 0;
    for_each_param(model, [&](const std::string& name, const Tensor<float>& t) {
        tensors[name] = {{"shape", t.shape}, {"offset", offset}, {"size", t.numel()}};
        ordered.push_back(&t);
        offset += t.numel();
    });

    nlohmann::json manifest = {
        {"version", kVersion},
        {"config", model.config.to_json()},
        {"tensors", tensors},
        {"meta",
         {{"step", meta.step},
          {"seed", meta.seed},
          {"final_loss", meta.final_loss},
          {"loss_digest", meta.loss_digest}}},
    };
    const std::string manifest_str = manifest.dump();

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("checkpoint: cannot create " + path.string());
    out.write(kMagic, 8);
    const std::uint64_t len = manifest_str.size();
    out.write(reinterpret_cast<const char*>(&len), 8);
    out.write(manifest_str.data(), static_cast<std::streamsize>(manifest_str.size()));
    for (const Tensor<float>* t : ordered) {
        out.write(reinterpret_cast<const char*>(t->data.data()),
                  static_cast<std::streamsize>(t->data.size() * sizeof(float)));
    }
    if (!out) throw IoError("checkpoint: write failed for " + path.string());
}

Model<float> load_checkpoint(const std::filesystem::path& path, CheckpointMeta* meta) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("checkpoint: cannot open " + path.string());

    char magic[8];
    if (!in.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0) {
        throw FormatError("checkpoint: bad magic in " + path.string());
    }
    std::uint64_t len = 0;
    if (!in.read(reinterpret_cast<char*>(&len), 8)) {
        throw FormatError("checkpoint: truncated manifest length");
    }
    std::string manifest_str(len, '\0');
    if (!in.read(manifest_str.data(), static_cast<std::streamsize>(len))) {
        throw FormatError("checkpoint: truncated manifest");
    }

    nlohmann::json manifest;
    try {
        manifest = nlohmann::json::parse(manifest_str);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("checkpoint: bad manifest JSON: ") + e.what());
    }
    if (manifest.value("version", -1) != kVersion) {
        throw FormatError("checkpoint: unsupported version in " + path.string());
    }

    const ModelConfig config = ModelConfig::from_json(manifest.at("config"));
    Model<float> model = build_model<float>(config, 0);

    in.seekg(0, std::ios::end);
    const std::streamoff end = in.tellg();
    const std::streamoff blob_bytes = end - static_cast<std::streamoff>(16 + len);
    if (blob_bytes < 0 || blob_bytes % 4 != 0) {
        throw FormatError("checkpoint: blob is not a whole number of floats");
    }
    std::vector<float> blob(static_cast<std::size_t>(blob_bytes / 4), 0.0f);
    in.seekg(static_cast<std::streamoff>(16 + len), std::ios::beg);
    if (!in.read(reinterpret_cast<char*>(blob.data()), blob_bytes)) {
        throw FormatError("checkpoint: truncated blob");
    }

    const auto& tensors = manifest.at("tensors");
    for_each_param(model, [&](const std::string& name, Tensor<float>& t) {
        if (!tensors.contains(name)) {
            throw FormatError("checkpoint: missing tensor '" + name + "'");
        }
        const auto& entry = tensors.at(name);
        const auto shape = entry.at("shape").get<std::vector<std::int64_t>>();
        const auto offset = entry.at("offset").get<std::int64_t>();
        const auto size = entry.at("size").get<std::int64_t>();
        if (shape != t.shape || size != t.numel()) {
            throw FormatError("checkpoint: shape mismatch for tensor '" + name + "'");
        }
        if (offset < 0 || offset + size > static_cast<std::int64_t>(blob.size())) {
            throw FormatError("checkpoint: dangling offset for tensor '" + name + "'");
        }
        std::memcpy(t.data.data(), blob.data() + offset, static_cast<std::size_t>(size) * 4);
    });

    if (meta) {
        const auto& m = manifest.at("meta");
        meta->step = m.value("step", std::int64_t{0});
        meta->seed = m.value("seed", std::uint64_t{0});
        meta->final_loss = m.value("final_loss", 0.0);
        meta->loss_digest = m.value("loss_digest", std::uint64_t{0});
    }
    return model;
}

}  // namespace ambiup
