#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "ambiup/model.hpp"

namespace ambiup {

// Training provenance stored alongside the parameters.
struct CheckpointMeta {
    std::int64_t step = 0;
    std::uint64_t seed = 0;
    double final_loss = 0.0;
    std::uint64_t loss_digest = 0;  // FNV-1a over the loss trace bytes
};

// File layout: 8-byte magic "AMBIUPC1", uint64 little-endian manifest length,
// JSON manifest {version, config, tensors: name -> {shape, offset, size},
// meta}, then a raw little-endian float32 blob.  Offsets are float indices
// into the blob.
void save_checkpoint(const std::filesystem::path& path, const Model<float>& model,
                     const CheckpointMeta& meta);

Model<float> load_checkpoint(const std::filesystem::path& path, CheckpointMeta* meta = nullptr);

std::uint64_t fnv1a_bytes(const void* data, std::size_t size, std::uint64_t basis = 0xcbf29ce484222325ULL);

}  // namespace ambiup
