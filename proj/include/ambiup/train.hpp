#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <vector>

#include "ambiup/model.hpp"
#include "ambiup/scene.hpp"

namespace ambiup {

struct TrainConfig {
    double lr = 1e-3;
    std::int64_t steps = 1000;
    std::uint64_t seed = 0;
    int threads = 1;
    std::int64_t checkpoint_every = 0;  // 0 disables periodic checkpoints
    std::filesystem::path checkpoint_dir;
    // Convergence: stop early when relative validation improvement stays
    // below `convergence_tol` for `patience` consecutive evaluations.
    std::int64_t validate_every = 0;    // 0 disables validation/convergence
    double convergence_tol = 1e-4;
    int patience = 4;
};

struct TrainResult {
    std::vector<float> loss_trace;       // one L1 value per step
    std::vector<float> validation_trace; // one value per validation pass
    std::int64_t steps_run = 0;
    bool converged = false;
};

// One training example per step, indexed so data generation is independent of
// scheduling.  Implementations must be deterministic in the index.
using PairSource = std::function<TrainingPair(std::int64_t index)>;

// Streams validation pairs by index when validation is enabled.
struct ValidationSet {
    std::int64_t count = 0;
    PairSource source;
};

// Single-writer Adam loop over L1 reconstruction loss.  Throws on divergence
// (NaN loss).  Same seed, same trace, any thread count.
TrainResult train(Model<float>& model, const PairSource& pairs, const TrainConfig& config,
                  const ValidationSet* validation = nullptr);

// Converts a rendered pair into the model's tensor domain.
Tensor<float> pair_input_tensor(const TrainingPair& pair);
Tensor<float> pair_target_tensor(const TrainingPair& pair);

}  // namespace ambiup
