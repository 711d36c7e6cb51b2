#include "ambiup/train.hpp"

#include <cmath>
#include <stdexcept>

#include "ambiup/adam.hpp"
#include "ambiup/checkpoint.hpp"

namespace ambiup {

namespace {

Tensor<float> signal_to_tensor(const AmbisonicSignal& sig) {
    const std::int64_t c = static_cast<std::int64_t>(sig.channels.size());
    const std::int64_t t = static_cast<std::int64_t>(sig.frames());
    Tensor<float> out = Tensor<float>::zeros({c, t});
    for (std::int64_t ch = 0; ch < c; ++ch) {
        const auto& row = sig.channels[static_cast<std::size_t>(ch)];
        for (std::int64_t i = 0; i < t; ++i) {
            out.data[static_cast<std::size_t>(ch * t + i)] =
                static_cast<float>(row[static_cast<std::size_t>(i)]);
        }
    }
    return out;
}

float validation_loss(const Model<float>& model, const ValidationSet& validation, int threads) {
    double total = 0.0;
    for (std::int64_t i = 0; i < validation.count; ++i) {
        const TrainingPair pair = validation.source(i);
        const Tensor<float> input = pair_input_tensor(pair);
        const Tensor<float> target = pair_target_tensor(pair);
        const Tensor<float> pred = model_forward<float>(model, input, nullptr, threads);
        Tensor<float> grad_unused;
        total += static_cast<double>(l1_loss(pred, target, grad_unused));
    }
    return static_cast<float>(total / static_cast<double>(validation.count));
}

}  // namespace

Tensor<float> pair_input_tensor(const TrainingPair& pair) { return signal_to_tensor(pair.input); }

Tensor<float> pair_target_tensor(const TrainingPair& pair) { return signal_to_tensor(pair.target); }

TrainResult train(Model<float>& model, const PairSource& pairs, const TrainConfig& config,
                  const ValidationSet* validation) {
    if (config.steps < 1) throw std::invalid_argument("train: steps must be >= 1");
    if (!pairs) throw std::invalid_argument("train: empty pair source");

    std::vector<Tensor<float>*> params;
    for_each_param(model, [&params](const std::string&, Tensor<float>& t) { params.push_back(&t); });
    AdamState<float> state = AdamState<float>::init(params);
    AdamConfig adam;
    adam.lr = config.lr;

    TrainResult result;
    result.loss_trace.reserve(static_cast<std::size_t>(config.steps));

    float best_val = 0.0f;
    bool have_val = false;
    int stale = 0;

    Model<float> grads;
    ModelTape<float> tape;
    for (std::int64_t step = 0; step < config.steps; ++step) {
        const TrainingPair pair = pairs(step);
        const Tensor<float> input = pair_input_tensor(pair);
        const Tensor<float> target = pair_target_tensor(pair);

        const Tensor<float> pred = model_forward(model, input, &tape, config.threads);
        Tensor<float> grad_pred;
        const float loss = l1_loss(pred, target, grad_pred);
        if (!std::isfinite(loss)) {
            throw std::runtime_error("train: loss diverged (non-finite) at step " +
                                     std::to_string(step));
        }
        result.loss_trace.push_back(loss);

        model_backward(model, tape, grad_pred, grads, config.threads);
        std::vector<Tensor<float>*> grad_ptrs;
        for_each_param(grads,
                       [&grad_ptrs](const std::string&, Tensor<float>& t) { grad_ptrs.push_back(&t); });
        adam_step(params, grad_ptrs, state, adam);
        result.steps_run = step + 1;

        if (config.checkpoint_every > 0 && !config.checkpoint_dir.empty() &&
            (step + 1) % config.checkpoint_every == 0) {
            CheckpointMeta meta;
            meta.step = step + 1;
            meta.seed = config.seed;
            meta.final_loss = loss;
            meta.loss_digest = fnv1a_bytes(result.loss_trace.data(),
                                           result.loss_trace.size() * sizeof(float));
            save_checkpoint(config.checkpoint_dir /
                                ("step_" + std::to_string(step + 1) + ".ckpt"),
                            model, meta);
        }

        if (validation && config.validate_every > 0 && (step + 1) % config.validate_every == 0) {
            const float val = validation_loss(model, *validation, config.threads);
            result.validation_trace.push_back(val);
            if (have_val) {
                const float rel = (best_val - val) / std::max(best_val, 1e-12f);
                stale = rel < static_cast<float>(config.convergence_tol) ? stale + 1 : 0;
            }
            if (!have_val || val < best_val) {
                best_val = val;
                have_val = true;
            }
            if (stale >= config.patience) {
                result.converged = true;
                break;
            }
        }
    }
    return result;
}

}  // namespace ambiup
