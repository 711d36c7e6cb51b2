#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "ambiup/tensor.hpp"

namespace ambiup {

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// First/second moment buffers, one pair per parameter tensor, plus the shared
// step counter used for bias correction.
template <typename T>
struct AdamState {
    std::int64_t step = 0;
    std::vector<Tensor<T>> m;
    std::vector<Tensor<T>> v;

    static AdamState init(const std::vector<Tensor<T>*>& params) {
        AdamState s;
        s.m.reserve(params.size());
        s.v.reserve(params.size());
        for (const Tensor<T>* p : params) {
            s.m.push_back(Tensor<T>::zeros(p->shape));
            s.v.push_back(Tensor<T>::zeros(p->shape));
        }
        return s;
    }
};

template <typename T>
void adam_step(const std::vector<Tensor<T>*>& params, const std::vector<Tensor<T>*>& grads,
               AdamState<T>& state, const AdamConfig& cfg) {
    if (params.size() != grads.size() || params.size() != state.m.size()) {
        throw std::invalid_argument("adam_step: parameter/gradient/state count mismatch");
    }
    state.step += 1;
    const T bc1 = static_cast<T>(1.0 - std::pow(cfg.beta1, static_cast<double>(state.step)));
    const T bc2 = static_cast<T>(1.0 - std::pow(cfg.beta2, static_cast<double>(state.step)));
    const T b1 = static_cast<T>(cfg.beta1), b2 = static_cast<T>(cfg.beta2);
    const T lr = static_cast<T>(cfg.lr), eps = static_cast<T>(cfg.eps);

    for (std::size_t pi = 0; pi < params.size(); ++pi) {
        Tensor<T>& w = *params[pi];
        const Tensor<T>& g = *grads[pi];
        Tensor<T>& m = state.m[pi];
        Tensor<T>& v = state.v[pi];
        if (g.shape != w.shape) throw std::invalid_argument("adam_step: gradient shape mismatch");
        for (std::size_t i = 0; i < w.data.size(); ++i) {
            m.data[i] = b1 * m.data[i] + (T(1) - b1) * g.data[i];
            v.data[i] = b2 * v.data[i] + (T(1) - b2) * g.data[i] * g.data[i];
            const T mhat = m.data[i] / bc1;
            const T vhat = v.data[i] / bc2;
            w.data[i] -= lr * mhat / (std::sqrt(vhat) + eps);
        }
    }
}

}  // namespace ambiup
