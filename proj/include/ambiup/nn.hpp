#pragma once

#include <cmath>
#include <stdexcept>

#include "ambiup/parallel.hpp"
#include "ambiup/tensor.hpp"

namespace ambiup {

// 1-D layer kernels over [channels, time] tensors, forward and backward.
// Everything is written so that each output element has exactly one writer,
// which keeps results bit-identical for any worker count.  No layer has a
// bias term.

struct ConvGeometry {
    int stride = 1;
    int dilation = 1;
    int pad_left = 0;
    int pad_right = 0;
    int groups = 1;
};

inline std::int64_t conv_out_length(std::int64_t in_len, std::int64_t kernel,
                                    const ConvGeometry& g) {
    const std::int64_t span = in_len + g.pad_left + g.pad_right -
                              static_cast<std::int64_t>(g.dilation) * (kernel - 1) - 1;
    if (span < 0) return 0;
    return span / g.stride + 1;
}

namespace detail {

inline void check_conv_args(const std::vector<std::int64_t>& in_shape,
                            const std::vector<std::int64_t>& w_shape, const ConvGeometry& g) {
    if (in_shape.size() != 2 || w_shape.size() != 3) {
        throw std::invalid_argument("conv1d: want input [C,T] and weight [Cout,Cin/g,K]");
    }
    if (g.stride < 1 || g.dilation < 1 || g.groups < 1 || g.pad_left < 0 || g.pad_right < 0) {
        throw std::invalid_argument("conv1d: bad geometry");
    }
    if (in_shape[0] % g.groups != 0 || w_shape[0] % g.groups != 0) {
        throw std::invalid_argument("conv1d: channels not divisible by groups");
    }
    if (w_shape[1] != in_shape[0] / g.groups) {
        throw std::invalid_argument("conv1d: weight in-channel dim mismatch");
    }
}

}  // namespace detail

// out[oc, ot] = sum_{ic in group, k} in[ic, ot*stride - pad_left + k*dilation] * w[oc, ic_g, k]
template <typename T>
Tensor<T> conv1d_forward(const Tensor<T>& in, const Tensor<T>& w, const ConvGeometry& g,
                         int threads = 1) {
    detail::check_conv_args(in.shape, w.shape, g);
    const std::int64_t cin = in.shape[0], tin = in.shape[1];
    const std::int64_t cout = w.shape[0], cin_g = w.shape[1], kernel = w.shape[2];
    const std::int64_t tout = conv_out_length(tin, kernel, g);
    if (tout <= 0) throw std::invalid_argument("conv1d: input shorter than kernel span");
    const std::int64_t cout_g = cout / g.groups;
    (void)cin;

    Tensor<T> out = Tensor<T>::zeros({cout, tout});
    parallel_for(cout, threads, [&](std::int64_t oc) {
        const std::int64_t group = oc / cout_g;
        const T* wrow = w.data.data() + oc * cin_g * kernel;
        T* orow = out.data.data() + oc * tout;
        for (std::int64_t icg = 0; icg < cin_g; ++icg) {
            const T* irow = in.data.data() + (group * cin_g + icg) * tin;
            const T* wk = wrow + icg * kernel;
            for (std::int64_t k = 0; k < kernel; ++k) {
                const T wv = wk[k];
                if (wv == T(0)) continue;
                const std::int64_t base = k * g.dilation - g.pad_left;
                for (std::int64_t ot = 0; ot < tout; ++ot) {
                    const std::int64_t ti = ot * g.stride + base;
                    if (ti >= 0 && ti < tin) orow[ot] += wv * irow[ti];
                }
            }
        }
    });
    return out;
}

// Accumulates grad_in and grad_w.  Two deterministic passes: weights are
// owned per output channel, input gradients per input channel.
template <typename T>
void conv1d_backward(const Tensor<T>& in, const Tensor<T>& w, const Tensor<T>& grad_out,
                     const ConvGeometry& g, Tensor<T>& grad_in, Tensor<T>& grad_w,
                     int threads = 1) {
    detail::check_conv_args(in.shape, w.shape, g);
    const std::int64_t cin = in.shape[0], tin = in.shape[1];
    const std::int64_t cout = w.shape[0], cin_g = w.shape[1], kernel = w.shape[2];
    const std::int64_t tout = grad_out.shape[1];
    const std::int64_t cout_g = cout / g.groups;
    if (grad_out.shape[0] != cout) throw std::invalid_argument("conv1d_backward: grad shape");

    grad_in = Tensor<T>::zeros(in.shape);
    grad_w = Tensor<T>::zeros(w.shape);

    parallel_for(cout, threads, [&](std::int64_t oc) {
        const std::int64_t group = oc / cout_g;
        const T* grow = grad_out.data.data() + oc * tout;
        T* gwrow = grad_w.data.data() + oc * cin_g * kernel;
        for (std::int64_t icg = 0; icg < cin_g; ++icg) {
            const T* irow = in.data.data() + (group * cin_g + icg) * tin;
            T* gwk = gwrow + icg * kernel;
            for (std::int64_t k = 0; k < kernel; ++k) {
                const std::int64_t base = k * g.dilation - g.pad_left;
                T acc = T(0);
                for (std::int64_t ot = 0; ot < tout; ++ot) {
                    const std::int64_t ti = ot * g.stride + base;
                    if (ti >= 0 && ti < tin) acc += grow[ot] * irow[ti];
                }
                gwk[k] += acc;
            }
        }
    });

    parallel_for(cin, threads, [&](std::int64_t ic) {
        const std::int64_t group = ic / cin_g;
        const std::int64_t icg = ic % cin_g;
        T* girow = grad_in.data.data() + ic * tin;
        for (std::int64_t oc = group * cout_g; oc < (group + 1) * cout_g; ++oc) {
            const T* grow = grad_out.data.data() + oc * tout;
            const T* wk = w.data.data() + (oc * cin_g + icg) * kernel;
            for (std::int64_t k = 0; k < kernel; ++k) {
                const T wv = wk[k];
                if (wv == T(0)) continue;
                const std::int64_t base = k * g.dilation - g.pad_left;
                for (std::int64_t ot = 0; ot < tout; ++ot) {
                    const std::int64_t ti = ot * g.stride + base;
                    if (ti >= 0 && ti < tin) girow[ti] += wv * grow[ot];
                }
            }
        }
    });
}

// Transposed convolution, weight [Cin, Cout, K]:
// out[oc, it*stride + k] += in[ic, it] * w[ic, oc, k];  Tout = (Tin-1)*stride + K.
template <typename T>
Tensor<T> conv_transpose1d_forward(const Tensor<T>& in, const Tensor<T>& w, int stride,
                                   int threads = 1) {
    if (in.shape.size() != 2 || w.shape.size() != 3 || in.shape[0] != w.shape[0]) {
        throw std::invalid_argument("conv_transpose1d: shape mismatch");
    }
    if (stride < 1) throw std::invalid_argument("conv_transpose1d: bad stride");
    const std::int64_t cin = in.shape[0], tin = in.shape[1];
    const std::int64_t cout = w.shape[1], kernel = w.shape[2];
    const std::int64_t tout = (tin - 1) * stride + kernel;

    Tensor<T> out = Tensor<T>::zeros({cout, tout});
    parallel_for(cout, threads, [&](std::int64_t oc) {
        T* orow = out.data.data() + oc * tout;
        for (std::int64_t ic = 0; ic < cin; ++ic) {
            const T* irow = in.data.data() + ic * tin;
            const T* wk = w.data.data() + (ic * cout + oc) * kernel;
            for (std::int64_t k = 0; k < kernel; ++k) {
                const T wv = wk[k];
                if (wv == T(0)) continue;
                for (std::int64_t it = 0; it < tin; ++it) {
                    orow[it * stride + k] += wv * irow[it];
                }
            }
        }
    });
    return out;
}

template <typename T>
void conv_transpose1d_backward(const Tensor<T>& in, const Tensor<T>& w,
                               const Tensor<T>& grad_out, int stride, Tensor<T>& grad_in,
                               Tensor<T>& grad_w, int threads = 1) {
    const std::int64_t cin = in.shape[0], tin = in.shape[1];
    const std::int64_t cout = w.shape[1], kernel = w.shape[2];
    const std::int64_t tout = grad_out.shape[1];
    if (grad_out.shape[0] != cout || tout != (tin - 1) * stride + kernel) {
        throw std::invalid_argument("conv_transpose1d_backward: grad shape");
    }

    grad_in = Tensor<T>::zeros(in.shape);
    grad_w = Tensor<T>::zeros(w.shape);

    parallel_for(cin, threads, [&](std::int64_t ic) {
        const T* irow = in.data.data() + ic * tin;
        T* girow = grad_in.data.data() + ic * tin;
        for (std::int64_t oc = 0; oc < cout; ++oc) {
            const T* grow = grad_out.data.data() + oc * tout;
            const T* wk = w.data.data() + (ic * cout + oc) * kernel;
            T* gwk = grad_w.data.data() + (ic * cout + oc) * kernel;
            for (std::int64_t k = 0; k < kernel; ++k) {
                const T wv = wk[k];
                T acc_w = T(0);
                for (std::int64_t it = 0; it < tin; ++it) {
                    const T go = grow[it * stride + k];
                    girow[it] += wv * go;
                    acc_w += irow[it] * go;
                }
                gwk[k] += acc_w;
            }
        }
    });
}

// PReLU with one learned slope per channel.
template <typename T>
Tensor<T> prelu_forward(const Tensor<T>& in, const Tensor<T>& slopes) {
    if (in.shape.size() != 2 || slopes.numel() != in.shape[0]) {
        throw std::invalid_argument("prelu: slope count must match channels");
    }
    const std::int64_t c = in.shape[0], t = in.shape[1];
    Tensor<T> out = Tensor<T>::zeros(in.shape);
    for (std::int64_t ch = 0; ch < c; ++ch) {
        const T a = slopes.data[static_cast<std::size_t>(ch)];
        const T* x = in.data.data() + ch * t;
        T* y = out.data.data() + ch * t;
        for (std::int64_t i = 0; i < t; ++i) y[i] = x[i] > T(0) ? x[i] : a * x[i];
    }
    return out;
}

template <typename T>
void prelu_backward(const Tensor<T>& in, const Tensor<T>& slopes, const Tensor<T>& grad_out,
                    Tensor<T>& grad_in, Tensor<T>& grad_slopes) {
    const std::int64_t c = in.shape[0], t = in.shape[1];
    grad_in = Tensor<T>::zeros(in.shape);
    grad_slopes = Tensor<T>::zeros(slopes.shape);
    for (std::int64_t ch = 0; ch < c; ++ch) {
        const T a = slopes.data[static_cast<std::size_t>(ch)];
        const T* x = in.data.data() + ch * t;
        const T* go = grad_out.data.data() + ch * t;
        T* gi = grad_in.data.data() + ch * t;
        T acc = T(0);
        for (std::int64_t i = 0; i < t; ++i) {
            if (x[i] > T(0)) {
                gi[i] = go[i];
            } else {
                gi[i] = a * go[i];
                acc += x[i] * go[i];
            }
        }
        grad_slopes.data[static_cast<std::size_t>(ch)] = acc;
    }
}

template <typename T>
Tensor<T> tanh_forward(const Tensor<T>& in) {
    Tensor<T> out = Tensor<T>::zeros(in.shape);
    for (std::size_t i = 0; i < in.data.size(); ++i) {
        out.data[i] = std::tanh(in.data[i]);
    }
    return out;
}

template <typename T>
Tensor<T> tanh_backward(const Tensor<T>& out, const Tensor<T>& grad_out) {
    Tensor<T> grad_in = Tensor<T>::zeros(out.shape);
    for (std::size_t i = 0; i < out.data.size(); ++i) {
        grad_in.data[i] = grad_out.data[i] * (T(1) - out.data[i] * out.data[i]);
    }
    return grad_in;
}

// Global layer norm: statistics over all channels and frames jointly, then a
// per-channel affine.  Stash holds (mean, inv_std) for the backward pass.
template <typename T>
struct GlnStash {
    T mean = T(0);
    T inv_std = T(0);
};

inline constexpr double kGlnEpsilon = 1e-8;

template <typename T>
Tensor<T> gln_forward(const Tensor<T>& in, const Tensor<T>& gamma, const Tensor<T>& beta,
                      GlnStash<T>& stash) {
    if (in.shape.size() != 2 || gamma.numel() != in.shape[0] || beta.numel() != in.shape[0]) {
        throw std::invalid_argument("gln: affine size must match channels");
    }
    const std::int64_t c = in.shape[0], t = in.shape[1];
    const T n = static_cast<T>(c * t);

    T mean = T(0);
    for (T v : in.data) mean += v;
    mean /= n;
    T var = T(0);
    for (T v : in.data) {
        const T d = v - mean;
        var += d * d;
    }
    var /= n;
    const T inv_std = T(1) / std::sqrt(var + static_cast<T>(kGlnEpsilon));
    stash.mean = mean;
    stash.inv_std = inv_std;

    Tensor<T> out = Tensor<T>::zeros(in.shape);
    for (std::int64_t ch = 0; ch < c; ++ch) {
        const T g = gamma.data[static_cast<std::size_t>(ch)];
        const T b = beta.data[static_cast<std::size_t>(ch)];
        const T* x = in.data.data() + ch * t;
        T* y = out.data.data() + ch * t;
        for (std::int64_t i = 0; i < t; ++i) y[i] = g * (x[i] - mean) * inv_std + b;
    }
    return out;
}

template <typename T>
void gln_backward(const Tensor<T>& in, const Tensor<T>& gamma, const GlnStash<T>& stash,
                  const Tensor<T>& grad_out, Tensor<T>& grad_in, Tensor<T>& grad_gamma,
                  Tensor<T>& grad_beta) {
    const std::int64_t c = in.shape[0], t = in.shape[1];
    const T n = static_cast<T>(c * t);
    const T mean = stash.mean, inv_std = stash.inv_std;

    grad_in = Tensor<T>::zeros(in.shape);
    grad_gamma = Tensor<T>::zeros(gamma.shape);
    grad_beta = Tensor<T>::zeros(gamma.shape);

    // dL/dxhat = g_out * gamma; then the standard layer-norm backward over
    // the joint statistic.
    T sum_dxhat = T(0);
    T sum_dxhat_xhat = T(0);
    for (std::int64_t ch = 0; ch < c; ++ch) {
        const T g = gamma.data[static_cast<std::size_t>(ch)];
        const T* x = in.data.data() + ch * t;
        const T* go = grad_out.data.data() + ch * t;
        T acc_gamma = T(0), acc_beta = T(0);
        for (std::int64_t i = 0; i < t; ++i) {
            const T xhat = (x[i] - mean) * inv_std;
            const T dxhat = go[i] * g;
            sum_dxhat += dxhat;
            sum_dxhat_xhat += dxhat * xhat;
            acc_gamma += go[i] * xhat;
            acc_beta += go[i];
        }
        grad_gamma.data[static_cast<std::size_t>(ch)] = acc_gamma;
        grad_beta.data[static_cast<std::size_t>(ch)] = acc_beta;
    }
    for (std::int64_t ch = 0; ch < c; ++ch) {
        const T g = gamma.data[static_cast<std::size_t>(ch)];
        const T* x = in.data.data() + ch * t;
        const T* go = grad_out.data.data() + ch * t;
        T* gi = grad_in.data.data() + ch * t;
        for (std::int64_t i = 0; i < t; ++i) {
            const T xhat = (x[i] - mean) * inv_std;
            const T dxhat = go[i] * g;
            gi[i] = inv_std * (dxhat - sum_dxhat / n - xhat * sum_dxhat_xhat / n);
        }
    }
}

// Mean absolute error; the subgradient at zero is taken as zero.
template <typename T>
T l1_loss(const Tensor<T>& pred, const Tensor<T>& target, Tensor<T>& grad_pred) {
    if (pred.shape != target.shape) throw std::invalid_argument("l1_loss: shape mismatch");
    grad_pred = Tensor<T>::zeros(pred.shape);
    const T n = static_cast<T>(pred.numel());
    T loss = T(0);
    for (std::size_t i = 0; i < pred.data.size(); ++i) {
        const T d = pred.data[i] - target.data[i];
        loss += d > T(0) ? d : -d;
        grad_pred.data[i] = d > T(0) ? T(1) / n : (d < T(0) ? T(-1) / n : T(0));
    }
    return loss / n;
}

}  // namespace ambiup
