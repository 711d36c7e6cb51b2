#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ambiup/nn.hpp"
#include "ambiup/rng.hpp"
#include "ambiup/signal.hpp"
#include "ambiup/tensor.hpp"

namespace ambiup {

// Condensed Conv-TasNet upscaler topology: learned conv encoder over the
// 4-channel input, bottleneck 1x1, X*R dilated depthwise-separable residual
// blocks, a 1x1 head producing 16 tanh-bounded masks over the shared encoder
// latent, and one shared transposed-conv decoder per masked latent.
struct ModelConfig {
    int n_enc = 384;        // encoder latent channels
    int kernel_len = 48;    // encoder kernel in samples (1 ms at the default rate)
    int enc_stride = 24;    // hop, default kernel_len / 2
    int n_bottleneck = 256; // bottleneck channels inside the block stack
    int n_conv = 512;       // channels inside each conv block
    int p_kernel = 3;       // depthwise kernel, odd for symmetric same-padding
    int x_blocks = 8;       // blocks per repeat, dilations 2^0 .. 2^(X-1)
    int repeats = 1;
    int in_channels = 4;
    int out_channels = 16;
    bool direct_generation = false;  // ablation: tanh output is the latent itself
    double sample_rate = 48000.0;

    void validate() const;
    nlohmann::json to_json() const;
    static ModelConfig from_json(const nlohmann::json& doc);
};

// Closed-form parameter total for a config; build_model enumeration must agree.
std::int64_t parameter_count(const ModelConfig& config);

template <typename T>
struct ConvBlockParams {
    Tensor<T> conv_in_w;   // [H, B, 1]
    Tensor<T> prelu1;      // [H]
    Tensor<T> gln1_gamma;  // [H]
    Tensor<T> gln1_beta;   // [H]
    Tensor<T> dw_w;        // [H, 1, P], groups = H
    Tensor<T> prelu2;      // [H]
    Tensor<T> gln2_gamma;  // [H]
    Tensor<T> gln2_beta;   // [H]
    Tensor<T> conv_out_w;  // [B, H, 1]
    int dilation = 1;
};

template <typename T>
struct Model {
    ModelConfig config;
    Tensor<T> encoder_w;     // [n_enc, in_channels, L]
    Tensor<T> bottleneck_w;  // [B, n_enc, 1]
    std::vector<ConvBlockParams<T>> blocks;  // X * R entries
    Tensor<T> mask_w;        // [out_channels * n_enc, B, 1]
    Tensor<T> decoder_w;     // [n_enc, 1, L] transposed conv
};

// Stable enumeration order shared by init, Adam, checkpointing and counting.
template <typename T, typename M, typename Fn>
void for_each_param_impl(M& model, Fn&& fn) {
    fn("encoder.weight", model.encoder_w);
    fn("bottleneck.weight", model.bottleneck_w);
    for (std::size_t b = 0; b < model.blocks.size(); ++b) {
        const std::string p = "block" + std::to_string(b) + ".";
        auto& blk = model.blocks[b];
        fn(p + "conv_in.weight", blk.conv_in_w);
        fn(p + "prelu1.slopes", blk.prelu1);
        fn(p + "gln1.gamma", blk.gln1_gamma);
        fn(p + "gln1.beta", blk.gln1_beta);
        fn(p + "depthwise.weight", blk.dw_w);
        fn(p + "prelu2.slopes", blk.prelu2);
        fn(p + "gln2.gamma", blk.gln2_gamma);
        fn(p + "gln2.beta", blk.gln2_beta);
        fn(p + "conv_out.weight", blk.conv_out_w);
    }
    fn("mask.weight", model.mask_w);
    fn("decoder.weight", model.decoder_w);
}

template <typename T, typename Fn>
void for_each_param(Model<T>& model, Fn&& fn) {
    for_each_param_impl<T>(model, std::forward<Fn>(fn));
}

template <typename T, typename Fn>
void for_each_param(const Model<T>& model, Fn&& fn) {
    for_each_param_impl<T>(model, std::forward<Fn>(fn));
}

namespace detail {

// Kaiming-uniform over fan_in = receptive inputs per output element.
template <typename T>
void kaiming_uniform(Tensor<T>& w, std::int64_t fan_in, Rng& rng) {
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
    for (auto& v : w.data) v = static_cast<T>(rng.uniform(-bound, bound));
}

}  // namespace detail

template <typename T>
Model<T> build_model(const ModelConfig& config, std::uint64_t init_seed) {
    config.validate();
    Model<T> m;
    m.config = config;

    const std::int64_t n = config.n_enc, b = config.n_bottleneck, h = config.n_conv;
    const std::int64_t l = config.kernel_len, p = config.p_kernel;
    const std::int64_t cin = config.in_channels, cout = config.out_channels;

    m.encoder_w = Tensor<T>::zeros({n, cin, l});
    m.bottleneck_w = Tensor<T>::zeros({b, n, 1});
    m.blocks.resize(static_cast<std::size_t>(config.x_blocks) * config.repeats);
    for (std::size_t i = 0; i < m.blocks.size(); ++i) {
        auto& blk = m.blocks[i];
        blk.dilation = 1 << (i % static_cast<std::size_t>(config.x_blocks));
        blk.conv_in_w = Tensor<T>::zeros({h, b, 1});
        blk.prelu1 = Tensor<T>::zeros({h});
        blk.gln1_gamma = Tensor<T>::zeros({h});
        blk.gln1_beta = Tensor<T>::zeros({h});
        blk.dw_w = Tensor<T>::zeros({h, 1, p});
        blk.prelu2 = Tensor<T>::zeros({h});
        blk.gln2_gamma = Tensor<T>::zeros({h});
        blk.gln2_beta = Tensor<T>::zeros({h});
        blk.conv_out_w = Tensor<T>::zeros({b, h, 1});
    }
    m.mask_w = Tensor<T>::zeros({cout * n, b, 1});
    m.decoder_w = Tensor<T>::zeros({n, 1, l});

    // One child stream per tensor: the draw for a given tensor depends only on
    // the seed and its position in the enumeration.
    std::uint64_t index = 0;
    for_each_param(m, [&](const std::string& name, Tensor<T>& w) {
        Rng rng = Rng::child(init_seed, index++);
        if (name.find("prelu") != std::string::npos) {
            for (auto& v : w.data) v = static_cast<T>(0.25);
        } else if (name.find("gamma") != std::string::npos) {
            for (auto& v : w.data) v = static_cast<T>(1);
        } else if (name.find("beta") != std::string::npos) {
            for (auto& v : w.data) v = static_cast<T>(0);
        } else if (name == "decoder.weight") {
            detail::kaiming_uniform(w, w.shape[0] * w.shape[2], rng);  // [Cin, Cout, K]
        } else {
            detail::kaiming_uniform(w, w.shape[1] * w.shape[2], rng);  // [Cout, Cin/g, K]
        }
    });
    return m;
}

// Intermediates stashed by the forward pass for reverse mode.
template <typename T>
struct ModelTape {
    std::int64_t input_len = 0;   // pre-padding length
    Tensor<T> input_padded;       // [in_channels, T_pad]
    Tensor<T> latent;             // encoder output [n_enc, T']
    Tensor<T> bottleneck_out;     // [B, T']
    struct BlockTape {
        Tensor<T> input;          // [B, T']
        Tensor<T> conv_in_out;    // [H, T']
        Tensor<T> prelu1_out;
        GlnStash<T> gln1;
        Tensor<T> gln1_out;
        Tensor<T> dw_out;
        Tensor<T> prelu2_out;
        GlnStash<T> gln2;
        Tensor<T> gln2_out;
    };
    std::vector<BlockTape> blocks;
    Tensor<T> stack_out;          // [B, T'] final residual-stack output
    Tensor<T> mask_logits;        // [out*n_enc, T']
    Tensor<T> masks;              // tanh(mask_logits)
    std::vector<Tensor<T>> masked_latents;  // out_channels tensors [n_enc, T']
};

// Gradients mirror the parameter layout.
template <typename T>
Model<T> zeros_like(const Model<T>& model) {
    Model<T> g;
    g.config = model.config;
    g.encoder_w = Tensor<T>::zeros(model.encoder_w.shape);
    g.bottleneck_w = Tensor<T>::zeros(model.bottleneck_w.shape);
    g.blocks.resize(model.blocks.size());
    for (std::size_t i = 0; i < model.blocks.size(); ++i) {
        const auto& src = model.blocks[i];
        auto& dst = g.blocks[i];
        dst.dilation = src.dilation;
        dst.conv_in_w = Tensor<T>::zeros(src.conv_in_w.shape);
        dst.prelu1 = Tensor<T>::zeros(src.prelu1.shape);
        dst.gln1_gamma = Tensor<T>::zeros(src.gln1_gamma.shape);
        dst.gln1_beta = Tensor<T>::zeros(src.gln1_beta.shape);
        dst.dw_w = Tensor<T>::zeros(src.dw_w.shape);
        dst.prelu2 = Tensor<T>::zeros(src.prelu2.shape);
        dst.gln2_gamma = Tensor<T>::zeros(src.gln2_gamma.shape);
        dst.gln2_beta = Tensor<T>::zeros(src.gln2_beta.shape);
        dst.conv_out_w = Tensor<T>::zeros(src.conv_out_w.shape);
    }
    g.mask_w = Tensor<T>::zeros(model.mask_w.shape);
    g.decoder_w = Tensor<T>::zeros(model.decoder_w.shape);
    return g;
}

// Forward pass over a [in_channels, T] tensor.  Output is [out_channels, T]
// (trimmed back to the input length).  Pass a tape to enable model_backward.
template <typename T>
Tensor<T> model_forward(const Model<T>& model, const Tensor<T>& input, ModelTape<T>* tape,
                        int threads = 1) {
    const auto& cfg = model.config;
    if (input.shape.size() != 2 || input.shape[0] != cfg.in_channels) {
        throw std::invalid_argument("model_forward: want [in_channels, T] input");
    }
    const std::int64_t t_in = input.shape[1];
    if (t_in < cfg.kernel_len) {
        throw std::invalid_argument("model_forward: input shorter than the encoder kernel");
    }

    // Right-pad with zeros so the hop tiles the signal exactly; the decoder
    // then reproduces T_pad samples and the head trims back to t_in.
    const std::int64_t hop = cfg.enc_stride;
    const std::int64_t span = t_in - cfg.kernel_len;
    const std::int64_t t_pad = cfg.kernel_len + ((span + hop - 1) / hop) * hop;
    Tensor<T> padded = Tensor<T>::zeros({cfg.in_channels, t_pad});
    for (std::int64_t c = 0; c < cfg.in_channels; ++c) {
        for (std::int64_t t = 0; t < t_in; ++t) {
            padded.data[static_cast<std::size_t>(c * t_pad + t)] =
                input.data[static_cast<std::size_t>(c * t_in + t)];
        }
    }

    ConvGeometry enc_geom;
    enc_geom.stride = static_cast<int>(hop);
    Tensor<T> latent = conv1d_forward(padded, model.encoder_w, enc_geom, threads);

    ConvGeometry one;
    Tensor<T> x = conv1d_forward(latent, model.bottleneck_w, one, threads);

    if (tape) {
        tape->input_len = t_in;
        tape->input_padded = padded;
        tape->latent = latent;
        tape->bottleneck_out = x;
        tape->blocks.clear();
        tape->blocks.reserve(model.blocks.size());
    }

    for (const auto& blk : model.blocks) {
        typename ModelTape<T>::BlockTape bt;
        bt.input = x;
        bt.conv_in_out = conv1d_forward(x, blk.conv_in_w, one, threads);
        bt.prelu1_out = prelu_forward(bt.conv_in_out, blk.prelu1);
        bt.gln1_out = gln_forward(bt.prelu1_out, blk.gln1_gamma, blk.gln1_beta, bt.gln1);

        ConvGeometry dw;
        dw.dilation = blk.dilation;
        dw.groups = static_cast<int>(cfg.n_conv);
        dw.pad_left = blk.dilation * (cfg.p_kernel - 1) / 2;
        dw.pad_right = dw.pad_left;
        bt.dw_out = conv1d_forward(bt.gln1_out, blk.dw_w, dw, threads);
        bt.prelu2_out = prelu_forward(bt.dw_out, blk.prelu2);
        bt.gln2_out = gln_forward(bt.prelu2_out, blk.gln2_gamma, blk.gln2_beta, bt.gln2);
        Tensor<T> branch = conv1d_forward(bt.gln2_out, blk.conv_out_w, one, threads);

        for (std::size_t i = 0; i < x.data.size(); ++i) branch.data[i] += x.data[i];
        x = std::move(branch);
        if (tape) tape->blocks.push_back(std::move(bt));
    }

    Tensor<T> logits = conv1d_forward(x, model.mask_w, one, threads);
    Tensor<T> masks = tanh_forward(logits);

    const std::int64_t t_lat = latent.shape[1];
    const std::int64_t n = cfg.n_enc;
    Tensor<T> output = Tensor<T>::zeros({cfg.out_channels, t_in});
    if (tape) {
        tape->stack_out = x;
        tape->mask_logits = logits;
        tape->masks = masks;
        tape->masked_latents.assign(static_cast<std::size_t>(cfg.out_channels), Tensor<T>());
    }

    for (std::int64_t k = 0; k < cfg.out_channels; ++k) {
        Tensor<T> masked = Tensor<T>::zeros({n, t_lat});
        const T* mrow = masks.data.data() + k * n * t_lat;
        if (cfg.direct_generation) {
            for (std::size_t i = 0; i < masked.data.size(); ++i) masked.data[i] = mrow[i];
        } else {
            const T* lat = latent.data.data();
            for (std::size_t i = 0; i < masked.data.size(); ++i) masked.data[i] = mrow[i] * lat[i];
        }
        Tensor<T> rendered = conv_transpose1d_forward(masked, model.decoder_w,
                                                      static_cast<int>(hop), threads);
        for (std::int64_t t = 0; t < t_in; ++t) {
            output.data[static_cast<std::size_t>(k * t_in + t)] =
                rendered.data[static_cast<std::size_t>(t)];
        }
        if (tape) tape->masked_latents[static_cast<std::size_t>(k)] = std::move(masked);
    }
    return output;
}

// Reverse pass; accumulates parameter gradients into `grads` (zeroed first).
template <typename T>
void model_backward(const Model<T>& model, const ModelTape<T>& tape, const Tensor<T>& grad_out,
                    Model<T>& grads, int threads = 1) {
    const auto& cfg = model.config;
    const std::int64_t t_in = tape.input_len;
    const std::int64_t t_pad = tape.input_padded.shape[1];
    const std::int64_t t_lat = tape.latent.shape[1];
    const std::int64_t n = cfg.n_enc;
    const int hop = cfg.enc_stride;
    if (grad_out.shape.size() != 2 || grad_out.shape[0] != cfg.out_channels ||
        grad_out.shape[1] != t_in) {
        throw std::invalid_argument("model_backward: grad shape mismatch");
    }

    grads = zeros_like(model);
    ConvGeometry one;

    // Decoder and masking.
    Tensor<T> grad_latent = Tensor<T>::zeros({n, t_lat});
    Tensor<T> grad_masks = Tensor<T>::zeros(tape.masks.shape);
    for (std::int64_t k = 0; k < cfg.out_channels; ++k) {
        Tensor<T> grad_rendered = Tensor<T>::zeros({1, t_pad});
        for (std::int64_t t = 0; t < t_in; ++t) {
            grad_rendered.data[static_cast<std::size_t>(t)] =
                grad_out.data[static_cast<std::size_t>(k * t_in + t)];
        }
        Tensor<T> grad_masked, grad_dec_w;
        conv_transpose1d_backward(tape.masked_latents[static_cast<std::size_t>(k)],
                                  model.decoder_w, grad_rendered, hop, grad_masked, grad_dec_w,
                                  threads);
        for (std::size_t i = 0; i < grad_dec_w.data.size(); ++i) {
            grads.decoder_w.data[i] += grad_dec_w.data[i];
        }
        T* gm = grad_masks.data.data() + k * n * t_lat;
        if (cfg.direct_generation) {
            for (std::size_t i = 0; i < grad_masked.data.size(); ++i) gm[i] = grad_masked.data[i];
        } else {
            const T* mrow = tape.masks.data.data() + k * n * t_lat;
            const T* lat = tape.latent.data.data();
            for (std::size_t i = 0; i < grad_masked.data.size(); ++i) {
                gm[i] = grad_masked.data[i] * lat[i];
                grad_latent.data[i] += grad_masked.data[i] * mrow[i];
            }
        }
    }

    Tensor<T> grad_logits = tanh_backward(tape.masks, grad_masks);
    Tensor<T> grad_stack;
    conv1d_backward(tape.stack_out, model.mask_w, grad_logits, one, grad_stack, grads.mask_w,
                    threads);

    // Residual block stack, reversed.
    Tensor<T> grad_x = std::move(grad_stack);
    for (std::size_t bi = model.blocks.size(); bi-- > 0;) {
        const auto& blk = model.blocks[bi];
        auto& gblk = grads.blocks[bi];
        const auto& bt = tape.blocks[bi];

        // branch output gradient equals grad_x; residual passthrough adds it at the end
        Tensor<T> grad_gln2_out;
        conv1d_backward(bt.gln2_out, blk.conv_out_w, grad_x, one, grad_gln2_out, gblk.conv_out_w,
                        threads);
        Tensor<T> grad_prelu2_out, grad_gln2_gamma, grad_gln2_beta;
        gln_backward(bt.prelu2_out, blk.gln2_gamma, bt.gln2, grad_gln2_out, grad_prelu2_out,
                     grad_gln2_gamma, grad_gln2_beta);
        for (std::size_t i = 0; i < grad_gln2_gamma.data.size(); ++i) {
            gblk.gln2_gamma.data[i] += grad_gln2_gamma.data[i];
            gblk.gln2_beta.data[i] += grad_gln2_beta.data[i];
        }
        Tensor<T> grad_dw_out;
        prelu_backward(bt.dw_out, blk.prelu2, grad_prelu2_out, grad_dw_out, gblk.prelu2);

        ConvGeometry dw;
        dw.dilation = blk.dilation;
        dw.groups = static_cast<int>(cfg.n_conv);
        dw.pad_left = blk.dilation * (cfg.p_kernel - 1) / 2;
        dw.pad_right = dw.pad_left;
        Tensor<T> grad_gln1_out;
        conv1d_backward(bt.gln1_out, blk.dw_w, grad_dw_out, dw, grad_gln1_out, gblk.dw_w, threads);

        Tensor<T> grad_prelu1_out, grad_gln1_gamma, grad_gln1_beta;
        gln_backward(bt.prelu1_out, blk.gln1_gamma, bt.gln1, grad_gln1_out, grad_prelu1_out,
                     grad_gln1_gamma, grad_gln1_beta);
        for (std::size_t i = 0; i < grad_gln1_gamma.data.size(); ++i) {
            gblk.gln1_gamma.data[i] += grad_gln1_gamma.data[i];
            gblk.gln1_beta.data[i] += grad_gln1_beta.data[i];
        }
        Tensor<T> grad_conv_in_out;
        prelu_backward(bt.conv_in_out, blk.prelu1, grad_prelu1_out, grad_conv_in_out, gblk.prelu1);

        Tensor<T> grad_block_in;
        conv1d_backward(bt.input, blk.conv_in_w, grad_conv_in_out, one, grad_block_in,
                        gblk.conv_in_w, threads);

        for (std::size_t i = 0; i < grad_x.data.size(); ++i) {
            grad_x.data[i] += grad_block_in.data[i];
        }
    }

    Tensor<T> grad_latent_from_bn;
    conv1d_backward(tape.latent, model.bottleneck_w, grad_x, one, grad_latent_from_bn,
                    grads.bottleneck_w, threads);
    for (std::size_t i = 0; i < grad_latent.data.size(); ++i) {
        grad_latent.data[i] += grad_latent_from_bn.data[i];
    }

    ConvGeometry enc_geom;
    enc_geom.stride = hop;
    Tensor<T> grad_input_unused;
    conv1d_backward(tape.input_padded, model.encoder_w, grad_latent, enc_geom, grad_input_unused,
                    grads.encoder_w, threads);
}

// AmbisonicSignal front end used by the CLI and the evaluation harness.
AmbisonicSignal upscale(const Model<float>& model, const AmbisonicSignal& foa, int threads = 1);

}  // namespace ambiup
