#include "ambiup/model.hpp"

#include <stdexcept>

namespace ambiup {

void ModelConfig::validate() const {
    if (n_enc < 1 || n_bottleneck < 1 || n_conv < 1) {
        throw std::invalid_argument("config: channel counts must be positive");
    }
    if (kernel_len < 2) throw std::invalid_argument("config: kernel_len must be >= 2");
    if (enc_stride < 1 || enc_stride > kernel_len) {
        throw std::invalid_argument("config: enc_stride must be in [1, kernel_len]");
    }
    if (p_kernel < 1 || p_kernel % 2 == 0) {
        throw std::invalid_argument("config: p_kernel must be odd (symmetric same-padding)");
    }
    if (x_blocks < 1) throw std::invalid_argument("config: x_blocks must be >= 1");
    if (repeats < 1) throw std::invalid_argument("config: repeats must be >= 1");
    if (in_channels != 4 || out_channels != 16) {
        throw std::invalid_argument("config: pipeline is fixed to 4 input / 16 output channels");
    }
    if (sample_rate <= 0.0) throw std::invalid_argument("config: sample_rate must be positive");
}

std::int64_t parameter_count(const ModelConfig& config) {
    config.validate();
    const std::int64_t n = config.n_enc, b = config.n_bottleneck, h = config.n_conv;
    const std::int64_t l = config.kernel_len, p = config.p_kernel;
    const std::int64_t blocks = static_cast<std::int64_t>(config.x_blocks) * config.repeats;
    const std::int64_t per_block = h * b      // 1x1 in
                                   + h        // prelu1
                                   + 2 * h    // gln1 affine
                                   + h * p    // depthwise
                                   + h        // prelu2
                                   + 2 * h    // gln2 affine
                                   + b * h;   // 1x1 out
    return config.in_channels * n * l         // encoder
           + b * n                            // bottleneck
           + blocks * per_block
           + config.out_channels * n * b      // mask head
           + n * l;                           // decoder
}

nlohmann::json ModelConfig::to_json() const {
    return {
        {"n_enc", n_enc},
        {"kernel_len", kernel_len},
        {"enc_stride", enc_stride},
        {"n_bottleneck", n_bottleneck},
        {"n_conv", n_conv},
        {"p_kernel", p_kernel},
        {"x_blocks", x_blocks},
        {"repeats", repeats},
        {"in_channels", in_channels},
        {"out_channels", out_channels},
        {"direct_generation", direct_generation},
        {"sample_rate", sample_rate},
    };
}

ModelConfig ModelConfig::from_json(const nlohmann::json& doc) {
    ModelConfig cfg;
    cfg.sample_rate = doc.value("sample_rate", cfg.sample_rate);
    // kernel defaults track the rate (1 ms window); stride defaults to half
    cfg.kernel_len = static_cast<int>(std::llround(cfg.sample_rate / 1000.0));
    if (cfg.kernel_len < 2) cfg.kernel_len = 2;
    cfg.n_enc = doc.value("n_enc", cfg.n_enc);
    cfg.kernel_len = doc.value("kernel_len", cfg.kernel_len);
    cfg.enc_stride = doc.value("enc_stride", cfg.kernel_len / 2 > 0 ? cfg.kernel_len / 2 : 1);
    cfg.n_bottleneck = doc.value("n_bottleneck", cfg.n_bottleneck);
    cfg.n_conv = doc.value("n_conv", cfg.n_conv);
    cfg.p_kernel = doc.value("p_kernel", cfg.p_kernel);
    cfg.x_blocks = doc.value("x_blocks", cfg.x_blocks);
    cfg.repeats = doc.value("repeats", cfg.repeats);
    cfg.in_channels = doc.value("in_channels", cfg.in_channels);
    cfg.out_channels = doc.value("out_channels", cfg.out_channels);
    cfg.direct_generation = doc.value("direct_generation", cfg.direct_generation);
    cfg.validate();
    return cfg;
}

AmbisonicSignal upscale(const Model<float>& model, const AmbisonicSignal& foa, int threads) {
    foa.validate();
    if (foa.order != 1) throw std::invalid_argument("upscale: input must be first order (4 ch)");
    if (foa.sample_rate != model.config.sample_rate) {
        throw std::invalid_argument("upscale: signal rate does not match the model's rate");
    }
    const std::size_t frames = foa.frames();
    if (frames < static_cast<std::size_t>(model.config.kernel_len)) {
        throw std::invalid_argument("upscale: input shorter than the encoder kernel");
    }

    Tensor<float> input = Tensor<float>::zeros({4, static_cast<std::int64_t>(frames)});
    for (std::size_t c = 0; c < 4; ++c) {
        for (std::size_t t = 0; t < frames; ++t) {
            input.data[c * frames + t] = static_cast<float>(foa.channels[c][t]);
        }
    }
    const Tensor<float> out = model_forward<float>(model, input, nullptr, threads);

    AmbisonicSignal hoa;
    hoa.order = 3;
    hoa.sample_rate = foa.sample_rate;
    hoa.channels.assign(16, std::vector<double>(frames));
    for (std::size_t c = 0; c < 16; ++c) {
        for (std::size_t t = 0; t < frames; ++t) {
            hoa.channels[c][t] = static_cast<double>(out.data[c * frames + t]);
        }
    }
    return hoa;
}

}  // namespace ambiup
