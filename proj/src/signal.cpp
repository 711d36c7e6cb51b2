#include "ambiup/signal.hpp"

#include <stdexcept>

#include "ambiup/sh.hpp"

namespace ambiup {

void AmbisonicSignal::validate() const {
    if (channels.size() != static_cast<std::size_t>(sh_channel_count(order))) {
        throw std::invalid_argument("AmbisonicSignal: channel count does not match order");
    }
    for (const auto& ch : channels) {
        if (ch.size() != channels[0].size()) {
            throw std::invalid_argument("AmbisonicSignal: ragged channel lengths");
        }
    }
    if (sample_rate <= 0.0) {
        throw std::invalid_argument("AmbisonicSignal: sample rate must be positive");
    }
}

AmbisonicSignal encode_point_source(std::span<const double> mono, const Direction& direction,
                                    int order, double gain, double sample_rate) {
    const int channels = sh_channel_count(order);
    ShVector sh = real_sh(order, direction);

    AmbisonicSignal out;
    out.order = order;
    out.sample_rate = sample_rate;
    out.channels.resize(static_cast<std::size_t>(channels));
    for (int c = 0; c < channels; ++c) {
        const double w = gain * sh.coeffs[static_cast<std::size_t>(c)];
        auto& ch = out.channels[static_cast<std::size_t>(c)];
        ch.resize(mono.size());
        for (std::size_t t = 0; t < mono.size(); ++t) ch[t] = w * mono[t];
    }
    return out;
}

std::vector<std::vector<double>> decode(const AmbisonicSignal& signal, const DecoderMatrix& decoder) {
    signal.validate();
    if (decoder.cols != signal.channels.size()) {
        throw std::invalid_argument("decode: decoder columns do not match signal channels");
    }
    const std::size_t frames = signal.frames();
    std::vector<std::vector<double>> feeds(decoder.rows, std::vector<double>(frames, 0.0));
    for (std::size_t p = 0; p < decoder.rows; ++p) {
        const double* row = decoder.row(p);
        auto& feed = feeds[p];
        for (std::size_t c = 0; c < decoder.cols; ++c) {
            const double w = row[c];
            if (w == 0.0) continue;
            const auto& ch = signal.channels[c];
            for (std::size_t t = 0; t < frames; ++t) feed[t] += w * ch[t];
        }
    }
    return feeds;
}

AmbisonicSignal rescale_order(const AmbisonicSignal& signal, int new_order) {
    signal.validate();
    const std::size_t new_channels = static_cast<std::size_t>(sh_channel_count(new_order));
    AmbisonicSignal out;
    out.order = new_order;
    out.sample_rate = signal.sample_rate;
    out.channels.resize(new_channels);
    for (std::size_t c = 0; c < new_channels; ++c) {
        if (c < signal.channels.size()) {
            out.channels[c] = signal.channels[c];
        } else {
            out.channels[c].assign(signal.frames(), 0.0);
        }
    }
    return out;
}

}  // namespace ambiup
