#pragma once

#include <span>
#include <vector>

#include "ambiup/decoder.hpp"
#include "ambiup/direction.hpp"

namespace ambiup {

// Multichannel ambisonic buffer, ACN order / SN3D normalization.  Samples are
// kept in double precision internally; file and network boundaries convert to
// float32.
struct AmbisonicSignal {
    int order = 0;
    double sample_rate = 48000.0;
    std::vector<std::vector<double>> channels;  // (order+1)^2 rows

    std::size_t frames() const { return channels.empty() ? 0 : channels[0].size(); }
    void validate() const;  // channel count and equal lengths
};

// Encodes a mono signal arriving from `direction`: channel c = gain * Y_c * mono.
// Channel 0 equals gain * mono exactly (SN3D, Y_0 == 1).
AmbisonicSignal encode_point_source(std::span<const double> mono, const Direction& direction,
                                    int order, double gain = 1.0, double sample_rate = 48000.0);

// Applies the decode matrix per sample: feeds[p] = sum_c D[p][c] * channels[c].
// Decoder and signal channel counts must match.
std::vector<std::vector<double>> decode(const AmbisonicSignal& signal, const DecoderMatrix& decoder);

// Truncates or extends (zero-pad) a higher/lower order signal.  Upward
// extension fills new channels with zeros; downward keeps the leading block.
AmbisonicSignal rescale_order(const AmbisonicSignal& signal, int new_order);

}  // namespace ambiup
