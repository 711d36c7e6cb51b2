#pragma once

#include <cstdint>
#include <vector>

namespace ambiup {

// Deterministic test-signal generators.  All are seeded, sample-rate aware,
// and normalized to -20 dBFS RMS (0.1) so scene gains stay in a sane range.

// Pink noise via spectral synthesis: complex Gaussian bins shaped 1/sqrt(f),
// which gives the -3 dB/octave power slope.
std::vector<double> pink_noise(double duration_s, double sample_rate, std::uint64_t seed);

// Small harmonic complex with randomized fundamental and phases.
std::vector<double> tone_complex(double duration_s, double sample_rate, std::uint64_t seed);

// White-noise bursts under a randomized raised-cosine amplitude envelope.
std::vector<double> am_noise(double duration_s, double sample_rate, std::uint64_t seed);

double rms(const std::vector<double>& x);

}  // namespace ambiup
