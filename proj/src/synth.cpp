#include "ambiup/synth.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

#include "ambiup/fft.hpp"
#include "ambiup/rng.hpp"

namespace ambiup {

namespace {

constexpr double kTargetRms = 0.1;  // -20 dBFS

std::size_t sample_count(double duration_s, double sample_rate) {
    if (duration_s <= 0.0 || sample_rate <= 0.0) {
        throw std::invalid_argument("synth: duration and sample rate must be positive");
    }
    const double n = std::round(duration_s * sample_rate);
    if (n < 1.0) throw std::invalid_argument("synth: duration shorter than one sample");
    return static_cast<std::size_t>(n);
}

void normalize_rms(std::vector<double>& x) {
    const double r = rms(x);
    if (r <= 0.0) return;
    const double g = kTargetRms / r;
    for (auto& v : x) v *= g;
}

}  // namespace

double rms(const std::vector<double>& x) {
    if (x.empty()) return 0.0;
    double acc = 0.0;
    for (double v : x) acc += v * v;
    return std::sqrt(acc / static_cast<double>(x.size()));
}

std::vector<double> pink_noise(double duration_s, double sample_rate, std::uint64_t seed) {
    const std::size_t n = sample_count(duration_s, sample_rate);
    const std::size_t nfft = next_pow2(n);

    Rng rng = Rng::child(seed, 0x70696e6bULL);  // "pink"
    std::vector<std::complex<double>> spectrum(nfft, {0.0, 0.0});
    // Hermitian half-spectrum with amplitude 1/sqrt(k); DC stays zero.
    for (std::size_t k = 1; k <= nfft / 2; ++k) {
        const double amp = 1.0 / std::sqrt(static_cast<double>(k));
        const double re = rng.normal() * amp;
        const double im = (k == nfft / 2) ? 0.0 : rng.normal() * amp;
        spectrum[k] = {re, im};
        if (k != nfft / 2) spectrum[nfft - k] = {re, -im};
    }
    fft_inplace(spectrum, true);

    std::vector<double> out(n);
    for (std::size_t t = 0; t < n; ++t) out[t] = spectrum[t].real();
    normalize_rms(out);
    return out;
}

std::vector<double> tone_complex(double duration_s, double sample_rate, std::uint64_t seed) {
    const std::size_t n = sample_count(duration_s, sample_rate);
    Rng rng = Rng::child(seed, 0x746f6e65ULL);  // "tone"

    const double f0 = rng.uniform(110.0, 880.0);
    const int partials = static_cast<int>(rng.uniform_int(3, 6));
    std::vector<double> out(n, 0.0);
    for (int h = 1; h <= partials; ++h) {
        const double f = f0 * h;
        if (f >= 0.45 * sample_rate) break;
        const double phase = rng.uniform(0.0, 2.0 * M_PI);
        const double amp = 1.0 / h;
        const double w = 2.0 * M_PI * f / sample_rate;
        for (std::size_t t = 0; t < n; ++t) {
            out[t] += amp * std::sin(w * static_cast<double>(t) + phase);
        }
    }
    normalize_rms(out);
    return out;
}

std::vector<double> am_noise(double duration_s, double sample_rate, std::uint64_t seed) {
    const std::size_t n = sample_count(duration_s, sample_rate);
    Rng rng = Rng::child(seed, 0x616d6e7aULL);  // "amnz"

    const double mod_hz = rng.uniform(1.0, 6.0);
    const double mod_phase = rng.uniform(0.0, 2.0 * M_PI);
    std::vector<double> out(n);
    for (std::size_t t = 0; t < n; ++t) {
        const double env =
            0.5 * (1.0 - std::cos(2.0 * M_PI * mod_hz * static_cast<double>(t) / sample_rate +
                                  mod_phase));
        out[t] = env * rng.normal();
    }
    normalize_rms(out);
    return out;
}

}  // namespace ambiup
