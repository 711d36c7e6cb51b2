#pragma once

#include <filesystem>
#include <vector>

namespace ambiup {

// De-interleaved audio buffer.  Readers convert the stored sample format to
// double; the writer always emits 32-bit IEEE float.
struct WavData {
    double sample_rate = 48000.0;
    std::vector<std::vector<double>> channels;

    std::size_t frames() const { return channels.empty() ? 0 : channels[0].size(); }
};

// Reads a RIFF/WAVE file.  Accepts 16-bit PCM and 32-bit float, plus the
// WAVE_FORMAT_EXTENSIBLE wrappings of both.  Throws FormatError on anything
// structurally wrong (bad magic, truncated chunk, unsupported codec).
WavData read_wav(const std::filesystem::path& path);

// Writes 32-bit float WAVE.  Channel count is channels.size(); all channels
// must share one length.  Round-trips through read_wav bit-exactly.
void write_wav(const std::filesystem::path& path, const WavData& data);

// Sidecar JSON naming the ambisonic channel convention of a just-written
// file.  Stored next to the audio as <path>.ambix.json.
void write_ambix_sidecar(const std::filesystem::path& wav_path, int order, double sample_rate);

}  // namespace ambiup
