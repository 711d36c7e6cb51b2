#include "ambiup/wav.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "ambiup/errors.hpp"

static_assert(std::endian::native == std::endian::little, "wav i/o assumes a little-endian host");

namespace ambiup {

namespace {

constexpr std::uint16_t kFormatPcm = 0x0001;
constexpr std::uint16_t kFormatFloat = 0x0003;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

struct FmtInfo {
    std::uint16_t format = 0;
    std::uint16_t channels = 0;
    std::uint32_t sample_rate = 0;
    std::uint16_t bits = 0;
};

template <typename T>
T read_le(std::istream& in, const char* what) {
    T value;
    if (!in.read(reinterpret_cast<char*>(&value), sizeof(T))) {
        throw FormatError(std::string("wav: truncated ") + what);
    }
    return value;
}

float int16_to_float(std::int16_t v) { return static_cast<float>(v) / 32768.0f; }

}  // namespace

WavData read_wav(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("wav: cannot open " + path.string());

    char riff[4], wave[4];
    if (!in.read(riff, 4)) throw FormatError("wav: truncated header");
    read_le<std::uint32_t>(in, "riff size");
    if (!in.read(wave, 4)) throw FormatError("wav: truncated header");
    if (std::memcmp(riff, "RIFF", 4) != 0 || std::memcmp(wave, "WAVE", 4) != 0) {
        throw FormatError("wav: not a RIFF/WAVE file: " + path.string());
    }

    FmtInfo fmt;
    bool have_fmt = false;
    std::vector<char> payload;

    while (true) {
        char id[4];
        if (!in.read(id, 4)) break;  // clean EOF between chunks
        const auto size = read_le<std::uint32_t>(in, "chunk size");
        if (std::memcmp(id, "fmt ", 4) == 0) {
            if (size < 16) throw FormatError("wav: fmt chunk too small");
            std::vector<char> raw(size);
            if (!in.read(raw.data(), size)) throw FormatError("wav: truncated fmt chunk");
            std::memcpy(&fmt.format, raw.data() + 0, 2);
            std::memcpy(&fmt.channels, raw.data() + 2, 2);
            std::memcpy(&fmt.sample_rate, raw.data() + 4, 4);
            std::memcpy(&fmt.bits, raw.data() + 14, 2);
            if (fmt.format == kFormatExtensible) {
                if (size < 40) throw FormatError("wav: extensible fmt chunk too small");
                std::memcpy(&fmt.format, raw.data() + 24, 2);  // first two GUID bytes
            }
            have_fmt = true;
        } else if (std::memcmp(id, "data", 4) == 0) {
            payload.resize(size);
            if (!in.read(payload.data(), size)) throw FormatError("wav: truncated data chunk");
            break;
        } else {
            in.seekg(size + (size & 1), std::ios::cur);
            if (!in) throw FormatError("wav: truncated chunk body");
        }
    }

    if (!have_fmt) throw FormatError("wav: missing fmt chunk in " + path.string());
    if (payload.empty() && fmt.channels == 0) throw FormatError("wav: missing data chunk");
    if (fmt.channels == 0) throw FormatError("wav: zero channels");
    if (fmt.sample_rate == 0) throw FormatError("wav: zero sample rate");

    const std::size_t bytes_per_sample = fmt.bits / 8;
    const bool pcm16 = fmt.format == kFormatPcm && fmt.bits == 16;
    const bool float32 = fmt.format == kFormatFloat && fmt.bits == 32;
    if (!pcm16 && !float32) {
        throw FormatError("wav: unsupported sample format (want 16-bit PCM or 32-bit float)");
    }
    const std::size_t frame_bytes = bytes_per_sample * fmt.channels;
    if (frame_bytes == 0 || payload.size() % frame_bytes != 0) {
        throw FormatError("wav: data size is not a whole number of frames");
    }
    const std::size_t frames = payload.size() / frame_bytes;

    WavData out;
    out.sample_rate = static_cast<double>(fmt.sample_rate);
    out.channels.assign(fmt.channels, std::vector<double>(frames));
    const char* cursor = payload.data();
    for (std::size_t t = 0; t < frames; ++t) {
        for (std::size_t c = 0; c < fmt.channels; ++c) {
            if (pcm16) {
                std::int16_t v;
                std::memcpy(&v, cursor, 2);
                out.channels[c][t] = int16_to_float(v);
            } else {
                float v;
                std::memcpy(&v, cursor, 4);
                out.channels[c][t] = v;
            }
            cursor += bytes_per_sample;
        }
    }
    return out;
}

void write_wav(const std::filesystem::path& path, const WavData& data) {
    if (data.channels.empty()) throw std::invalid_argument("wav: no channels to write");
    const std::size_t frames = data.frames();
    for (const auto& ch : data.channels) {
        if (ch.size() != frames) throw std::invalid_argument("wav: ragged channel lengths");
    }
    if (data.sample_rate <= 0.0) throw std::invalid_argument("wav: bad sample rate");

    const std::uint16_t channels = static_cast<std::uint16_t>(data.channels.size());
    const std::uint32_t rate = static_cast<std::uint32_t>(data.sample_rate);
    const std::uint32_t block_align = channels * 4u;
    const std::uint32_t data_bytes = static_cast<std::uint32_t>(frames * block_align);
    const std::uint32_t fact_frames = static_cast<std::uint32_t>(frames);
    // RIFF body: WAVE + fmt(8+16) + fact(8+4) + data(8+n)
    const std::uint32_t riff_size = 4 + 24 + 12 + 8 + data_bytes;

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("wav: cannot create " + path.string());

    auto put16 = [&out](std::uint16_t v) { out.write(reinterpret_cast<const char*>(&v), 2); };
    auto put32 = [&out](std::uint32_t v) { out.write(reinterpret_cast<const char*>(&v), 4); };

    out.write("RIFF", 4);
    put32(riff_size);
    out.write("WAVE", 4);

    out.write("fmt ", 4);
    put32(16);
    put16(kFormatFloat);
    put16(channels);
    put32(rate);
    put32(rate * block_align);  // byte rate
    put16(static_cast<std::uint16_t>(block_align));
    put16(32);

    out.write("fact", 4);
    put32(4);
    put32(fact_frames);

    out.write("data", 4);
    put32(data_bytes);
    for (std::size_t t = 0; t < frames; ++t) {
        for (std::size_t c = 0; c < channels; ++c) {
            const float v = static_cast<float>(data.channels[c][t]);
            out.write(reinterpret_cast<const char*>(&v), 4);
        }
    }
    if (!out) throw IoError("wav: write failed for " + path.string());
}

void write_ambix_sidecar(const std::filesystem::path& wav_path, int order, double sample_rate) {
    nlohmann::json tag = {
        {"channel_order", "ACN"},
        {"normalization", "SN3D"},
        {"order", order},
        {"sample_rate", sample_rate},
    };
    std::filesystem::path side = wav_path;
    side += ".ambix.json";
    std::ofstream out(side, std::ios::trunc);
    if (!out) throw IoError("sidecar: cannot create " + side.string());
    out << tag.dump(2) << "\n";
}

}  // namespace ambiup
