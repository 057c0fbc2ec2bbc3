#include "polyes/audio_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <optional>
#include <string>

#include "polyes/error.hpp"

namespace polyes {

namespace {

constexpr std::uint16_t kFormatPcm = 1;

std::uint16_t load_u16(const std::uint8_t* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t load_u32(const std::uint8_t* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void store_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xff));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void store_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int shift = 0; shift < 32; shift += 8) {
        out.push_back(static_cast<std::uint8_t>((v >> shift) & 0xff));
    }
}

void store_tag(std::vector<std::uint8_t>& out, const char (&tag)[5]) {
    out.insert(out.end(), tag, tag + 4);
}

bool tag_is(const std::uint8_t* p, const char* tag) {
    return std::memcmp(p, tag, 4) == 0;
}

struct FmtChunk {
    std::uint16_t format = 0;
    std::uint16_t channels = 0;
    std::uint32_t sample_rate = 0;
    std::uint16_t bits = 0;
};

}  // namespace

std::int16_t pcm16_code(double sample) {
    return static_cast<std::int16_t>(std::clamp(std::round(sample * 32768.0), -32768.0, 32767.0));
}

AudioBuffer decode_wav(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 12 || !tag_is(bytes.data(), "RIFF") || !tag_is(bytes.data() + 8, "WAVE")) {
        throw Error(Errc::MalformedWav, "missing RIFF/WAVE header");
    }

    std::optional<FmtChunk> fmt;
    std::optional<std::span<const std::uint8_t>> data;

    std::size_t pos = 12;
    while (pos + 8 <= bytes.size()) {
        const std::uint8_t* header = bytes.data() + pos;
        const std::uint32_t size = load_u32(header + 4);
        const std::size_t body = pos + 8;
        if (size > bytes.size() - body) {
            throw Error(Errc::MalformedWav, "chunk runs past end of file");
        }
        if (tag_is(header, "fmt ")) {
            if (size < 16) {
                throw Error(Errc::MalformedWav, "fmt chunk too short");
            }
            const std::uint8_t* f = bytes.data() + body;
            fmt = FmtChunk{load_u16(f), load_u16(f + 2), load_u32(f + 4), load_u16(f + 14)};
        } else if (tag_is(header, "data")) {
            data = bytes.subspan(body, size);
        }
        // Chunks are word aligned.
        pos = body + size + (size & 1u);
    }

    if (!fmt) {
        throw Error(Errc::MalformedWav, "no fmt chunk");
    }
    if (!data) {
        throw Error(Errc::MalformedWav, "no data chunk");
    }
    if (fmt->format != kFormatPcm) {
        throw Error(Errc::UnsupportedFormat, "format tag " + std::to_string(fmt->format) + " is not integer PCM");
    }
    if (fmt->bits != 16) {
        throw Error(Errc::UnsupportedFormat, std::to_string(fmt->bits) + "-bit samples");
    }
    if (fmt->channels != 1) {
        throw Error(Errc::UnsupportedFormat, std::to_string(fmt->channels) + " channels");
    }
    if (fmt->sample_rate == 0) {
        throw Error(Errc::MalformedWav, "zero sample rate");
    }
    if (data->size() % 2 != 0) {
        throw Error(Errc::MalformedWav, "data chunk holds a partial sample");
    }

    AudioBuffer buffer;
    buffer.sample_rate = static_cast<int>(fmt->sample_rate);
    buffer.samples.resize(data->size() / 2);
    for (std::size_t i = 0; i < buffer.samples.size(); ++i) {
        const auto raw = static_cast<std::int16_t>(load_u16(data->data() + 2 * i));
        buffer.samples[i] = raw / 32768.0;
    }
    return buffer;
}

std::vector<std::uint8_t> encode_wav(const AudioBuffer& buffer) {
    if (buffer.samples.empty()) {
        throw Error(Errc::EmptySignal, "cannot write an empty buffer");
    }
    if (buffer.sample_rate <= 0) {
        throw Error(Errc::InvalidSpec, "sample rate must be positive");
    }
    const auto data_bytes = static_cast<std::uint32_t>(buffer.samples.size() * 2);
    const auto rate = static_cast<std::uint32_t>(buffer.sample_rate);

    std::vector<std::uint8_t> out;
    out.reserve(44 + data_bytes);
    store_tag(out, "RIFF");
    store_u32(out, 36 + data_bytes);
    store_tag(out, "WAVE");

    store_tag(out, "fmt ");
    store_u32(out, 16);
    store_u16(out, kFormatPcm);
    store_u16(out, 1);         // channels
    store_u32(out, rate);
    store_u32(out, rate * 2);  // byte rate
    store_u16(out, 2);         // block align
    store_u16(out, 16);

    store_tag(out, "data");
    store_u32(out, data_bytes);
    for (double s : buffer.samples) {
        store_u16(out, static_cast<std::uint16_t>(pcm16_code(s)));
    }
    return out;
}

void quantize_pcm16(std::span<double> samples) {
    for (double& s : samples) {
        s = pcm16_code(s) / 32768.0;
    }
}

AudioBuffer read_wav(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(Errc::IoError, "cannot open " + path.string());
    }
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) {
        throw Error(Errc::IoError, "read failed for " + path.string());
    }
    return decode_wav(bytes);
}

void write_wav(const AudioBuffer& buffer, const std::filesystem::path& path) {
    const auto bytes = encode_wav(buffer);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(Errc::IoError, "cannot open " + path.string() + " for writing");
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw Error(Errc::IoError, "write failed for " + path.string());
    }
}

}  // namespace polyes
