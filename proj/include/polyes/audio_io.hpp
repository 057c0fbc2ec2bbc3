#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace polyes {

/// Mono signal, samples nominally in [-1, 1].
struct AudioBuffer {
    std::vector<double> samples;
    int sample_rate = 44100;

    double duration_seconds() const {
        return static_cast<double>(samples.size()) / sample_rate;
    }
};

// 16-bit mono PCM only. Reading divides by 32768; writing multiplies by the
// same factor, rounds and clamps to [-32768, 32767], so 1.0 is stored as
// 32767 and a round trip is exact to within 1/32768.
AudioBuffer decode_wav(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_wav(const AudioBuffer& buffer);

AudioBuffer read_wav(const std::filesystem::path& path);
void write_wav(const AudioBuffer& buffer, const std::filesystem::path& path);

// The stored code for one sample, and the in-place equivalent of a write/read
// round trip.
std::int16_t pcm16_code(double sample);
void quantize_pcm16(std::span<double> samples);

}  // namespace polyes
