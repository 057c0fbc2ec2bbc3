#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "polyes/audio_io.hpp"

namespace polyes {

inline constexpr double kLowestPitch = 21.0;
inline constexpr double kHighestPitch = 108.0;

/// Notes sounding together for a common duration. Pitches are real-valued
/// MIDI numbers so ES candidates can be rendered without rounding.
struct ChordSpec {
    std::vector<double> pitches;
    double duration = 0.0;  // seconds
};

/// Additive synthesizer settings. Partial k of a note has amplitude 1/k.
/// The same parameters must render targets and candidates.
struct SynthParams {
    int harmonic_count = 4;
    double master_gain = 0.9;
};

/// MIDI pitch to Hz: 6.875 * 2^((3 + pitch) / 12), so 69 -> 440 Hz.
double pitch_to_frequency(double pitch);

/// Renders round(duration * sample_rate) samples of constant-amplitude
/// harmonic tones, peak-normalized to master_gain. Partials above Nyquist
/// are skipped. Notes are summed in ascending pitch order so the output does
/// not depend on the order the pitches were listed in.
AudioBuffer synthesize_chord(const ChordSpec& spec, const SynthParams& params, int sample_rate);

/// Concatenation of per-chord renders; each chord starts at phase zero.
AudioBuffer synthesize_sequence(std::span<const ChordSpec> specs, const SynthParams& params, int sample_rate);

// Chord-spec text: one chord per line, "duration pitch pitch ...";
// blank lines and lines starting with '#' are ignored.
std::vector<ChordSpec> parse_chord_specs(std::istream& in);
std::vector<ChordSpec> read_chord_spec_file(const std::filesystem::path& path);

}  // namespace polyes
