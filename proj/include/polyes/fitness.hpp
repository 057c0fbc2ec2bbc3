#pragma once

#include <span>

#include "polyes/audio_io.hpp"
#include "polyes/spectral.hpp"
#include "polyes/synthesis.hpp"

namespace polyes {

inline constexpr double kDefaultMagnitudeFloor = 1e-9;

/// Everything needed to score candidates against one target segment.
/// Immutable once built; share freely between threads.
struct FitnessContext {
    Spectrogram target;
    SpectralConfig spectral;
    SynthParams synth;
    double segment_duration = 0.0;
    double epsilon = kDefaultMagnitudeFloor;
    // Round candidates to 16-bit sample values before analysis, as happens to
    // a target that was read from a 16-bit WAV file.
    bool quantize_candidates = false;
};

FitnessContext make_fitness_context(const AudioBuffer& segment, const SpectralConfig& spectral,
                                    const SynthParams& synth, double epsilon = kDefaultMagnitudeFloor);

/// Sum over frames and in-band bins of max(X', O') / min(X', O'), with both
/// magnitudes floored at epsilon. Every term is >= 1.
double spectral_cost(const Spectrogram& candidate, const Spectrogram& target, double epsilon);

/// Renders genes as one chord of the segment's length and scores it.
double chromosome_cost(std::span<const double> genes, const FitnessContext& ctx);

/// Smallest achievable cost for ctx: frames * in-band bins.
double identity_cost(const FitnessContext& ctx);

}  // namespace polyes
