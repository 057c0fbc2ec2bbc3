#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "polyes/audio_io.hpp"
#include "polyes/es.hpp"
#include "polyes/fitness.hpp"
#include "polyes/segmentation.hpp"
#include "polyes/spectral.hpp"
#include "polyes/synthesis.hpp"

namespace polyes {

/// A chord in the transcription. Pitches are sorted and distinct.
struct NoteEvent {
    std::vector<int> pitches;
    double start = 0.0;
    double duration = 0.0;
};

/// Everything that determines a transcription result apart from the input.
struct TranscriptionConfig {
    EsConfig es;
    SpectralConfig spectral;
    SynthParams synth;
    std::size_t notes_per_chord = 3;
    double epsilon = kDefaultMagnitudeFloor;
    // Set when the target was read from 16-bit PCM; see FitnessContext.
    bool quantize_candidates = false;
};

struct SegmentResult {
    double start = 0.0;
    double duration = 0.0;
    std::uint64_t seed = 0;
    std::vector<double> raw_genes;
    // Gene order, duplicates kept.
    std::vector<int> rounded_pitches;
    double best_cost = 0.0;
    double best_sigma = 0.0;
    double runtime_seconds = 0.0;
    EvolutionTrace trace;

    std::size_t generations_run() const { return trace.generations_run(); }
};

struct TranscriptionResult {
    TranscriptionConfig config;
    std::vector<NoteEvent> events;
    std::vector<SegmentResult> segments;
    double total_runtime = 0.0;
};

struct TranscribeOptions {
    // Explicit segment starts in seconds; unset runs onset detection.
    std::optional<std::vector<double>> boundaries;
    double onset_threshold = kDefaultOnsetThreshold;
    std::optional<double> snap_grid;
    std::size_t jobs = 1;
};

/// Half-up rounding to the nearest MIDI number, clamped to [lower, upper].
std::vector<int> round_genes(std::span<const double> genes, double lower = kLowestPitch,
                             double upper = kHighestPitch);

/// Seed for segment `index`, independent of how many segments follow.
std::uint64_t segment_seed(std::uint64_t seed, std::size_t index);

/// Boundaries the transcriber would use for buffer under options.
std::vector<double> resolve_boundaries(const AudioBuffer& buffer, const SpectralConfig& spectral,
                                       const TranscribeOptions& options);

/// Runs one evolution per segment on a pool of options.jobs workers and
/// assembles the results in segment order.
TranscriptionResult transcribe(const AudioBuffer& buffer, const TranscriptionConfig& config,
                               const TranscribeOptions& options = {});

}  // namespace polyes
