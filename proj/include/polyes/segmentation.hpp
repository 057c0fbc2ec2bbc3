#pragma once

#include <vector>

#include "polyes/audio_io.hpp"
#include "polyes/spectral.hpp"

namespace polyes {

/// A contiguous slice of the target; its length is the duration of the
/// chord sounding in it.
struct Segment {
    double start = 0.0;     // seconds
    double duration = 0.0;  // seconds
    AudioBuffer samples;
};

inline constexpr double kDefaultOnsetThreshold = 3.0;
inline constexpr double kMinRelativeFlux = 0.1;

/// Half-wave-rectified spectral flux between consecutive analysis slices,
/// thresholded at threshold_factor times the median flux and at
/// kMinRelativeFlux of the in-band magnitude of the louder slice. Runs of adjacent
/// slices above threshold count once, at their strongest slice. A trailing
/// zero-padded slice is never reported: its truncation alone raises the flux.
/// The result always starts with 0 and is strictly increasing.
std::vector<double> detect_onsets(const AudioBuffer& buffer, const SpectralConfig& config,
                                  double threshold_factor = kDefaultOnsetThreshold);

/// Partition at the given boundary times (seconds, strictly increasing,
/// first = 0, all before the end). Boundaries are converted to sample
/// indices by rounding.
std::vector<Segment> segment(const AudioBuffer& buffer, const std::vector<double>& boundaries);

/// Moves each boundary to the nearest multiple of grid and drops duplicates.
std::vector<double> snap_to_grid(const std::vector<double>& boundaries, double grid);

}  // namespace polyes
