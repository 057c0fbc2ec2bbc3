#include "polyes/segmentation.hpp"

#include <algorithm>
#include <cmath>

#include "polyes/error.hpp"

namespace polyes {

std::vector<double> detect_onsets(const AudioBuffer& buffer, const SpectralConfig& config, double threshold_factor) {
    if (!(threshold_factor > 0.0)) {
        throw Error(Errc::InvalidConfig, "onset threshold factor must be positive");
    }
    std::vector<double> onsets{0.0};
    if (buffer.samples.empty()) {
        return onsets;
    }
    const Spectrogram spec = spectrogram(buffer, config);
    std::size_t frames = spec.frame_count();
    if (buffer.samples.size() % config.window_size != 0) {
        --frames;
    }
    if (frames < 2) {
        return onsets;
    }

    // flux[t] compares slice t with slice t - 1; flux[0] is unused.
    // level[t] is the in-band magnitude of the louder of the two slices; flux
    // below kMinRelativeFlux of it is beating or leakage, not a new chord.
    std::vector<double> flux(frames, 0.0);
    std::vector<double> level(frames, 0.0);
    for (std::size_t t = 1; t < frames; ++t) {
        const auto cur = spec.band(t);
        const auto prev = spec.band(t - 1);
        double sum = 0.0;
        double louder = 0.0;
        for (std::size_t k = 0; k < cur.size(); ++k) {
            sum += std::max(0.0, cur[k] - prev[k]);
            louder += std::max(cur[k], prev[k]);
        }
        flux[t] = sum;
        level[t] = louder;
    }

    std::vector<double> sorted(flux.begin() + 1, flux.end());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t mid = sorted.size() / 2;
    const double median = sorted.size() % 2 == 1 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
    const double threshold = threshold_factor * median;
    auto above = [&](std::size_t t) { return flux[t] > threshold && flux[t] > kMinRelativeFlux * level[t]; };

    std::size_t t = 1;
    while (t < frames) {
        if (!above(t)) {
            ++t;
            continue;
        }
        std::size_t peak = t;
        while (t < frames && above(t)) {
            if (flux[t] > flux[peak]) peak = t;
            ++t;
        }
        onsets.push_back(static_cast<double>(peak) * config.slice_seconds());
    }
    return onsets;
}

std::vector<Segment> segment(const AudioBuffer& buffer, const std::vector<double>& boundaries) {
    if (buffer.samples.empty()) {
        throw Error(Errc::EmptySignal, "cannot segment an empty buffer");
    }
    if (boundaries.empty() || boundaries.front() != 0.0) {
        throw Error(Errc::InvalidBoundaries, "boundaries must start at 0");
    }
    const double total = buffer.duration_seconds();
    std::vector<std::size_t> cuts;
    for (std::size_t i = 0; i < boundaries.size(); ++i) {
        const double b = boundaries[i];
        if (!std::isfinite(b) || b >= total) {
            throw Error(Errc::InvalidBoundaries, "boundary " + std::to_string(b) + " outside the signal");
        }
        if (i > 0 && !(b > boundaries[i - 1])) {
            throw Error(Errc::InvalidBoundaries, "boundaries must be strictly increasing");
        }
        const auto cut = static_cast<std::size_t>(std::llround(b * buffer.sample_rate));
        if (i > 0 && cut <= cuts.back()) {
            throw Error(Errc::InvalidBoundaries, "boundaries closer than one sample");
        }
        cuts.push_back(cut);
    }
    cuts.push_back(buffer.samples.size());

    std::vector<Segment> segments;
    segments.reserve(boundaries.size());
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        Segment seg;
        seg.samples.sample_rate = buffer.sample_rate;
        seg.samples.samples.assign(buffer.samples.begin() + static_cast<std::ptrdiff_t>(cuts[i]),
                                   buffer.samples.begin() + static_cast<std::ptrdiff_t>(cuts[i + 1]));
        seg.start = static_cast<double>(cuts[i]) / buffer.sample_rate;
        seg.duration = seg.samples.duration_seconds();
        segments.push_back(std::move(seg));
    }
    return segments;
}

std::vector<double> snap_to_grid(const std::vector<double>& boundaries, double grid) {
    if (!(grid > 0.0)) {
        throw Error(Errc::InvalidConfig, "grid must be positive");
    }
    std::vector<double> out;
    for (double b : boundaries) {
        const double snapped = std::round(b / grid) * grid;
        if (out.empty() || snapped != out.back()) {
            out.push_back(snapped);
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace polyes
