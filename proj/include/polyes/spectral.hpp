#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "polyes/audio_io.hpp"

namespace polyes {

/// Slicing and analysis band. At the defaults one slice is ~92.9 ms and the
/// band [27.5 Hz, Nyquist] maps to bins 3..2048.
struct SpectralConfig {
    std::size_t window_size = 4096;
    int sample_rate = 44100;
    double f_min = 27.5;
    double f_max = 22050.0;

    void validate() const;
    std::size_t bin_count() const { return window_size / 2 + 1; }
    std::size_t first_bin() const;
    std::size_t last_bin() const;
    double slice_seconds() const { return static_cast<double>(window_size) / sample_rate; }
};

/// Magnitude spectra of consecutive non-overlapping slices, stored row-major.
/// Each row holds all window_size/2 + 1 one-sided bins; the analysis band is
/// carried alongside rather than cropped so bin k always means k * fs / N.
class Spectrogram {
public:
    Spectrogram() = default;
    Spectrogram(std::size_t frames, std::size_t bins, double bin_width, std::size_t first_bin, std::size_t last_bin);

    std::size_t frame_count() const { return frames_; }
    std::size_t bin_count() const { return bins_; }
    std::size_t first_bin() const { return first_bin_; }
    std::size_t last_bin() const { return last_bin_; }
    std::size_t band_size() const { return last_bin_ - first_bin_ + 1; }
    double bin_frequency(std::size_t k) const { return static_cast<double>(k) * bin_width_; }
    std::vector<double> bin_frequencies() const;

    std::span<const double> frame(std::size_t t) const { return {data_.data() + t * bins_, bins_}; }
    std::span<double> frame(std::size_t t) { return {data_.data() + t * bins_, bins_}; }
    std::span<const double> band(std::size_t t) const { return frame(t).subspan(first_bin_, band_size()); }

private:
    std::size_t frames_ = 0;
    std::size_t bins_ = 0;
    double bin_width_ = 0.0;
    std::size_t first_bin_ = 0;
    std::size_t last_bin_ = 0;
    std::vector<double> data_;
};

/// Symmetric Hann window, 0.5 * (1 - cos(2 pi n / (N - 1))).
std::vector<double> hann_window(std::size_t size);

/// One-sided DFT magnitudes (N/2 + 1 values) of frame * window.
std::vector<double> fft_magnitude(std::span<const double> frame, std::span<const double> window);

/// Same, with the Hann window of matching length.
std::vector<double> fft_magnitude(std::span<const double> frame);

Spectrogram spectrogram(const AudioBuffer& buffer, const SpectralConfig& config);

}  // namespace polyes
