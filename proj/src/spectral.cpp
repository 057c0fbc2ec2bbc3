#include "polyes/spectral.hpp"

#include <fftw3.h>

#include <bit>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include "polyes/error.hpp"

namespace polyes {

namespace {

// FFTW's planner is not reentrant; executing an existing plan is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

// Real-to-complex plan with its own aligned buffers. FFTW_ESTIMATE keeps the
// chosen algorithm, and therefore the output bits, identical across runs.
class RealFft {
public:
    explicit RealFft(std::size_t n) : n_(n) {
        std::lock_guard lock(planner_mutex());
        in_ = fftw_alloc_real(n);
        out_ = fftw_alloc_complex(n / 2 + 1);
        plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), in_, out_, FFTW_ESTIMATE);
    }
    ~RealFft() {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(plan_);
        fftw_free(in_);
        fftw_free(out_);
    }
    RealFft(const RealFft&) = delete;
    RealFft& operator=(const RealFft&) = delete;

    void magnitudes(std::span<const double> frame, std::span<const double> window, std::span<double> out) {
        for (std::size_t i = 0; i < n_; ++i) {
            in_[i] = frame[i] * window[i];
        }
        fftw_execute(plan_);
        for (std::size_t k = 0; k <= n_ / 2; ++k) {
            out[k] = std::sqrt(out_[k][0] * out_[k][0] + out_[k][1] * out_[k][1]);
        }
    }

private:
    std::size_t n_;
    double* in_ = nullptr;
    fftw_complex* out_ = nullptr;
    fftw_plan plan_ = nullptr;
};

RealFft& fft_for(std::size_t n) {
    thread_local std::map<std::size_t, std::unique_ptr<RealFft>> cache;
    auto& slot = cache[n];
    if (!slot) {
        slot = std::make_unique<RealFft>(n);
    }
    return *slot;
}

const std::vector<double>& cached_hann(std::size_t n) {
    thread_local std::map<std::size_t, std::vector<double>> cache;
    auto it = cache.find(n);
    if (it == cache.end()) {
        it = cache.emplace(n, hann_window(n)).first;
    }
    return it->second;
}

}  // namespace

void SpectralConfig::validate() const {
    if (window_size < 2 || !std::has_single_bit(window_size)) {
        throw Error(Errc::InvalidConfig, "window size must be a power of two >= 2");
    }
    if (sample_rate <= 0) {
        throw Error(Errc::InvalidConfig, "sample rate must be positive");
    }
    if (!(f_min > 0.0 && f_min < f_max && f_max <= sample_rate / 2.0)) {
        throw Error(Errc::InvalidConfig, "band must satisfy 0 < f_min < f_max <= Nyquist");
    }
}

std::size_t SpectralConfig::first_bin() const {
    return static_cast<std::size_t>(std::ceil(f_min * static_cast<double>(window_size) / sample_rate));
}

std::size_t SpectralConfig::last_bin() const {
    const auto k = static_cast<std::size_t>(std::floor(f_max * static_cast<double>(window_size) / sample_rate));
    return std::min(k, window_size / 2);
}

Spectrogram::Spectrogram(std::size_t frames, std::size_t bins, double bin_width, std::size_t first_bin,
                         std::size_t last_bin)
    : frames_(frames), bins_(bins), bin_width_(bin_width), first_bin_(first_bin), last_bin_(last_bin),
      data_(frames * bins, 0.0) {}

std::vector<double> Spectrogram::bin_frequencies() const {
    std::vector<double> f(bins_);
    for (std::size_t k = 0; k < bins_; ++k) {
        f[k] = bin_frequency(k);
    }
    return f;
}

std::vector<double> hann_window(std::size_t size) {
    if (size < 2) {
        throw Error(Errc::InvalidSize, "Hann window needs at least 2 points");
    }
    std::vector<double> w(size);
    const double denom = static_cast<double>(size - 1);
    for (std::size_t n = 0; n < size; ++n) {
        w[n] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(n) / denom));
    }
    return w;
}

std::vector<double> fft_magnitude(std::span<const double> frame, std::span<const double> window) {
    if (frame.size() != window.size()) {
        throw Error(Errc::LengthMismatch, "frame and window lengths differ");
    }
    if (frame.size() < 2) {
        throw Error(Errc::LengthMismatch, "frame needs at least 2 samples");
    }
    std::vector<double> out(frame.size() / 2 + 1);
    fft_for(frame.size()).magnitudes(frame, window, out);
    return out;
}

std::vector<double> fft_magnitude(std::span<const double> frame) {
    if (frame.size() < 2) {
        throw Error(Errc::LengthMismatch, "frame needs at least 2 samples");
    }
    return fft_magnitude(frame, cached_hann(frame.size()));
}

Spectrogram spectrogram(const AudioBuffer& buffer, const SpectralConfig& config) {
    config.validate();
    if (buffer.sample_rate != config.sample_rate) {
        throw Error(Errc::ConfigMismatch, "buffer sample rate " + std::to_string(buffer.sample_rate) +
                                              " differs from analysis rate " + std::to_string(config.sample_rate));
    }
    if (buffer.samples.empty()) {
        throw Error(Errc::EmptySignal, "cannot analyse an empty buffer");
    }

    const std::size_t n = config.window_size;
    const std::size_t frames = (buffer.samples.size() + n - 1) / n;
    Spectrogram spec(frames, config.bin_count(), static_cast<double>(config.sample_rate) / n, config.first_bin(),
                     config.last_bin());

    RealFft& fft = fft_for(n);
    const auto& window = cached_hann(n);
    std::vector<double> padded(n, 0.0);
    const std::span<const double> samples(buffer.samples);

    for (std::size_t t = 0; t < frames; ++t) {
        const std::size_t begin = t * n;
        const std::size_t len = std::min(n, samples.size() - begin);
        std::span<const double> slice = samples.subspan(begin, len);
        if (len < n) {
            std::fill(padded.begin(), padded.end(), 0.0);
            std::copy(slice.begin(), slice.end(), padded.begin());
            slice = padded;
        }
        fft.magnitudes(slice, window, spec.frame(t));
    }
    return spec;
}

}  // namespace polyes
