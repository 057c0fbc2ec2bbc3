#include "polyes/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <sstream>
#include <string>

#include "polyes/error.hpp"

namespace polyes {

namespace {

// Partials are generated by rotating a unit phasor; the phase is recomputed
// exactly at this interval so rounding drift stays bounded.
constexpr std::size_t kResyncInterval = 1024;

void validate(const ChordSpec& spec, const SynthParams& params, int sample_rate) {
    if (!(spec.duration > 0.0) || !std::isfinite(spec.duration)) {
        throw Error(Errc::InvalidSpec, "chord duration must be positive");
    }
    for (double p : spec.pitches) {
        if (!(p >= kLowestPitch && p <= kHighestPitch)) {
            throw Error(Errc::InvalidSpec, "pitch " + std::to_string(p) + " outside [21, 108]");
        }
    }
    if (params.harmonic_count < 1) {
        throw Error(Errc::InvalidSpec, "harmonic_count must be at least 1");
    }
    if (!(params.master_gain > 0.0 && params.master_gain <= 1.0)) {
        throw Error(Errc::InvalidSpec, "master_gain must lie in (0, 1]");
    }
    if (sample_rate <= 0) {
        throw Error(Errc::InvalidSpec, "sample rate must be positive");
    }
}

struct Partial {
    double step = 0.0;
    double amplitude = 0.0;
};

// Every partial is a unit phasor advanced by complex multiplication; the
// state lives in flat arrays so the per-sample loop over partials vectorizes.
void render_partials(std::vector<double>& out, std::span<const Partial> partials) {
    const std::size_t count = partials.size();
    std::vector<double> rot_re(count), rot_im(count), amp(count), re(count), im(count);
    for (std::size_t p = 0; p < count; ++p) {
        rot_re[p] = std::cos(partials[p].step);
        rot_im[p] = std::sin(partials[p].step);
        amp[p] = partials[p].amplitude;
    }
    double* dst = out.data();
    double* pre = re.data();
    double* pim = im.data();
    const double* prr = rot_re.data();
    const double* pri = rot_im.data();
    const double* pamp = amp.data();
    const std::size_t total = out.size();
    for (std::size_t start = 0; start < total; start += kResyncInterval) {
        for (std::size_t p = 0; p < count; ++p) {
            const double phase = partials[p].step * static_cast<double>(start);
            pre[p] = std::cos(phase);
            pim[p] = std::sin(phase);
        }
        const std::size_t stop = std::min(total, start + kResyncInterval);
        for (std::size_t n = start; n < stop; ++n) {
            double acc = 0.0;
            for (std::size_t p = 0; p < count; ++p) {
                acc += pamp[p] * pim[p];
                const double next_re = pre[p] * prr[p] - pim[p] * pri[p];
                pim[p] = pre[p] * pri[p] + pim[p] * prr[p];
                pre[p] = next_re;
            }
            dst[n] = acc;
        }
    }
}

}  // namespace

double pitch_to_frequency(double pitch) {
    return 6.875 * std::exp2((3.0 + pitch) / 12.0);
}

AudioBuffer synthesize_chord(const ChordSpec& spec, const SynthParams& params, int sample_rate) {
    validate(spec, params, sample_rate);

    AudioBuffer buffer;
    buffer.sample_rate = sample_rate;
    buffer.samples.assign(static_cast<std::size_t>(std::llround(spec.duration * sample_rate)), 0.0);

    std::vector<double> pitches = spec.pitches;
    std::sort(pitches.begin(), pitches.end());

    const double nyquist = sample_rate / 2.0;
    std::vector<Partial> partials;
    for (double pitch : pitches) {
        const double f0 = pitch_to_frequency(pitch);
        for (int k = 1; k <= params.harmonic_count && k * f0 <= nyquist; ++k) {
            partials.push_back({2.0 * std::numbers::pi * k * f0 / sample_rate, 1.0 / k});
        }
    }
    if (!partials.empty()) {
        render_partials(buffer.samples, partials);
    }

    double peak = 0.0;
    for (double s : buffer.samples) {
        peak = std::max(peak, std::abs(s));
    }
    if (peak > 0.0) {
        const double scale = params.master_gain / peak;
        for (double& s : buffer.samples) {
            s = std::clamp(s * scale, -1.0, 1.0);
        }
    }
    return buffer;
}

AudioBuffer synthesize_sequence(std::span<const ChordSpec> specs, const SynthParams& params, int sample_rate) {
    AudioBuffer out;
    out.sample_rate = sample_rate;
    for (const auto& spec : specs) {
        const AudioBuffer chord = synthesize_chord(spec, params, sample_rate);
        out.samples.insert(out.samples.end(), chord.samples.begin(), chord.samples.end());
    }
    return out;
}

std::vector<ChordSpec> parse_chord_specs(std::istream& in) {
    std::vector<ChordSpec> specs;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') {
            continue;
        }
        std::istringstream fields(line);
        ChordSpec spec;
        if (!(fields >> spec.duration)) {
            throw Error(Errc::InvalidSpec, "line " + std::to_string(line_no) + ": expected a duration");
        }
        std::string token;
        while (fields >> token) {
            std::size_t used = 0;
            double pitch = 0.0;
            try {
                pitch = std::stod(token, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != token.size()) {
                throw Error(Errc::InvalidSpec, "line " + std::to_string(line_no) + ": bad pitch '" + token + "'");
            }
            spec.pitches.push_back(pitch);
        }
        specs.push_back(std::move(spec));
    }
    return specs;
}

std::vector<ChordSpec> read_chord_spec_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(Errc::IoError, "cannot open " + path.string());
    }
    return parse_chord_specs(in);
}

}  // namespace polyes
