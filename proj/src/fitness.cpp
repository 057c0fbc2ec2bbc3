#include "polyes/fitness.hpp"

#include <algorithm>

#include "polyes/error.hpp"

namespace polyes {

FitnessContext make_fitness_context(const AudioBuffer& segment, const SpectralConfig& spectral,
                                    const SynthParams& synth, double epsilon) {
    if (!(epsilon > 0.0)) {
        throw Error(Errc::InvalidConfig, "magnitude floor must be positive");
    }
    FitnessContext ctx;
    ctx.target = spectrogram(segment, spectral);
    ctx.spectral = spectral;
    ctx.synth = synth;
    ctx.segment_duration = segment.duration_seconds();
    ctx.epsilon = epsilon;
    return ctx;
}

double spectral_cost(const Spectrogram& candidate, const Spectrogram& target, double epsilon) {
    if (candidate.frame_count() != target.frame_count() || candidate.bin_count() != target.bin_count() ||
        candidate.first_bin() != target.first_bin() || candidate.last_bin() != target.last_bin()) {
        throw Error(Errc::ShapeMismatch, "candidate and target spectrograms differ in shape");
    }
    double cost = 0.0;
    for (std::size_t t = 0; t < target.frame_count(); ++t) {
        const auto x = candidate.band(t);
        const auto o = target.band(t);
        for (std::size_t k = 0; k < o.size(); ++k) {
            const double xf = std::max(x[k], epsilon);
            const double of = std::max(o[k], epsilon);
            cost += xf < of ? of / xf : xf / of;
        }
    }
    return cost;
}

double chromosome_cost(std::span<const double> genes, const FitnessContext& ctx) {
    const ChordSpec chord{{genes.begin(), genes.end()}, ctx.segment_duration};
    AudioBuffer rendered = synthesize_chord(chord, ctx.synth, ctx.spectral.sample_rate);
    if (ctx.quantize_candidates) {
        quantize_pcm16(rendered.samples);
    }
    return spectral_cost(spectrogram(rendered, ctx.spectral), ctx.target, ctx.epsilon);
}

double identity_cost(const FitnessContext& ctx) {
    return static_cast<double>(ctx.target.frame_count() * ctx.target.band_size());
}

}  // namespace polyes
