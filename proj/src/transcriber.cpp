#include "polyes/transcriber.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <thread>

#include "polyes/error.hpp"

namespace polyes {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// splitmix64 finalizer.
std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

SegmentResult run_segment(const Segment& seg, const TranscriptionConfig& config, std::uint64_t seed,
                          std::size_t eval_threads) {
    const auto t0 = Clock::now();
    FitnessContext ctx = make_fitness_context(seg.samples, config.spectral, config.synth, config.epsilon);
    ctx.quantize_candidates = config.quantize_candidates;

    EsConfig es = config.es;
    es.seed = seed;
    Rng rng(seed);
    auto evolved = evolve(
        es, config.notes_per_chord, [&ctx](std::span<const double> genes) { return chromosome_cost(genes, ctx); },
        rng, eval_threads);

    SegmentResult out;
    out.start = seg.start;
    out.duration = seg.duration;
    out.seed = seed;
    out.raw_genes = evolved.best.genes;
    out.rounded_pitches = round_genes(out.raw_genes, es.lower_bound, es.upper_bound);
    out.best_cost = *evolved.best.fitness;
    out.best_sigma = evolved.best.sigma;
    out.trace = std::move(evolved.trace);
    out.runtime_seconds = seconds_since(t0);
    return out;
}

}  // namespace

std::vector<int> round_genes(std::span<const double> genes, double lower, double upper) {
    std::vector<int> out;
    out.reserve(genes.size());
    for (double g : genes) {
        out.push_back(static_cast<int>(std::clamp(std::floor(g + 0.5), lower, upper)));
    }
    return out;
}

std::uint64_t segment_seed(std::uint64_t seed, std::size_t index) {
    return seed ^ mix(static_cast<std::uint64_t>(index));
}

std::vector<double> resolve_boundaries(const AudioBuffer& buffer, const SpectralConfig& spectral,
                                       const TranscribeOptions& options) {
    std::vector<double> bounds =
        options.boundaries ? *options.boundaries : detect_onsets(buffer, spectral, options.onset_threshold);
    if (options.snap_grid) {
        bounds = snap_to_grid(bounds, *options.snap_grid);
        const double total = buffer.duration_seconds();
        std::erase_if(bounds, [total](double b) { return b >= total; });
    }
    return bounds;
}

TranscriptionResult transcribe(const AudioBuffer& buffer, const TranscriptionConfig& config,
                               const TranscribeOptions& options) {
    const auto t0 = Clock::now();
    if (buffer.samples.empty()) {
        throw Error(Errc::EmptySignal, "nothing to transcribe");
    }
    if (config.notes_per_chord < 1) {
        throw Error(Errc::InvalidConfig, "notes_per_chord must be at least 1");
    }
    if (options.jobs < 1) {
        throw Error(Errc::InvalidConfig, "jobs must be at least 1");
    }
    config.es.validate();
    config.spectral.validate();
    if (config.es.lower_bound < kLowestPitch || config.es.upper_bound > kHighestPitch) {
        throw Error(Errc::InvalidConfig, "search bounds must lie within [21, 108]");
    }

    const auto segments = segment(buffer, resolve_boundaries(buffer, config.spectral, options));

    TranscriptionResult result;
    result.config = config;
    result.segments.resize(segments.size());

    const std::size_t workers = std::min(options.jobs, segments.size());
    const std::size_t eval_threads = std::max<std::size_t>(1, options.jobs / workers);
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(workers);
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t i = next++; i < segments.size(); i = next++) {
                        result.segments[i] =
                            run_segment(segments[i], config, segment_seed(config.es.seed, i), eval_threads);
                    }
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    for (const auto& seg : result.segments) {
        NoteEvent event;
        event.pitches = seg.rounded_pitches;
        std::sort(event.pitches.begin(), event.pitches.end());
        event.pitches.erase(std::unique(event.pitches.begin(), event.pitches.end()), event.pitches.end());
        event.start = seg.start;
        event.duration = seg.duration;
        result.events.push_back(std::move(event));
    }
    result.total_runtime = seconds_since(t0);
    return result;
}

}  // namespace polyes
