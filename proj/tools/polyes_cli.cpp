// polyes: synthesize chord targets, transcribe WAV files, and run the
// exhaustive fitness oracle.
//
// Exit codes: 0 success, 1 usage error, 2 input format error, 3 internal failure.

#include <cstdio>
#include <iomanip>
#include <iostream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "polyes/audio_io.hpp"
#include "polyes/error.hpp"
#include "polyes/midi.hpp"
#include "polyes/oracle.hpp"
#include "polyes/report.hpp"
#include "polyes/synthesis.hpp"
#include "polyes/transcriber.hpp"

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kInputFormat = 2, kInternal = 3 };

int exit_code_for(polyes::Errc code) {
    using polyes::Errc;
    switch (code) {
    case Errc::InvalidConfig:
    case Errc::InvalidBoundaries:
    case Errc::InsufficientOffspring:
        return kUsage;
    case Errc::MalformedWav:
    case Errc::UnsupportedFormat:
    case Errc::InvalidSpec:
    case Errc::MalformedReport:
    case Errc::EmptySignal:
    case Errc::IoError:
    case Errc::ConfigMismatch:
        return kInputFormat;
    default:
        return kInternal;
    }
}

// "a:b" -> (a, b)
template <typename T>
std::pair<T, T> parse_range(const std::string& text, const char* what) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) {
        throw polyes::Error(polyes::Errc::InvalidConfig, std::string(what) + " must look like low:high");
    }
    try {
        if constexpr (std::is_integral_v<T>) {
            return {static_cast<T>(std::stol(text.substr(0, colon))), static_cast<T>(std::stol(text.substr(colon + 1)))};
        } else {
            return {static_cast<T>(std::stod(text.substr(0, colon))), static_cast<T>(std::stod(text.substr(colon + 1)))};
        }
    } catch (const std::exception&) {
        throw polyes::Error(polyes::Errc::InvalidConfig, std::string("cannot parse ") + what + " '" + text + "'");
    }
}

struct SynthArgs {
    std::string spec;
    std::string out;
    int harmonics = polyes::SynthParams{}.harmonic_count;
    int sample_rate = 44100;
    double gain = polyes::SynthParams{}.master_gain;
};

int run_synth(const SynthArgs& a) {
    const auto chords = polyes::read_chord_spec_file(a.spec);
    if (chords.empty()) {
        throw polyes::Error(polyes::Errc::InvalidSpec, a.spec + " contains no chords");
    }
    const polyes::SynthParams params{a.harmonics, a.gain};
    const auto buffer = polyes::synthesize_sequence(chords, params, a.sample_rate);
    polyes::write_wav(buffer, a.out);
    std::cout << "wrote " << a.out << ": " << chords.size() << " chords, " << buffer.samples.size() << " samples ("
              << buffer.duration_seconds() << " s)\n";
    return kOk;
}

struct TranscribeArgs {
    std::string in;
    std::string midi_out;
    std::string report;
    std::string fitness_csv;
    std::vector<double> segments;
    bool auto_onsets = false;
    double snap = 0.0;
    double onset_threshold = polyes::kDefaultOnsetThreshold;
    std::size_t notes_per_chord = 3;
    std::size_t mu = 100;
    std::size_t lambda = 80;
    std::size_t rho = 2;
    double alpha = polyes::EsConfig{}.alpha_es;
    std::string sigma_init = "0.005:0.05";
    std::size_t generations = 300;
    std::string selection = "plus";
    std::string sigma_rule = "per-offspring";
    std::size_t stagnation = polyes::EsConfig{}.stagnation_window;
    std::uint64_t seed = 1;
    std::size_t jobs = 1;
    int harmonics = polyes::SynthParams{}.harmonic_count;
    double gain = polyes::SynthParams{}.master_gain;
    bool no_timing = false;
};

int run_transcribe(const TranscribeArgs& a) {
    const auto buffer = polyes::read_wav(a.in);

    polyes::TranscriptionConfig config;
    config.es.mu = a.mu;
    config.es.lambda = a.lambda;
    config.es.rho = a.rho;
    config.es.alpha_es = a.alpha;
    std::tie(config.es.sigma_init_low, config.es.sigma_init_high) = parse_range<double>(a.sigma_init, "--sigma-init");
    config.es.max_generations = a.generations;
    config.es.selection = polyes::parse_selection(a.selection);
    config.es.sigma_rule = polyes::parse_sigma_rule(a.sigma_rule);
    config.es.stagnation_window = a.stagnation;
    config.es.seed = a.seed;
    config.spectral.sample_rate = buffer.sample_rate;
    config.spectral.f_max = buffer.sample_rate / 2.0;
    config.synth = {a.harmonics, a.gain};
    config.notes_per_chord = a.notes_per_chord;
    // The target went through 16-bit PCM; candidates must too, or its
    // quantization noise dominates every quiet bin.
    config.quantize_candidates = true;

    polyes::TranscribeOptions options;
    if (!a.segments.empty()) {
        options.boundaries = a.segments;
    }
    if (a.snap > 0.0) {
        options.snap_grid = a.snap;
    }
    options.onset_threshold = a.onset_threshold;
    options.jobs = a.jobs;

    const auto result = polyes::transcribe(buffer, config, options);

    if (!a.midi_out.empty()) {
        polyes::write_midi(result, a.midi_out);
    }
    if (!a.report.empty()) {
        polyes::write_report(result, a.report, {.include_timing = !a.no_timing});
    }
    std::string csv = a.fitness_csv;
    if (csv.empty() && !a.report.empty()) {
        csv = std::filesystem::path(a.report).replace_extension(".csv").string();
    }
    if (!csv.empty()) {
        polyes::write_fitness_csv(result, csv);
    }

    std::cout << std::fixed << std::setprecision(4);
    for (std::size_t i = 0; i < result.segments.size(); ++i) {
        const auto& s = result.segments[i];
        std::cout << "segment " << i << " [" << s.start << " s, " << s.duration << " s] genes";
        for (double g : s.raw_genes) std::cout << ' ' << g;
        std::cout << " -> pitches";
        for (int p : result.events[i].pitches) std::cout << ' ' << p;
        std::cout << "  cost " << s.best_cost << " after " << s.generations_run() << " generations\n";
    }
    std::cout << "total " << result.total_runtime << " s\n";
    return kOk;
}

struct OracleArgs {
    std::string in;
    std::string range = "55:79";
    std::size_t notes_per_chord = 3;
    int harmonics = polyes::SynthParams{}.harmonic_count;
    double gain = polyes::SynthParams{}.master_gain;
    std::size_t jobs = 1;
};

int run_oracle(const OracleArgs& a) {
    const auto buffer = polyes::read_wav(a.in);
    const auto [low, high] = parse_range<int>(a.range, "--range");
    polyes::SpectralConfig spectral;
    spectral.sample_rate = buffer.sample_rate;
    spectral.f_max = buffer.sample_rate / 2.0;
    auto ctx = polyes::make_fitness_context(buffer, spectral, {a.harmonics, a.gain});
    ctx.quantize_candidates = true;
    const auto res = polyes::brute_force_oracle(ctx, low, high, a.notes_per_chord, a.jobs);

    std::cout << "argmin";
    for (int p : res.argmin) std::cout << ' ' << p;
    std::cout << std::setprecision(10) << "\ncost " << res.best_cost << "\nrunner-up " << res.runner_up_cost
              << "\nunique " << (res.unique() ? "yes" : "no") << "\nevaluated " << res.evaluated << '\n';
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Polyphonic transcription by evolution strategies"};
    app.require_subcommand(1);

    SynthArgs synth;
    auto* synth_cmd = app.add_subcommand("synth", "Render a chord-spec file to a 16-bit mono WAV");
    synth_cmd->add_option("--spec", synth.spec, "Chord-spec text file")->required();
    synth_cmd->add_option("--out", synth.out, "Output WAV")->required();
    synth_cmd->add_option("--harmonics", synth.harmonics, "Partials per note")->capture_default_str();
    synth_cmd->add_option("--sample-rate", synth.sample_rate, "Sample rate in Hz")->capture_default_str();
    synth_cmd->add_option("--gain", synth.gain, "Peak level in (0, 1]")->capture_default_str();

    TranscribeArgs tr;
    auto* tr_cmd = app.add_subcommand("transcribe", "Transcribe a WAV file");
    tr_cmd->add_option("--in", tr.in, "Input WAV")->required();
    tr_cmd->add_option("--out", tr.midi_out, "Output Standard MIDI File");
    tr_cmd->add_option("--report", tr.report, "Output JSON report (a .csv of fitness curves is written beside it)");
    tr_cmd->add_option("--fitness-csv", tr.fitness_csv, "Output path for per-generation fitness CSV");
    auto* seg_opt = tr_cmd->add_option("--segments", tr.segments, "Explicit segment starts, e.g. 0,1,1.5")
                        ->delimiter(',');
    tr_cmd->add_flag("--auto-onsets", tr.auto_onsets, "Detect segment starts by spectral flux (default)")
        ->excludes(seg_opt);
    tr_cmd->add_option("--snap", tr.snap, "Snap segment starts to this grid in seconds");
    tr_cmd->add_option("--onset-threshold", tr.onset_threshold, "Flux threshold as a multiple of the median")
        ->capture_default_str();
    tr_cmd->add_option("--notes-per-chord", tr.notes_per_chord)->capture_default_str();
    tr_cmd->add_option("--mu", tr.mu, "Parent population size")->capture_default_str();
    tr_cmd->add_option("--lambda", tr.lambda, "Offspring per generation")->capture_default_str();
    tr_cmd->add_option("--rho", tr.rho, "Parents per recombination")->capture_default_str();
    tr_cmd->add_option("--alpha", tr.alpha, "Step-size change rate")->capture_default_str();
    tr_cmd->add_option("--sigma-init", tr.sigma_init, "Initial step-size range low:high")->capture_default_str();
    tr_cmd->add_option("--generations", tr.generations, "Generation budget")->capture_default_str();
    tr_cmd->add_option("--selection", tr.selection, "plus or comma")->capture_default_str();
    tr_cmd->add_option("--sigma-rule", tr.sigma_rule, "per-offspring or one-fifth")->capture_default_str();
    tr_cmd->add_option("--stagnation", tr.stagnation, "Stop after this many generations without improvement (0: never)")
        ->capture_default_str();
    tr_cmd->add_option("--seed", tr.seed)->capture_default_str();
    tr_cmd->add_option("--jobs", tr.jobs, "Worker threads")->capture_default_str();
    tr_cmd->add_option("--harmonics", tr.harmonics, "Partials per note (match the target's synthesizer)")
        ->capture_default_str();
    tr_cmd->add_option("--gain", tr.gain, "Synthesizer peak level")->capture_default_str();
    tr_cmd->add_flag("--no-timing", tr.no_timing, "Leave wall-clock fields out of the report");

    OracleArgs oracle;
    auto* oracle_cmd = app.add_subcommand("oracle", "Exhaustively score integer chords against a WAV");
    oracle_cmd->add_option("--in", oracle.in, "Input WAV")->required();
    oracle_cmd->add_option("--range", oracle.range, "Pitch range low:high")->capture_default_str();
    oracle_cmd->add_option("--notes-per-chord", oracle.notes_per_chord)->capture_default_str();
    oracle_cmd->add_option("--harmonics", oracle.harmonics)->capture_default_str();
    oracle_cmd->add_option("--gain", oracle.gain)->capture_default_str();
    oracle_cmd->add_option("--jobs", oracle.jobs)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    try {
        if (*synth_cmd) return run_synth(synth);
        if (*tr_cmd) return run_transcribe(tr);
        if (*oracle_cmd) return run_oracle(oracle);
    } catch (const polyes::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kInternal;
    }
    return kUsage;
}
