#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "polyes/error.hpp"
#include "polyes/midi.hpp"
#include "polyes/report.hpp"
#include "polyes/transcriber.hpp"
#include "smf_reader.hpp"

using namespace polyes;

namespace {

// Small budget so these stay quick; accuracy is covered by the acceptance suite.
TranscriptionConfig quick_config() {
    TranscriptionConfig c;
    c.es.mu = 12;
    c.es.lambda = 12;
    c.es.max_generations = 6;
    c.es.seed = 77;
    return c;
}

AudioBuffer two_chords() {
    const std::vector<ChordSpec> specs{{{60, 64, 67}, 0.5}, {{55, 59, 62}, 0.5}};
    return synthesize_sequence(specs, {}, 44100);
}

std::vector<smf_test::Note> expected_notes(const std::vector<NoteEvent>& events) {
    std::vector<smf_test::Note> notes;
    for (const auto& e : events) {
        for (int k : e.pitches) {
            notes.push_back({k, midi::seconds_to_ticks(e.start), midi::seconds_to_ticks(e.duration)});
        }
    }
    std::sort(notes.begin(), notes.end());
    return notes;
}

}  // namespace

TEST_CASE("round_genes") {
    CHECK(round_genes(std::vector<double>{59.98234, 67.00242, 64.03123}) == std::vector<int>{60, 67, 64});
    CHECK(round_genes(std::vector<double>{63.9985, 60.1580, 60.2356}) == std::vector<int>{64, 60, 60});
    CHECK(round_genes(std::vector<double>{66.2682}) == std::vector<int>{66});
    CHECK(round_genes(std::vector<double>{60.5, 61.4999, 20.0, 108.7}) == std::vector<int>{61, 61, 21, 108});
}

TEST_CASE("segment seeds are stable and distinct") {
    CHECK(segment_seed(1, 0) == segment_seed(1, 0));
    CHECK(segment_seed(1, 0) != segment_seed(1, 1));
    CHECK(segment_seed(1, 3) != segment_seed(2, 3));
}

TEST_CASE("transcribe assembles one event per segment") {
    const auto buffer = two_chords();
    TranscribeOptions options;
    options.boundaries = std::vector<double>{0.0, 0.5};
    const auto result = transcribe(buffer, quick_config(), options);

    REQUIRE(result.events.size() == 2);
    REQUIRE(result.segments.size() == 2);
    CHECK(result.events[0].start == 0.0);
    CHECK(result.events[0].duration == doctest::Approx(0.5));
    CHECK(result.events[1].start == doctest::Approx(0.5));
    for (std::size_t i = 0; i < 2; ++i) {
        const auto& seg = result.segments[i];
        CHECK(seg.raw_genes.size() == 3);
        CHECK(seg.rounded_pitches == round_genes(seg.raw_genes));
        CHECK(seg.generations_run() == 6);
        CHECK(seg.best_cost >= 6.0 * 2046.0);
        CHECK(seg.seed == segment_seed(77, i));
        auto set = seg.rounded_pitches;
        std::sort(set.begin(), set.end());
        set.erase(std::unique(set.begin(), set.end()), set.end());
        CHECK(result.events[i].pitches == set);
    }
}

TEST_CASE("results do not depend on the worker count") {
    const auto buffer = two_chords();
    TranscribeOptions serial;
    serial.boundaries = std::vector<double>{0.0, 0.5};
    TranscribeOptions parallel = serial;
    parallel.jobs = 3;
    const ReportOptions no_timing{.include_timing = false};
    const auto a = report_json(transcribe(buffer, quick_config(), serial), no_timing);
    const auto b = report_json(transcribe(buffer, quick_config(), parallel), no_timing);
    CHECK(a == b);
}

TEST_CASE("adding a segment leaves earlier segments unchanged") {
    const std::vector<ChordSpec> specs{{{60, 64, 67}, 0.5}, {{55, 59, 62}, 0.5}, {{69, 72, 76}, 0.5}};
    const auto three = synthesize_sequence(specs, {}, 44100);
    const auto two = two_chords();
    TranscribeOptions o2, o3;
    o2.boundaries = std::vector<double>{0.0, 0.5};
    o3.boundaries = std::vector<double>{0.0, 0.5, 1.0};
    const auto r2 = transcribe(two, quick_config(), o2);
    const auto r3 = transcribe(three, quick_config(), o3);
    CHECK(r2.segments[0].raw_genes == r3.segments[0].raw_genes);
    CHECK(r2.segments[1].raw_genes == r3.segments[1].raw_genes);
}

TEST_CASE("silence yields the identity cost") {
    const AudioBuffer silent{std::vector<double>(22050, 0.0), 44100};
    auto config = quick_config();
    config.es.max_generations = 1;
    TranscribeOptions options;
    options.boundaries = std::vector<double>{0.0};
    const auto result = transcribe(silent, config, options);
    REQUIRE(result.segments.size() == 1);
    // Any rendered chord has energy, so no candidate reaches the floor.
    CHECK(result.segments[0].best_cost > 6.0 * 2046.0);
    CHECK(!result.events[0].pitches.empty());
}

TEST_CASE("automatic onsets drive segmentation when no boundaries are given") {
    const auto buffer = two_chords();
    TranscribeOptions options;
    options.snap_grid = 0.5;
    CHECK(resolve_boundaries(buffer, SpectralConfig{}, options) == std::vector<double>{0.0, 0.5});
    const auto result = transcribe(buffer, quick_config(), options);
    CHECK(result.events.size() == 2);
}

TEST_CASE("transcribe input errors") {
    CHECK_THROWS_AS(transcribe({{}, 44100}, quick_config()), Error);
    auto bad = quick_config();
    bad.notes_per_chord = 0;
    CHECK_THROWS_AS(transcribe(two_chords(), bad), Error);
    TranscribeOptions options;
    options.boundaries = std::vector<double>{0.3};
    CHECK_THROWS_AS(transcribe(two_chords(), quick_config(), options), Error);
}

TEST_CASE("MIDI tick arithmetic and variable-length quantities") {
    CHECK(midi::seconds_to_ticks(1.0) == 960);
    CHECK(midi::seconds_to_ticks(4.5) == 4320);

    auto vlq = [](std::uint32_t v) {
        std::vector<std::uint8_t> out;
        midi::append_vlq(out, v);
        return out;
    };
    CHECK(vlq(0) == std::vector<std::uint8_t>{0x00});
    CHECK(vlq(0x7f) == std::vector<std::uint8_t>{0x7f});
    CHECK(vlq(0x80) == std::vector<std::uint8_t>{0x81, 0x00});
    CHECK(vlq(960) == std::vector<std::uint8_t>{0x87, 0x40});
    CHECK(vlq(0x0fffffff) == std::vector<std::uint8_t>{0xff, 0xff, 0xff, 0x7f});
}

TEST_CASE("single chord MIDI layout") {
    const std::vector<NoteEvent> events{{{60, 64, 67}, 0.0, 1.0}};
    const auto bytes = midi::encode(events);
    const auto file = smf_test::parse(bytes);
    CHECK(file.format == 0);
    CHECK(file.tracks == 1);
    CHECK(file.division == 480);
    CHECK(file.tempo == 500000);
    CHECK(file.end_of_track);
    const std::vector<smf_test::Note> want{{60, 0, 960}, {64, 0, 960}, {67, 0, 960}};
    CHECK(file.notes == want);
    // Velocity of the first note-on, right after the 7-byte tempo event.
    CHECK(bytes[22 + 7 + 3] == 96);
}

TEST_CASE("progression MIDI round trip, including repeated keys across segments") {
    const std::vector<NoteEvent> events{{{60, 64, 67}, 0.0, 1.0}, {{55, 59, 62}, 1.0, 0.5},
                                        {{69, 72, 76}, 1.5, 0.5}, {{64, 67, 71}, 2.0, 1.5},
                                        {{60, 64, 67}, 3.5, 1.0}};
    const auto file = smf_test::parse(midi::encode(events));
    CHECK(file.notes == expected_notes(events));
    std::uint32_t last_off = 0;
    for (const auto& n : file.notes) last_off = std::max(last_off, n.start + n.length);
    CHECK(last_off == 4320);

    // Same key in back-to-back events must not be merged or cut short.
    const std::vector<NoteEvent> repeat{{{60}, 0.0, 0.5}, {{60}, 0.5, 0.5}};
    CHECK(smf_test::parse(midi::encode(repeat)).notes == expected_notes(repeat));

    CHECK_THROWS_AS(midi::encode(std::vector<NoteEvent>{{{}, 0.0, 1.0}}), Error);
}

TEST_CASE("report JSON round trip and CSV layout") {
    const auto buffer = two_chords();
    TranscribeOptions options;
    options.boundaries = std::vector<double>{0.0, 0.5};
    auto config = quick_config();
    config.es.sigma_ceiling = 3.0;
    const auto result = transcribe(buffer, config, options);

    const auto dir = std::filesystem::temp_directory_path();
    write_report(result, dir / "polyes_report.json");
    const auto back = read_report(dir / "polyes_report.json");
    std::filesystem::remove(dir / "polyes_report.json");

    CHECK(report_json(back) == report_json(result));
    REQUIRE(back.segments.size() == result.segments.size());
    for (std::size_t i = 0; i < back.segments.size(); ++i) {
        const auto& a = result.segments[i];
        const auto& b = back.segments[i];
        REQUIRE(a.raw_genes.size() == b.raw_genes.size());
        for (std::size_t g = 0; g < a.raw_genes.size(); ++g) CHECK(std::abs(a.raw_genes[g] - b.raw_genes[g]) <= 1e-9);
        CHECK(a.rounded_pitches == b.rounded_pitches);
        CHECK(a.generations_run() == b.generations_run());
        CHECK(std::abs(a.best_cost - b.best_cost) <= 1e-9 * a.best_cost);
        CHECK(back.events[i].pitches == result.events[i].pitches);
    }
    CHECK(back.config.es.sigma_ceiling == 3.0);
    CHECK(back.config.es.seed == 77);

    const auto csv = fitness_csv(result);
    std::istringstream lines(csv);
    std::string header;
    std::getline(lines, header);
    CHECK(header == "segment,generation,best_cost,mean_cost,best_sigma");
    std::size_t rows = 0;
    for (std::string line; std::getline(lines, line);) ++rows;
    CHECK(rows == result.segments[0].generations_run() + result.segments[1].generations_run());

    const auto no_timing = report_json(result, {.include_timing = false});
    CHECK(no_timing.find("runtime_seconds") == std::string::npos);
    CHECK_THROWS_AS(parse_report("{\"format\": \"other\"}"), Error);
    CHECK_THROWS_AS(parse_report("not json"), Error);
}
