#include "polyes/midi.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <tuple>

#include "polyes/error.hpp"

namespace polyes::midi {

namespace {

struct TimedMessage {
    std::uint32_t tick;
    bool note_on;
    std::uint8_t key;
};

void append_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v & 0xff));
}

void append_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int shift = 24; shift >= 0; shift -= 8) {
        out.push_back(static_cast<std::uint8_t>((v >> shift) & 0xff));
    }
}

}  // namespace

std::uint32_t seconds_to_ticks(double seconds) {
    const double per_second = kTicksPerQuarter * 1e6 / kTempoMicrosPerQuarter;
    return static_cast<std::uint32_t>(std::llround(seconds * per_second));
}

void append_vlq(std::vector<std::uint8_t>& out, std::uint32_t value) {
    std::uint8_t groups[5];
    int n = 0;
    do {
        groups[n++] = static_cast<std::uint8_t>(value & 0x7f);
        value >>= 7;
    } while (value != 0);
    while (n > 1) {
        out.push_back(static_cast<std::uint8_t>(groups[--n] | 0x80));
    }
    out.push_back(groups[0]);
}

std::vector<std::uint8_t> encode(std::span<const NoteEvent> events) {
    std::vector<TimedMessage> messages;
    for (const auto& event : events) {
        if (event.pitches.empty() || !(event.duration > 0.0)) {
            throw Error(Errc::InvalidSpec, "note events need pitches and a positive duration");
        }
        const std::uint32_t on = seconds_to_ticks(event.start);
        const std::uint32_t off = on + seconds_to_ticks(event.duration);
        for (int key : event.pitches) {
            if (key < 0 || key > 127) {
                throw Error(Errc::InvalidSpec, "MIDI key out of range");
            }
            messages.push_back({on, true, static_cast<std::uint8_t>(key)});
            messages.push_back({off, false, static_cast<std::uint8_t>(key)});
        }
    }
    std::stable_sort(messages.begin(), messages.end(), [](const TimedMessage& a, const TimedMessage& b) {
        return std::tuple(a.tick, a.note_on) < std::tuple(b.tick, b.note_on);
    });

    std::vector<std::uint8_t> track;
    append_vlq(track, 0);
    track.insert(track.end(), {0xff, 0x51, 0x03});
    track.push_back(static_cast<std::uint8_t>((kTempoMicrosPerQuarter >> 16) & 0xff));
    track.push_back(static_cast<std::uint8_t>((kTempoMicrosPerQuarter >> 8) & 0xff));
    track.push_back(static_cast<std::uint8_t>(kTempoMicrosPerQuarter & 0xff));

    std::uint32_t now = 0;
    for (const auto& m : messages) {
        append_vlq(track, m.tick - now);
        now = m.tick;
        track.push_back(m.note_on ? 0x90 : 0x80);
        track.push_back(m.key);
        track.push_back(m.note_on ? kVelocity : 0);
    }
    append_vlq(track, 0);
    track.insert(track.end(), {0xff, 0x2f, 0x00});

    std::vector<std::uint8_t> file{'M', 'T', 'h', 'd'};
    append_u32(file, 6);
    append_u16(file, 0);  // format 0
    append_u16(file, 1);  // one track
    append_u16(file, kTicksPerQuarter);
    file.insert(file.end(), {'M', 'T', 'r', 'k'});
    append_u32(file, static_cast<std::uint32_t>(track.size()));
    file.insert(file.end(), track.begin(), track.end());
    return file;
}

}  // namespace polyes::midi

namespace polyes {

void write_midi(const TranscriptionResult& result, const std::filesystem::path& path) {
    if (result.events.empty()) {
        throw Error(Errc::EmptySignal, "no events to write");
    }
    const auto bytes = midi::encode(result.events);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(Errc::IoError, "cannot open " + path.string() + " for writing");
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw Error(Errc::IoError, "write failed for " + path.string());
    }
}

}  // namespace polyes
