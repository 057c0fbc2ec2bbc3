#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "polyes/transcriber.hpp"

namespace polyes::midi {

inline constexpr std::uint16_t kTicksPerQuarter = 480;
inline constexpr std::uint32_t kTempoMicrosPerQuarter = 500000;  // 120 BPM
inline constexpr std::uint8_t kVelocity = 96;

/// 120 BPM at 480 PPQ gives 960 ticks per second.
std::uint32_t seconds_to_ticks(double seconds);

/// Variable-length quantity, 7 bits per byte, most significant first.
void append_vlq(std::vector<std::uint8_t>& out, std::uint32_t value);

/// Format-0 Standard MIDI File: tempo meta event, then per event note-ons at
/// its start and note-offs duration ticks later, on channel 0. At equal ticks
/// note-offs precede note-ons.
std::vector<std::uint8_t> encode(std::span<const NoteEvent> events);

}  // namespace polyes::midi

namespace polyes {

void write_midi(const TranscriptionResult& result, const std::filesystem::path& path);

}  // namespace polyes
