#pragma once

// Path-to-MIDI conversion: resample the walker's polyline onto a semiquaver
// grid, pick each grid slot's event from the pattern found at the resampled
// point, and serialize the result as a format-0 Standard MIDI File on the
// percussion channel.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "rhythmwalk/errors.hpp"
#include "rhythmwalk/potential.hpp"
#include "rhythmwalk/rhythmspace.hpp"

namespace rhythmwalk {

struct TimingGrid {
  double tempo_bpm = 120.0;
  int ppq = 480;
  int resolution = 4;  // grid slots per beat; 4 = semiquavers

  void validate() const {
    if (!(tempo_bpm > 0.0 && tempo_bpm <= 1000.0))
      throw ConfigError("tempo must lie in (0, 1000] bpm");
    if (ppq < 1 || ppq > 32767)
      throw ConfigError("ppq must lie in 1..32767");
    if (resolution < 1) throw ConfigError("grid resolution must be positive");
    if (ppq % resolution != 0)
      throw ConfigError("ppq (" + std::to_string(ppq) +
                        ") must be divisible by the grid resolution (" +
                        std::to_string(resolution) + ")");
  }

  int ticks_per_slot() const { return ppq / resolution; }
};

// One Event per grid slot.
struct GlobalSequence {
  std::vector<Event> steps;
};

using MidiDocument = std::vector<std::uint8_t>;

// Resamples the piecewise-linear trace at uniform arc-length intervals.
// The first output point is the trace start and the last is the trace end;
// a zero-length trace degenerates to its single point repeated.
inline std::vector<Vec2> resample_path(const PathTrace& trace, int num_slots) {
  if (trace.positions.empty())
    throw ParseError("cannot resample an empty trace");
  if (num_slots < 1) throw ConfigError("slot count must be positive");

  const std::vector<Vec2>& pts = trace.positions;
  std::vector<double> arc(pts.size(), 0.0);
  for (std::size_t i = 1; i < pts.size(); ++i)
    arc[i] = arc[i - 1] + length(pts[i] - pts[i - 1]);
  const double total = arc.back();

  std::vector<Vec2> out;
  out.reserve(static_cast<std::size_t>(num_slots));
  if (num_slots == 1) return {pts.front()};
  if (total == 0.0) {
    out.assign(static_cast<std::size_t>(num_slots), pts.front());
    return out;
  }

  std::size_t seg = 0;
  for (int i = 0; i < num_slots; ++i) {
    const double s =
        total * static_cast<double>(i) / static_cast<double>(num_slots - 1);
    while (seg + 2 < pts.size() && arc[seg + 1] < s) ++seg;
    const double span = arc[seg + 1] - arc[seg];
    const double u = span > 0.0 ? std::clamp((s - arc[seg]) / span, 0.0, 1.0) : 0.0;
    out.push_back(pts[seg] + (pts[seg + 1] - pts[seg]) * u);
  }
  out.front() = pts.front();
  out.back() = pts.back();
  return out;
}

inline const Event& select_event(const DrumPattern& pattern, int slot_index) {
  if (pattern.length() == 0) throw StructuralError("drum pattern has no events");
  if (slot_index < 0) throw StructuralError("slot index must be non-negative");
  return pattern.events[static_cast<std::size_t>(slot_index % pattern.length())];
}

inline GlobalSequence build_sequence(const std::vector<Vec2>& points,
                                     const RhythmSpace& space) {
  GlobalSequence seq;
  seq.steps.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i)
    seq.steps.push_back(
        select_event(space.pattern_at(points[i]), static_cast<int>(i)));
  return seq;
}

namespace detail {

inline void push_u32(MidiDocument& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

inline void push_u16(MidiDocument& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

// MIDI variable-length quantity, 7 bits per byte, high bit = continuation.
inline void push_vlq(MidiDocument& out, std::uint32_t v) {
  std::uint8_t bytes[5];
  int n = 0;
  do {
    bytes[n++] = static_cast<std::uint8_t>(v & 0x7f);
    v >>= 7;
  } while (v != 0);
  for (int i = n - 1; i > 0; --i)
    out.push_back(static_cast<std::uint8_t>(bytes[i] | 0x80));
  out.push_back(bytes[0]);
}

}  // namespace detail

// Format-0 SMF: one track, tempo meta event, every note on channel 10
// (status bytes 0x99 / 0x89). Each slot's note-ons land at tick
// i * ppq/resolution and their note-offs one slot later, offs emitted
// before ons that share a tick.
inline MidiDocument encode_midi(const GlobalSequence& seq,
                                const TimingGrid& grid) {
  grid.validate();
  for (const Event& event : seq.steps) {
    for (const Onset& onset : event) {
      if (onset.note < kMinPercussionNote || onset.note > kMaxPercussionNote)
        throw StructuralError("percussion note " + std::to_string(onset.note) +
                              " outside " + std::to_string(kMinPercussionNote) +
                              ".." + std::to_string(kMaxPercussionNote));
      if (onset.velocity < 1 || onset.velocity > 127)
        throw StructuralError("velocity " + std::to_string(onset.velocity) +
                              " outside 1..127");
    }
  }

  MidiDocument track;
  // tempo meta: FF 51 03, microseconds per quarter note
  const auto micros =
      static_cast<std::uint32_t>(std::llround(60000000.0 / grid.tempo_bpm));
  detail::push_vlq(track, 0);
  track.push_back(0xff);
  track.push_back(0x51);
  track.push_back(0x03);
  track.push_back(static_cast<std::uint8_t>(micros >> 16));
  track.push_back(static_cast<std::uint8_t>(micros >> 8));
  track.push_back(static_cast<std::uint8_t>(micros));

  const int tps = grid.ticks_per_slot();
  std::uint32_t cursor = 0;
  auto emit = [&](std::uint32_t tick, std::uint8_t status, int note, int vel) {
    detail::push_vlq(track, tick - cursor);
    cursor = tick;
    track.push_back(status);
    track.push_back(static_cast<std::uint8_t>(note));
    track.push_back(static_cast<std::uint8_t>(vel));
  };
  for (std::size_t i = 0; i < seq.steps.size(); ++i) {
    const auto tick = static_cast<std::uint32_t>(i) * static_cast<std::uint32_t>(tps);
    if (i > 0) {
      for (const Onset& onset : seq.steps[i - 1])
        emit(tick, 0x89, onset.note, 64);  // off, channel 10
    }
    for (const Onset& onset : seq.steps[i])
      emit(tick, 0x99, onset.note, onset.velocity);  // on, channel 10
  }
  if (!seq.steps.empty()) {
    const auto tick = static_cast<std::uint32_t>(seq.steps.size()) *
                      static_cast<std::uint32_t>(tps);
    for (const Onset& onset : seq.steps.back()) emit(tick, 0x89, onset.note, 64);
  }
  // end of track
  detail::push_vlq(track, 0);
  track.push_back(0xff);
  track.push_back(0x2f);
  track.push_back(0x00);

  MidiDocument out;
  out.reserve(14 + 8 + track.size());
  out.insert(out.end(), {'M', 'T', 'h', 'd'});
  detail::push_u32(out, 6);
  detail::push_u16(out, 0);  // format 0
  detail::push_u16(out, 1);  // one track
  detail::push_u16(out, static_cast<std::uint16_t>(grid.ppq));
  out.insert(out.end(), {'M', 'T', 'r', 'k'});
  detail::push_u32(out, static_cast<std::uint32_t>(track.size()));
  out.insert(out.end(), track.begin(), track.end());
  return out;
}

inline void write_bytes(const std::string& path, const MidiDocument& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open output file: " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing " + path);
}

}  // namespace rhythmwalk
