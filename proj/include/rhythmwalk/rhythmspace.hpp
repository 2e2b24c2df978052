#pragma once

// The 500x500 pixel pattern space. Anchor drum patterns sit at fixed
// coordinates; any other point gets a pattern by inverse-distance-weighted
// interpolation of the anchors' onsets. Also owns the walk-cell-to-pixel
// mapping and the position clamp.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rhythmwalk/errors.hpp"
#include "rhythmwalk/potential.hpp"
#include "rhythmwalk/walk.hpp"

namespace rhythmwalk {

inline constexpr double kSpaceSize = 500.0;  // pixels, square
inline constexpr int kDefaultPixelRatio = 10;
inline constexpr int kPatternSlots = 16;
inline constexpr int kMinPercussionNote = 35;
inline constexpr int kMaxPercussionNote = 81;

// One instrument hit: a General MIDI percussion note number and velocity.
struct Onset {
  int note = 36;
  int velocity = 100;
};

inline bool operator==(const Onset& a, const Onset& b) {
  return a.note == b.note && a.velocity == b.velocity;
}

// All instruments sounding at one grid slot, kept sorted by note with no
// duplicate notes.
using Event = std::vector<Onset>;

struct DrumPattern {
  std::vector<Event> events;

  int length() const { return static_cast<int>(events.size()); }

  void validate() const {
    if (events.empty()) throw StructuralError("drum pattern has no events");
    for (const Event& event : events) {
      int previous_note = -1;
      for (const Onset& onset : event) {
        if (onset.note < kMinPercussionNote || onset.note > kMaxPercussionNote)
          throw StructuralError("percussion note " + std::to_string(onset.note) +
                                " outside " + std::to_string(kMinPercussionNote) +
                                ".." + std::to_string(kMaxPercussionNote));
        if (onset.velocity < 1 || onset.velocity > 127)
          throw StructuralError("velocity " + std::to_string(onset.velocity) +
                                " outside 1..127");
        if (onset.note <= previous_note)
          throw StructuralError("event onsets must be sorted by note and unique");
        previous_note = onset.note;
      }
    }
  }
};

inline bool operator==(const DrumPattern& a, const DrumPattern& b) {
  return a.events == b.events;
}

struct AnchorPattern {
  Vec2 position;
  DrumPattern pattern;
};

// Walker path in pixel space; segment_index[i] is the segment whose
// measurement produced positions[i] (-1 for the starting point).
struct PathTrace {
  std::vector<Vec2> positions;
  std::vector<int> segment_index;
};

inline std::pair<int, int> displacement_to_pixels(Displacement d,
                                                  int pixel_ratio) {
  if (pixel_ratio < 1) throw ConfigError("pixel ratio must be >= 1");
  return {d.dx * pixel_ratio, d.dy * pixel_ratio};
}

inline Vec2 clamp_position(Vec2 p) {
  return {std::clamp(p.x, 0.0, kSpaceSize), std::clamp(p.y, 0.0, kSpaceSize)};
}

// Immutable anchor set with inverse-distance pattern interpolation.
class RhythmSpace {
 public:
  explicit RhythmSpace(std::vector<AnchorPattern> anchors)
      : anchors_(std::move(anchors)) {
    if (anchors_.empty())
      throw ConfigError("rhythm space needs at least one anchor pattern");
    const int len = anchors_.front().pattern.length();
    for (const AnchorPattern& anchor : anchors_) {
      anchor.pattern.validate();
      if (anchor.pattern.length() != len)
        throw ConfigError("all anchor patterns must share one length; found " +
                          std::to_string(anchor.pattern.length()) + " and " +
                          std::to_string(len));
      const Vec2 p = anchor.position;
      if (p.x < 0.0 || p.x > kSpaceSize || p.y < 0.0 || p.y > kSpaceSize)
        throw ConfigError("anchor position outside the space");
    }
  }

  const std::vector<AnchorPattern>& anchors() const { return anchors_; }
  int pattern_length() const { return anchors_.front().pattern.length(); }

  // Inverse-distance weighting, power 2, over all anchors. Per instrument
  // and slot, the weighted activation is thresholded at 0.5 (ties include
  // the onset); velocities are blended with the same weights over the
  // anchors that carry the onset. A query on an anchor returns that
  // anchor's pattern verbatim.
  DrumPattern pattern_at(Vec2 p) const {
    constexpr double kExactDistance2 = 1e-12;
    std::vector<double> weights(anchors_.size());
    for (std::size_t i = 0; i < anchors_.size(); ++i) {
      const Vec2 d = p - anchors_[i].position;
      const double dist2 = d.x * d.x + d.y * d.y;
      if (dist2 < kExactDistance2) return anchors_[i].pattern;
      weights[i] = 1.0 / dist2;
    }
    double total = 0.0;
    for (double w : weights) total += w;

    DrumPattern out;
    out.events.resize(static_cast<std::size_t>(pattern_length()));
    for (int slot = 0; slot < pattern_length(); ++slot) {
      for (int note = kMinPercussionNote; note <= kMaxPercussionNote; ++note) {
        double activation = 0.0;
        double velocity_sum = 0.0;
        double velocity_weight = 0.0;
        for (std::size_t i = 0; i < anchors_.size(); ++i) {
          const Event& event =
              anchors_[i].pattern.events[static_cast<std::size_t>(slot)];
          const auto it = std::find_if(event.begin(), event.end(),
                                       [&](const Onset& o) { return o.note == note; });
          if (it == event.end()) continue;
          activation += weights[i];
          velocity_sum += weights[i] * it->velocity;
          velocity_weight += weights[i];
        }
        if (activation / total >= 0.5) {
          const int velocity = std::clamp(
              static_cast<int>(std::lround(velocity_sum / velocity_weight)), 1,
              127);
          out.events[static_cast<std::size_t>(slot)].push_back(
              Onset{note, velocity});
        }
      }
    }
    return out;
  }

 private:
  std::vector<AnchorPattern> anchors_;
};

namespace detail {

// Sparse pattern builder: list of (slot, onset).
inline DrumPattern make_pattern(
    std::initializer_list<std::pair<int, Onset>> hits) {
  DrumPattern p;
  p.events.resize(kPatternSlots);
  for (const auto& [slot, onset] : hits)
    p.events[static_cast<std::size_t>(slot)].push_back(onset);
  for (Event& e : p.events)
    std::sort(e.begin(), e.end(),
              [](const Onset& a, const Onset& b) { return a.note < b.note; });
  p.validate();
  return p;
}

}  // namespace detail

// Small demo anchor set: eight staple drum-machine grooves spread around
// the space. GM percussion notes: 36 kick, 37 rimshot, 38 snare, 39 clap,
// 42 closed hat, 45 low tom, 46 open hat, 49 crash, 51 ride, 56 cowbell.
inline RhythmSpace builtin_space() {
  using detail::make_pattern;
  std::vector<AnchorPattern> anchors;

  // four on the floor, house feel
  anchors.push_back({{100.0, 100.0},
                     make_pattern({{0, {36, 112}},  {4, {36, 104}},
                                   {8, {36, 112}},  {12, {36, 104}},
                                   {4, {39, 96}},   {12, {39, 96}},
                                   {2, {42, 72}},   {6, {42, 72}},
                                   {10, {42, 72}},  {14, {42, 72}},
                                   {0, {51, 64}},   {8, {51, 64}}})});

  // backbeat rock
  anchors.push_back({{400.0, 100.0},
                     make_pattern({{0, {36, 118}},  {7, {36, 96}},
                                   {10, {36, 104}}, {4, {38, 110}},
                                   {12, {38, 110}}, {0, {42, 80}},
                                   {2, {42, 64}},   {4, {42, 80}},
                                   {6, {42, 64}},   {8, {42, 80}},
                                   {10, {42, 64}},  {12, {42, 80}},
                                   {14, {46, 88}}})});

  // broken beat
  anchors.push_back({{100.0, 400.0},
                     make_pattern({{0, {36, 115}},  {2, {36, 90}},
                                   {8, {36, 100}},  {9, {36, 84}},
                                   {4, {38, 108}},  {7, {38, 72}},
                                   {12, {38, 108}}, {14, {38, 64}},
                                   {0, {42, 76}},   {4, {42, 76}},
                                   {8, {42, 76}},   {12, {42, 76}},
                                   {15, {45, 90}}})});

  // driving techno
  anchors.push_back({{400.0, 400.0},
                     make_pattern({{0, {36, 120}},  {4, {36, 120}},
                                   {8, {36, 120}},  {12, {36, 120}},
                                   {2, {46, 92}},   {6, {46, 92}},
                                   {10, {46, 92}},  {14, {46, 92}},
                                   {4, {39, 100}},  {12, {39, 100}},
                                   {0, {51, 60}},   {6, {51, 60}},
                                   {8, {51, 60}}})});

  // son clave with cowbell
  anchors.push_back({{250.0, 60.0},
                     make_pattern({{0, {37, 105}},  {3, {37, 98}},
                                   {6, {37, 98}},   {10, {37, 105}},
                                   {12, {37, 98}},  {0, {56, 84}},
                                   {4, {56, 84}},   {8, {56, 84}},
                                   {12, {56, 84}},  {8, {36, 96}}})});

  // half time
  anchors.push_back({{60.0, 250.0},
                     make_pattern({{0, {36, 118}},  {8, {38, 112}},
                                   {0, {42, 70}},   {2, {42, 56}},
                                   {4, {42, 70}},   {6, {42, 56}},
                                   {8, {42, 70}},   {10, {42, 56}},
                                   {12, {42, 70}},  {14, {42, 56}},
                                   {15, {46, 72}}})});

  // shuffle with open-hat pushes
  anchors.push_back({{440.0, 250.0},
                     make_pattern({{0, {36, 114}},  {8, {36, 106}},
                                   {4, {38, 108}},  {12, {38, 108}},
                                   {0, {42, 78}},   {2, {42, 58}},
                                   {4, {42, 78}},   {6, {42, 58}},
                                   {8, {42, 78}},   {10, {42, 58}},
                                   {12, {42, 78}},  {7, {46, 86}},
                                   {15, {46, 86}}})});

  // sparse minimal
  anchors.push_back({{250.0, 440.0},
                     make_pattern({{0, {36, 110}},  {8, {36, 102}},
                                   {4, {37, 92}},   {12, {37, 92}},
                                   {2, {42, 62}},   {6, {42, 62}},
                                   {10, {42, 62}},  {14, {42, 62}},
                                   {0, {49, 70}}})});

  return RhythmSpace(std::move(anchors));
}

// Anchor file schema: a JSON array, one object per anchor, with "x", "y"
// and "pattern" = array of slot arrays of {"note", "velocity"}.
inline std::vector<AnchorPattern> anchors_from_json(const nlohmann::json& doc) {
  if (!doc.is_array()) throw ParseError("anchor document must be a JSON array");
  std::vector<AnchorPattern> anchors;
  for (const auto& item : doc) {
    if (!item.is_object() || !item.contains("x") || !item.contains("y") ||
        !item.contains("pattern"))
      throw ParseError("anchor entries need fields x, y, pattern");
    AnchorPattern anchor;
    anchor.position = {item.at("x").get<double>(), item.at("y").get<double>()};
    const auto& pattern = item.at("pattern");
    if (!pattern.is_array()) throw ParseError("anchor pattern must be an array");
    for (const auto& slot : pattern) {
      Event event;
      for (const auto& onset : slot) {
        event.push_back(Onset{onset.at("note").get<int>(),
                              onset.at("velocity").get<int>()});
      }
      std::sort(event.begin(), event.end(),
                [](const Onset& a, const Onset& b) { return a.note < b.note; });
      anchor.pattern.events.push_back(std::move(event));
    }
    anchors.push_back(std::move(anchor));
  }
  return anchors;
}

inline nlohmann::json anchors_to_json(const std::vector<AnchorPattern>& anchors) {
  nlohmann::json doc = nlohmann::json::array();
  for (const AnchorPattern& anchor : anchors) {
    nlohmann::json pattern = nlohmann::json::array();
    for (const Event& event : anchor.pattern.events) {
      nlohmann::json slot = nlohmann::json::array();
      for (const Onset& onset : event)
        slot.push_back({{"note", onset.note}, {"velocity", onset.velocity}});
      pattern.push_back(std::move(slot));
    }
    doc.push_back({{"x", anchor.position.x},
                   {"y", anchor.position.y},
                   {"pattern", std::move(pattern)}});
  }
  return doc;
}

inline RhythmSpace load_space(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open anchor file: " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("anchor file " + path + ": " + e.what());
  }
  return RhythmSpace(anchors_from_json(doc));
}

}  // namespace rhythmwalk
