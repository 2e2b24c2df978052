#pragma once

// Minimal Standard MIDI File reader used to check encoder output from the
// outside. Deliberately independent of the encoder: it walks raw bytes with
// its own cursor, supports running status, and validates chunk framing.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace smf {

struct Event {
  std::uint32_t tick = 0;
  std::uint8_t status = 0;            // full status byte (after running status)
  std::uint8_t meta_type = 0;         // valid when status == 0xff
  std::vector<std::uint8_t> data;
};

struct File {
  int format = -1;
  int num_tracks = 0;
  int division = 0;
  std::vector<Event> events;  // single-track files only need one list
};

class ParseFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

class Cursor {
 public:
  Cursor(const std::uint8_t* data, std::size_t size) : data_(data), size_(size) {}

  std::uint8_t u8() {
    if (pos_ >= size_) throw ParseFailure("unexpected end of file");
    return data_[pos_++];
  }

  std::uint16_t u16() {
    const std::uint16_t hi = u8();
    return static_cast<std::uint16_t>((hi << 8) | u8());
  }

  std::uint32_t u32() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = (v << 8) | u8();
    return v;
  }

  std::uint32_t vlq() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      const std::uint8_t b = u8();
      v = (v << 7) | (b & 0x7fu);
      if ((b & 0x80u) == 0) return v;
    }
    throw ParseFailure("variable-length quantity longer than four bytes");
  }

  void expect_tag(const char* tag) {
    for (int i = 0; i < 4; ++i) {
      if (u8() != static_cast<std::uint8_t>(tag[i]))
        throw ParseFailure(std::string("missing chunk tag ") + tag);
    }
  }

  std::size_t position() const { return pos_; }
  bool done() const { return pos_ >= size_; }

 private:
  const std::uint8_t* data_;
  std::size_t size_;
  std::size_t pos_ = 0;
};

inline int data_bytes_for(std::uint8_t status) {
  switch (status & 0xf0u) {
    case 0xc0:
    case 0xd0:
      return 1;
    default:
      return 2;
  }
}

}  // namespace detail

inline File parse(const std::vector<std::uint8_t>& bytes) {
  detail::Cursor in(bytes.data(), bytes.size());
  in.expect_tag("MThd");
  if (in.u32() != 6) throw ParseFailure("header chunk must have length 6");
  File file;
  file.format = in.u16();
  file.num_tracks = in.u16();
  file.division = in.u16();
  if (file.division & 0x8000) throw ParseFailure("SMPTE division not supported");

  for (int t = 0; t < file.num_tracks; ++t) {
    in.expect_tag("MTrk");
    const std::uint32_t length = in.u32();
    const std::size_t track_end = in.position() + length;
    std::uint32_t tick = 0;
    std::uint8_t running = 0;
    bool saw_end = false;
    while (in.position() < track_end) {
      if (saw_end) throw ParseFailure("events after end-of-track");
      tick += in.vlq();
      std::uint8_t status = in.u8();
      Event event;
      event.tick = tick;
      if (status == 0xff) {
        event.status = status;
        event.meta_type = in.u8();
        const std::uint32_t len = in.vlq();
        for (std::uint32_t i = 0; i < len; ++i) event.data.push_back(in.u8());
        if (event.meta_type == 0x2f) saw_end = true;
      } else if (status == 0xf0 || status == 0xf7) {
        event.status = status;
        const std::uint32_t len = in.vlq();
        for (std::uint32_t i = 0; i < len; ++i) event.data.push_back(in.u8());
      } else {
        if (status & 0x80u) {
          running = status;
        } else {
          if (running == 0) throw ParseFailure("data byte without status");
          event.data.push_back(status);
          status = running;
        }
        event.status = status;
        const int need = detail::data_bytes_for(status);
        while (static_cast<int>(event.data.size()) < need)
          event.data.push_back(in.u8());
        for (std::uint8_t d : event.data)
          if (d & 0x80u) throw ParseFailure("data byte has high bit set");
      }
      file.events.push_back(std::move(event));
    }
    if (in.position() != track_end)
      throw ParseFailure("track length does not match its contents");
    if (!saw_end) throw ParseFailure("track missing end-of-track meta event");
  }
  if (!in.done()) throw ParseFailure("trailing bytes after final track");
  return file;
}

struct Note {
  std::uint32_t tick = 0;
  int channel = 0;  // zero-based
  int note = 0;
  int velocity = 0;
};

inline std::vector<Note> note_ons(const File& file) {
  std::vector<Note> notes;
  for (const Event& e : file.events) {
    if ((e.status & 0xf0u) == 0x90 && e.data.size() == 2 && e.data[1] > 0)
      notes.push_back(Note{e.tick, e.status & 0x0f, e.data[0], e.data[1]});
  }
  return notes;
}

inline std::vector<Note> note_offs(const File& file) {
  std::vector<Note> notes;
  for (const Event& e : file.events) {
    const bool off = (e.status & 0xf0u) == 0x80 ||
                     ((e.status & 0xf0u) == 0x90 && e.data.size() == 2 &&
                      e.data[1] == 0);
    if (off && e.data.size() == 2)
      notes.push_back(Note{e.tick, e.status & 0x0f, e.data[0], e.data[1]});
  }
  return notes;
}

// Tempo in microseconds per quarter note from the first tempo meta event.
inline long tempo_micros(const File& file) {
  for (const Event& e : file.events) {
    if (e.status == 0xff && e.meta_type == 0x51) {
      if (e.data.size() != 3) throw ParseFailure("tempo meta must carry 3 bytes");
      return (long(e.data[0]) << 16) | (long(e.data[1]) << 8) | long(e.data[2]);
    }
  }
  throw ParseFailure("no tempo event found");
}

}  // namespace smf
