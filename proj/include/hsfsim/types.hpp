#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace hsf {

// Thrown when the simulation itself detects an internal inconsistency
// (conservation breach, illegal commit, malformed replay script). Callers
// that drive whole runs map this to a distinct process exit code.
struct invariant_error : std::logic_error {
  using std::logic_error::logic_error;
};

struct Coord {
  int x = 0;
  int y = 0;

  friend bool operator==(const Coord& a, const Coord& b) {
    return a.x == b.x && a.y == b.y;
  }
  friend bool operator!=(const Coord& a, const Coord& b) { return !(a == b); }
  friend bool operator<(const Coord& a, const Coord& b) {
    return a.y != b.y ? a.y < b.y : a.x < b.x;
  }
};

inline std::string to_string(const Coord& c) {
  return "(" + std::to_string(c.x) + "," + std::to_string(c.y) + ")";
}

enum class HDir : uint8_t { East, West };
enum class VDir : uint8_t { North, South };

// Which of a node's two ports a packet uses. Every node owns one input and
// one output on each axis.
enum class Axis : uint8_t { Horizontal, Vertical };

inline Axis other_axis(Axis a) {
  return a == Axis::Horizontal ? Axis::Vertical : Axis::Horizontal;
}

// Grid sides a gateway can sit on. The injecting gateway is always on the
// south-west corner; acknowledgements exit either there or at the
// north-east gateway depending on the system variant.
enum class Side : uint8_t { West, East };

inline const char* to_string(Side s) { return s == Side::West ? "SW" : "NE"; }

struct Orientation {
  HDir h;
  VDir v;

  friend bool operator==(const Orientation& a, const Orientation& b) {
    return a.h == b.h && a.v == b.v;
  }
};

enum class PacketKind : uint8_t { Config, Ack };

struct Packet {
  uint32_t id = 0;
  PacketKind kind = PacketKind::Config;
  Coord dest{};
  // For acks: the side whose gateway sink accepts the packet once it has
  // reached dest. Unused for configuration packets.
  Side exit = Side::West;
  uint32_t created_tick = 0;
};

// System variant knobs: queue depth behind the processing slot, whether a
// node may fall back to its second output, and where acks leave the grid.
struct Variant {
  int queue_slots = 0;
  bool parallel = false;
  Side ack_side = Side::West;

  friend bool operator==(const Variant& a, const Variant& b) {
    return a.queue_slots == b.queue_slots && a.parallel == b.parallel &&
           a.ack_side == b.ack_side;
  }
};

namespace variants {
inline Variant basic() { return {0, false, Side::West}; }
inline Variant parallel() { return {1, true, Side::West}; }
inline Variant acks_ne() { return {0, false, Side::East}; }
inline Variant queue(int x) { return {x, false, Side::West}; }
inline Variant acks_ne_queue(int x) { return {x, false, Side::East}; }
}  // namespace variants

// Canonical spelling used by config files, CSV output and the CLI.
inline std::string variant_name(const Variant& v) {
  if (v.parallel) return "parallel";
  if (v.ack_side == Side::East) {
    if (v.queue_slots == 0) return "acks-NE";
    return "acks-NE-queue-" + std::to_string(v.queue_slots);
  }
  if (v.queue_slots == 0) return "basic";
  return "queue-" + std::to_string(v.queue_slots);
}

bool parse_variant(const std::string& name, Variant& out);

inline bool parse_variant(const std::string& name, Variant& out) {
  auto parse_int = [](const std::string& s, int& val) {
    if (s.empty()) return false;
    for (char c : s)
      if (c < '0' || c > '9') return false;
    try {
      val = std::stoi(s);
    } catch (const std::exception&) {
      return false;
    }
    return val >= 1;
  };
  if (name == "basic") {
    out = variants::basic();
    return true;
  }
  if (name == "parallel") {
    out = variants::parallel();
    return true;
  }
  if (name == "acks-NE") {
    out = variants::acks_ne();
    return true;
  }
  const std::string q = "queue-";
  const std::string aq = "acks-NE-queue-";
  int x = 0;
  if (name.rfind(aq, 0) == 0 && parse_int(name.substr(aq.size()), x)) {
    out = variants::acks_ne_queue(x);
    return true;
  }
  if (name.rfind(q, 0) == 0 && parse_int(name.substr(q.size()), x)) {
    out = variants::queue(x);
    return true;
  }
  return false;
}

}  // namespace hsf

template <>
struct std::hash<hsf::Coord> {
  size_t operator()(const hsf::Coord& c) const noexcept {
    return std::hash<int>()(c.x * 4099 + c.y);
  }
};
