#pragma once

#include <string>
#include <unordered_set>
#include <vector>

#include "hsfsim/types.hpp"

namespace hsf {

// Order in which the injecting gateway emits one configuration packet per
// grid node. Row-major or column-major, from either corner, or two corner
// streams interleaved.
enum class Ordering : uint8_t {
  SWtoNE_x,
  SWtoNE_y,
  NEtoSW_x,
  NEtoSW_y,
  Alternating,
};

inline const char* ordering_name(Ordering o) {
  switch (o) {
    case Ordering::SWtoNE_x: return "sw-ne-x";
    case Ordering::SWtoNE_y: return "sw-ne-y";
    case Ordering::NEtoSW_x: return "ne-sw-x";
    case Ordering::NEtoSW_y: return "ne-sw-y";
    case Ordering::Alternating: return "alternating";
  }
  return "?";
}

inline bool parse_ordering(const std::string& name, Ordering& out) {
  for (Ordering o : {Ordering::SWtoNE_x, Ordering::SWtoNE_y, Ordering::NEtoSW_x,
                     Ordering::NEtoSW_y, Ordering::Alternating}) {
    if (name == ordering_name(o)) {
      out = o;
      return true;
    }
  }
  return false;
}

constexpr Ordering kAllOrderings[] = {Ordering::SWtoNE_x, Ordering::SWtoNE_y,
                                      Ordering::NEtoSW_x, Ordering::NEtoSW_y,
                                      Ordering::Alternating};

inline std::vector<Coord> generate_sequence(int n, Ordering ordering) {
  if (n < 2 || n % 2 != 0)
    throw std::invalid_argument("sequence needs an even grid side, got " +
                                std::to_string(n));
  std::vector<Coord> seq;
  seq.reserve(static_cast<size_t>(n) * n);
  switch (ordering) {
    case Ordering::SWtoNE_x:
      for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x) seq.push_back({x, y});
      break;
    case Ordering::SWtoNE_y:
      for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) seq.push_back({x, y});
      break;
    case Ordering::NEtoSW_x:
      for (int y = n - 1; y >= 0; --y)
        for (int x = n - 1; x >= 0; --x) seq.push_back({x, y});
      break;
    case Ordering::NEtoSW_y:
      for (int x = n - 1; x >= 0; --x)
        for (int y = n - 1; y >= 0; --y) seq.push_back({x, y});
      break;
    case Ordering::Alternating: {
      // Interleave the two row-major streams one packet at a time; a
      // destination already emitted by the other stream is skipped.
      const std::vector<Coord> fwd = generate_sequence(n, Ordering::SWtoNE_x);
      const std::vector<Coord> bwd = generate_sequence(n, Ordering::NEtoSW_x);
      std::unordered_set<Coord> emitted;
      size_t fi = 0, bi = 0;
      bool from_fwd = true;
      while (seq.size() < fwd.size()) {
        size_t& i = from_fwd ? fi : bi;
        const std::vector<Coord>& stream = from_fwd ? fwd : bwd;
        while (i < stream.size() && emitted.count(stream[i])) ++i;
        if (i < stream.size()) {
          seq.push_back(stream[i]);
          emitted.insert(stream[i]);
          ++i;
        }
        from_fwd = !from_fwd;
      }
      break;
    }
  }
  return seq;
}

// Injection-side bookkeeping. The pending list lives in the shared
// sequence; `next` is how many packets have entered the grid.
struct GatewayState {
  uint32_t next = 0;
  uint32_t seq_len = 0;
  uint32_t acks_received = 0;
  uint32_t last_ack_tick = 0;

  bool pending_empty() const { return next >= seq_len; }
  bool complete() const { return acks_received >= seq_len; }
};

}  // namespace hsf
