#pragma once

// Manhattan-style grid: every row carries traffic one way only, alternating
// by row parity, and likewise for columns. Periphery links wrap an outgoing
// edge onto the adjacent counter-flow row or column, so the whole fabric
// stays one strongly connected circulation. The injecting gateway replaces
// the left wrap of rows {0,1}; the NE gateway, when a variant has one,
// replaces the right wrap of rows {n-2,n-1}.

#include <string>
#include <vector>

#include "hsfsim/types.hpp"

namespace hsf {

struct GridSpec {
  int n = 10;
  Variant variant{};
};

inline bool in_grid(int n, Coord c) {
  return c.x >= 0 && c.x < n && c.y >= 0 && c.y < n;
}

inline void validate_grid(const GridSpec& spec) {
  if (spec.n < 2 || spec.n % 2 != 0)
    throw std::invalid_argument("grid side must be even and at least 2, got " +
                                std::to_string(spec.n));
  if (spec.variant.queue_slots < 0)
    throw std::invalid_argument("queue depth must be non-negative");
}

inline int node_count(const GridSpec& spec) { return spec.n * spec.n; }

inline int node_index(int n, Coord c) { return c.y * n + c.x; }

inline Coord coord_at(int n, int idx) { return {idx % n, idx / n}; }

inline Orientation orientation(int n, Coord c) {
  if (!in_grid(n, c))
    throw std::invalid_argument("coordinate " + to_string(c) +
                                " outside " + std::to_string(n) + "x" +
                                std::to_string(n) + " grid");
  return {c.y % 2 == 0 ? HDir::East : HDir::West,
          c.x % 2 == 0 ? VDir::North : VDir::South};
}

// Where one node output leads: either another node's input on some axis, or
// a gateway sink.
struct LinkTarget {
  bool to_sink = false;
  Side sink_side = Side::West;
  Coord node{};
  Axis axis = Axis::Horizontal;

  friend bool operator==(const LinkTarget& a, const LinkTarget& b) {
    if (a.to_sink != b.to_sink) return false;
    if (a.to_sink) return a.sink_side == b.sink_side;
    return a.node == b.node && a.axis == b.axis;
  }
};

struct LinkTable {
  int n = 0;
  bool has_ne = false;
  std::vector<LinkTarget> out;  // 2 entries per node: [index*2 + axis]
  LinkTarget sw_source{};       // node input fed by the SW gateway source
  LinkTarget ne_source{};       // likewise for NE, valid only if has_ne

  const LinkTarget& out_of(Coord c, Axis a) const {
    return out[static_cast<size_t>(node_index(n, c)) * 2 +
               static_cast<size_t>(a)];
  }

  bool has_gateway(Side s) const { return s == Side::West || has_ne; }

  const LinkTarget& source_target(Side s) const {
    if (s == Side::West) return sw_source;
    if (!has_ne)
      throw std::invalid_argument("variant has no NE gateway");
    return ne_source;
  }
};

inline LinkTable build_links(const GridSpec& spec) {
  validate_grid(spec);
  const int n = spec.n;
  LinkTable t;
  t.n = n;
  t.has_ne = spec.variant.ack_side == Side::East;
  t.out.resize(static_cast<size_t>(n) * n * 2);

  auto set = [&](Coord c, Axis a, LinkTarget tgt) {
    t.out[static_cast<size_t>(node_index(n, c)) * 2 + static_cast<size_t>(a)] =
        tgt;
  };
  auto to_node = [](Coord c, Axis a) {
    return LinkTarget{false, Side::West, c, a};
  };
  auto to_sink = [](Side s) {
    return LinkTarget{true, s, Coord{}, Axis::Horizontal};
  };

  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      const Coord c{x, y};
      // Horizontal output.
      if (y % 2 == 0) {  // eastbound row
        if (x < n - 1)
          set(c, Axis::Horizontal, to_node({x + 1, y}, Axis::Horizontal));
        else if (y == n - 2 && t.has_ne)
          set(c, Axis::Horizontal, to_sink(Side::East));
        else  // right wrap onto the westbound row above
          set(c, Axis::Horizontal, to_node({n - 1, y + 1}, Axis::Horizontal));
      } else {  // westbound row
        if (x > 0)
          set(c, Axis::Horizontal, to_node({x - 1, y}, Axis::Horizontal));
        else if (y == 1)
          set(c, Axis::Horizontal, to_sink(Side::West));
        else  // left wrap onto the eastbound row below
          set(c, Axis::Horizontal, to_node({0, y - 1}, Axis::Horizontal));
      }
      // Vertical output.
      if (x % 2 == 0) {  // northbound column
        if (y < n - 1)
          set(c, Axis::Vertical, to_node({x, y + 1}, Axis::Vertical));
        else  // top wrap onto the southbound column to the right
          set(c, Axis::Vertical, to_node({x + 1, n - 1}, Axis::Vertical));
      } else {  // southbound column
        if (y > 0)
          set(c, Axis::Vertical, to_node({x, y - 1}, Axis::Vertical));
        else  // bottom wrap onto the northbound column to the left
          set(c, Axis::Vertical, to_node({x - 1, 0}, Axis::Vertical));
      }
    }
  }

  t.sw_source = to_node({0, 0}, Axis::Horizontal);
  if (t.has_ne) t.ne_source = to_node({n - 1, n - 1}, Axis::Horizontal);
  return t;
}

struct GatewayAttachment {
  Side side;
  Coord source_feeds;   // node input the gateway source injects into
  Coord sink_fed_by;    // node whose horizontal output feeds the sink
};

inline std::vector<GatewayAttachment> gateway_attachments(
    const GridSpec& spec) {
  validate_grid(spec);
  const int n = spec.n;
  std::vector<GatewayAttachment> out;
  out.push_back({Side::West, Coord{0, 0}, Coord{0, 1}});
  if (spec.variant.ack_side == Side::East)
    out.push_back({Side::East, Coord{n - 1, n - 1}, Coord{n - 1, n - 2}});
  return out;
}

}  // namespace hsf
