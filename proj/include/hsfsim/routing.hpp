#pragma once

#include "hsfsim/grid.hpp"
#include "hsfsim/types.hpp"

namespace hsf {

enum class LogicalAction : uint8_t { Deliver, Up, Down, Left, Right };

inline const char* to_string(LogicalAction a) {
  switch (a) {
    case LogicalAction::Deliver: return "deliver";
    case LogicalAction::Up: return "up";
    case LogicalAction::Down: return "down";
    case LogicalAction::Left: return "left";
    case LogicalAction::Right: return "right";
  }
  return "?";
}

// Dimension-ordered routing adapted to the alternating grid: approach the
// destination column from the west, with one parity-aware early climb at
// column a-1 so that odd destination columns are entered from the row of
// the destination itself. Total over all coordinate pairs.
inline LogicalAction route_decision(Coord cur, Coord dest) {
  const int x = cur.x, y = cur.y, a = dest.x, b = dest.y;
  if (x == a) {
    if (y == b) return LogicalAction::Deliver;
    return y < b ? LogicalAction::Up : LogicalAction::Down;
  }
  if (x < a - 1) return LogicalAction::Right;
  if (x == a - 1)
    return (x % 2 == 0 && y < b) ? LogicalAction::Up : LogicalAction::Right;
  // x > a
  if (y == b) return LogicalAction::Left;
  return y < b ? LogicalAction::Up : LogicalAction::Left;
}

// A node can only transmit the way its row and column flow. A movement
// along the flow uses that axis directly; a movement against it detours on
// the other axis, trusting the next node (or a periphery wrap) to make up
// the difference.
inline Axis map_to_output(Orientation o, LogicalAction act) {
  switch (act) {
    case LogicalAction::Right:
      return o.h == HDir::East ? Axis::Horizontal : Axis::Vertical;
    case LogicalAction::Left:
      return o.h == HDir::West ? Axis::Horizontal : Axis::Vertical;
    case LogicalAction::Up:
      return o.v == VDir::North ? Axis::Vertical : Axis::Horizontal;
    case LogicalAction::Down:
      return o.v == VDir::South ? Axis::Vertical : Axis::Horizontal;
    case LogicalAction::Deliver:
      break;
  }
  throw invariant_error("map_to_output called with a non-movement action");
}

// Acks are addressed to the node adjacent to their gateway sink and leave
// the grid through that node's horizontal output.
struct AckRoute {
  Coord dest;
  Side exit;

  friend bool operator==(const AckRoute& a, const AckRoute& b) {
    return a.dest == b.dest && a.exit == b.exit;
  }
};

inline AckRoute ack_route(const GridSpec& spec) {
  validate_grid(spec);
  if (spec.variant.ack_side == Side::West) return {{0, 1}, Side::West};
  return {{spec.n - 1, spec.n - 2}, Side::East};
}

}  // namespace hsf
