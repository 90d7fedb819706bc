#pragma once

#include <optional>
#include <vector>

#include "hsfsim/routing.hpp"
#include "hsfsim/types.hpp"

namespace hsf {

// One controller: a processing slot plus an optional FIFO queue behind it.
// The slot holds the packet the node is acting on; queued packets wait for
// promotion and have no say in routing (except as the parallel variant's
// fallback transmission).
struct NodeState {
  std::optional<Packet> slot;
  std::vector<Packet> queue;

  int held() const {
    return (slot ? 1 : 0) + static_cast<int>(queue.size());
  }
  bool well_formed() const { return queue.empty() || slot.has_value(); }
};

inline int capacity_free(const NodeState& s, const Variant& v) {
  return 1 + v.queue_slots - s.held();
}

enum class IntentKind : uint8_t { Deliver, Emit, Send };

struct Intent {
  IntentKind kind = IntentKind::Send;
  bool secondary = false;
  Axis out_axis = Axis::Horizontal;
  int queue_pos = -1;  // -1: the slot packet; otherwise an index into queue
};

// The node's legal actions this tick, derived from the slot packet. A
// deliverable slot packet (configuration at its own address, or an ack at
// its exit node) yields one internal intent and suppresses any send. A
// parallel node whose queue holds a packet routed to the other output adds
// one fallback send for the first such packet.
inline std::vector<Intent> select_intents(const NodeState& s, const Variant& v,
                                          int n, Coord self) {
  std::vector<Intent> out;
  if (!s.slot) return out;
  const Packet& p = *s.slot;
  if (p.dest == self) {
    out.push_back({p.kind == PacketKind::Config ? IntentKind::Deliver
                                                : IntentKind::Emit,
                   false, Axis::Horizontal, -1});
    return out;
  }
  const Orientation o = orientation(n, self);
  const Axis primary = map_to_output(o, route_decision(self, p.dest));
  out.push_back({IntentKind::Send, false, primary, -1});
  if (v.parallel) {
    for (size_t i = 0; i < s.queue.size(); ++i) {
      const Packet& q = s.queue[i];
      if (q.dest == self) continue;
      const Axis axis = map_to_output(o, route_decision(self, q.dest));
      if (axis != primary) {
        out.push_back({IntentKind::Send, true, axis, static_cast<int>(i)});
        break;
      }
    }
  }
  return out;
}

// Placement of an admitted packet. Admission control happens against
// start-of-tick capacity at the engine level; this only guards the hard
// bound.
inline void commit_receive(NodeState& s, const Variant& v, const Packet& p) {
  if (s.held() >= 1 + v.queue_slots)
    throw invariant_error("receive beyond node capacity");
  if (!s.slot)
    s.slot = p;
  else
    s.queue.push_back(p);
}

// Remove the packet an admitted send carries. Sending the slot packet
// promotes the queue head; a fallback send plucks its packet out of the
// queue and leaves the slot alone.
inline Packet commit_send(NodeState& s, const Intent& intent) {
  if (intent.queue_pos < 0) {
    if (!s.slot) throw invariant_error("send from an empty slot");
    Packet p = *s.slot;
    s.slot.reset();
    if (!s.queue.empty()) {
      s.slot = s.queue.front();
      s.queue.erase(s.queue.begin());
    }
    return p;
  }
  if (intent.queue_pos >= static_cast<int>(s.queue.size()))
    throw invariant_error("send from a vacant queue position");
  Packet p = s.queue[static_cast<size_t>(intent.queue_pos)];
  s.queue.erase(s.queue.begin() + intent.queue_pos);
  return p;
}

// Consume the configuration in the slot and replace it with the ack it
// earns. The fresh ack acts no earlier than the next tick.
inline uint32_t commit_deliver(NodeState& s, Coord self, const AckRoute& route,
                               uint32_t ack_id, uint32_t tick) {
  if (!s.slot || s.slot->kind != PacketKind::Config || s.slot->dest != self)
    throw invariant_error("deliver without a deliverable configuration");
  const uint32_t config_id = s.slot->id;
  s.slot = Packet{ack_id, PacketKind::Ack, route.dest, route.exit, tick};
  return config_id;
}

}  // namespace hsf
