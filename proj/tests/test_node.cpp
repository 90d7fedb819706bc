#include <catch2/catch_amalgamated.hpp>

#include "hsfsim/node.hpp"

using namespace hsf;

namespace {
Packet config(uint32_t id, Coord dest) {
  return {id, PacketKind::Config, dest, Side::West, 0};
}
Packet ack(uint32_t id, Coord dest, Side exit) {
  return {id, PacketKind::Ack, dest, exit, 0};
}
}  // namespace

TEST_CASE("free capacity counts slot and queue", "[node]") {
  NodeState s;
  CHECK(capacity_free(s, variants::basic()) == 1);
  s.slot = config(1, {3, 3});
  CHECK(capacity_free(s, variants::basic()) == 0);

  NodeState q;
  q.slot = config(1, {3, 3});
  q.queue = {config(2, {4, 4}), config(3, {5, 5})};
  CHECK(capacity_free(q, variants::queue(5)) == 3);
  CHECK(q.well_formed());
}

TEST_CASE("idle node offers nothing", "[node]") {
  CHECK(select_intents(NodeState{}, variants::basic(), 10, {4, 4}).empty());
}

TEST_CASE("deliverable slot packet yields one internal intent", "[node]") {
  NodeState s;
  s.slot = config(7, {0, 0});
  auto intents = select_intents(s, variants::basic(), 10, {0, 0});
  REQUIRE(intents.size() == 1);
  CHECK(intents[0].kind == IntentKind::Deliver);

  NodeState e;
  e.slot = ack(9, {0, 1}, Side::West);
  intents = select_intents(e, variants::basic(), 10, {0, 1});
  REQUIRE(intents.size() == 1);
  CHECK(intents[0].kind == IntentKind::Emit);

  // No sends accompany an internal intent even in parallel mode.
  NodeState p;
  p.slot = config(1, {2, 2});
  p.queue = {config(2, {5, 3})};
  intents = select_intents(p, variants::parallel(), 10, {2, 2});
  REQUIRE(intents.size() == 1);
  CHECK(intents[0].kind == IntentKind::Deliver);
}

TEST_CASE("slot packet routed through the flow-matching output", "[node]") {
  // (2,7) sits on a westbound row; moving right must detour vertically.
  NodeState s;
  s.slot = config(3, {5, 3});
  auto intents = select_intents(s, variants::basic(), 10, {2, 7});
  REQUIRE(intents.size() == 1);
  CHECK(intents[0].kind == IntentKind::Send);
  CHECK_FALSE(intents[0].secondary);
  CHECK(intents[0].out_axis == Axis::Vertical);
  CHECK(intents[0].queue_pos == -1);

  // (2,6) is eastbound, so the same movement uses the horizontal output.
  intents = select_intents(s, variants::basic(), 10, {2, 6});
  REQUIRE(intents.size() == 1);
  CHECK(intents[0].out_axis == Axis::Horizontal);
}

TEST_CASE("parallel node adds a fallback for the other output", "[node]") {
  // At (4,4): dest (6,4) routes right (horizontal), dest (4,7) routes up
  // (vertical).
  NodeState s;
  s.slot = config(1, {6, 4});
  s.queue = {config(2, {4, 7})};
  auto intents = select_intents(s, variants::parallel(), 10, {4, 4});
  REQUIRE(intents.size() == 2);
  CHECK(intents[0].out_axis == Axis::Horizontal);
  CHECK_FALSE(intents[0].secondary);
  CHECK(intents[1].out_axis == Axis::Vertical);
  CHECK(intents[1].secondary);
  CHECK(intents[1].queue_pos == 0);

  // A queue packet routed to the same output adds nothing.
  NodeState same;
  same.slot = config(1, {6, 4});
  same.queue = {config(2, {7, 4})};
  intents = select_intents(same, variants::parallel(), 10, {4, 4});
  CHECK(intents.size() == 1);

  // Without the parallel flag the queue never transmits.
  intents = select_intents(s, variants::queue(1), 10, {4, 4});
  CHECK(intents.size() == 1);

  // A queued packet deliverable here is not a fallback candidate.
  NodeState del;
  del.slot = config(1, {6, 4});
  del.queue = {config(2, {4, 4})};
  intents = select_intents(del, variants::parallel(), 10, {4, 4});
  CHECK(intents.size() == 1);
}

TEST_CASE("receive fills slot first then queue", "[node]") {
  NodeState s;
  commit_receive(s, variants::queue(1), config(1, {5, 5}));
  REQUIRE(s.slot.has_value());
  CHECK(s.slot->id == 1);
  commit_receive(s, variants::queue(1), config(2, {6, 6}));
  REQUIRE(s.queue.size() == 1);
  CHECK(s.queue[0].id == 2);
  CHECK(s.well_formed());
  CHECK_THROWS_AS(commit_receive(s, variants::queue(1), config(3, {7, 7})),
                  invariant_error);

  NodeState b;
  b.slot = config(1, {5, 5});
  CHECK_THROWS_AS(commit_receive(b, variants::basic(), config(2, {6, 6})),
                  invariant_error);
}

TEST_CASE("send removes the slot packet and promotes the queue head",
          "[node]") {
  NodeState s;
  s.slot = config(1, {5, 5});
  s.queue = {config(2, {6, 6}), config(3, {7, 7})};

  Packet sent = commit_send(s, Intent{IntentKind::Send, false,
                                      Axis::Horizontal, -1});
  CHECK(sent.id == 1);
  REQUIRE(s.slot.has_value());
  CHECK(s.slot->id == 2);
  REQUIRE(s.queue.size() == 1);
  CHECK(s.queue[0].id == 3);
  CHECK(s.well_formed());

  NodeState lone;
  lone.slot = config(9, {5, 5});
  sent = commit_send(lone, Intent{IntentKind::Send, false, Axis::Vertical, -1});
  CHECK(sent.id == 9);
  CHECK_FALSE(lone.slot.has_value());
  CHECK_THROWS_AS(
      commit_send(lone, Intent{IntentKind::Send, false, Axis::Vertical, -1}),
      invariant_error);
}

TEST_CASE("fallback send leaves the slot untouched", "[node]") {
  NodeState s;
  s.slot = config(1, {5, 5});
  s.queue = {config(2, {6, 6})};
  Packet sent =
      commit_send(s, Intent{IntentKind::Send, true, Axis::Vertical, 0});
  CHECK(sent.id == 2);
  REQUIRE(s.slot.has_value());
  CHECK(s.slot->id == 1);
  CHECK(s.queue.empty());
}

TEST_CASE("delivery swaps the configuration for a fresh ack", "[node]") {
  NodeState s;
  s.slot = config(42, {3, 3});
  const AckRoute sw{{0, 1}, Side::West};
  const uint32_t consumed = commit_deliver(s, {3, 3}, sw, 142, 17);
  CHECK(consumed == 42);
  REQUIRE(s.slot.has_value());
  CHECK(s.slot->kind == PacketKind::Ack);
  CHECK(s.slot->id == 142);
  CHECK(s.slot->dest == Coord{0, 1});
  CHECK(s.slot->exit == Side::West);
  CHECK(s.slot->created_tick == 17);

  NodeState ne;
  ne.slot = config(5, {1, 1});
  const AckRoute r{{3, 2}, Side::East};
  commit_deliver(ne, {1, 1}, r, 21, 3);
  CHECK(ne.slot->dest == Coord{3, 2});
  CHECK(ne.slot->exit == Side::East);

  // Wrong address or wrong kind is a contract breach.
  NodeState wrong;
  wrong.slot = config(1, {2, 2});
  CHECK_THROWS_AS(commit_deliver(wrong, {3, 3}, sw, 2, 0), invariant_error);
  wrong.slot = ack(1, {0, 1}, Side::West);
  CHECK_THROWS_AS(commit_deliver(wrong, {0, 1}, sw, 2, 0), invariant_error);
}
