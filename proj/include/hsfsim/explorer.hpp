#pragma once

#include <cstring>
#include <utility>
#include <vector>

#include "hsfsim/engine.hpp"

namespace hsf {

struct ExploreBounds {
  uint64_t max_states = 50000000;
  uint32_t max_depth = 0;       // 0: unbounded
  uint32_t sequence_prefix = 0; // 0: the whole sequence
};

enum class VerdictKind : uint8_t {
  DeadlockFree,
  DeadlockReachable,
  BoundExceeded,
};

inline const char* verdict_name(VerdictKind k) {
  switch (k) {
    case VerdictKind::DeadlockFree: return "DeadlockFree";
    case VerdictKind::DeadlockReachable: return "DeadlockReachable";
    case VerdictKind::BoundExceeded: return "BoundExceeded";
  }
  return "?";
}

// DeadlockReachable carries a resolver script: feeding it to the engine via
// ScriptResolver from the same initial world replays the shortest stalling
// run tick for tick, hitting the stall at deadlock_tick.
struct Verdict {
  VerdictKind kind = VerdictKind::DeadlockFree;
  uint64_t states_explored = 0;
  uint32_t deadlock_tick = 0;
  std::vector<uint32_t> script;
};

// Resolver that enumerates instead of sampling: follows a prescribed digit
// string, defaults to 0 past its end, and records every consulted choice
// point with its option count so the caller can advance odometer-style.
struct ProbeResolver {
  const std::vector<uint32_t>* prescribed;
  std::vector<uint32_t> taken;
  std::vector<uint32_t> radices;

  explicit ProbeResolver(const std::vector<uint32_t>* p) : prescribed(p) {}

  uint32_t pick(uint32_t options) {
    const size_t i = radices.size();
    radices.push_back(options);
    uint32_t v = 0;
    if (prescribed && i < prescribed->size()) v = (*prescribed)[i];
    taken.push_back(v);
    return v;
  }
};

namespace detail {

// Positional byte image of everything the dynamics can see: each node's
// slot and queue places (packet destination + kind), the injection cursor,
// and the sunk-ack count. Packet ids and ages are deliberately absent —
// two states that differ only there behave identically forever.
struct StateCodec {
  int n = 0;
  int places = 1;
  bool wide = false;
  size_t size = 0;

  explicit StateCodec(const GridSpec& spec)
      : n(spec.n),
        places(1 + spec.variant.queue_slots),
        wide(spec.n > 11),
        size(static_cast<size_t>(node_count(spec)) * (1 + spec.variant.queue_slots) *
                 (spec.n > 11 ? 2 : 1) +
             4) {}

  void encode(const World& w, uint8_t* out) const {
    size_t pos = 0;
    auto put = [&](const Packet* p) {
      uint32_t v = 0;
      if (p) {
        v = 1u + static_cast<uint32_t>(node_index(n, p->dest));
        if (p->kind == PacketKind::Ack) v |= wide ? 0x8000u : 0x80u;
      }
      out[pos++] = static_cast<uint8_t>(v & 0xFF);
      if (wide) out[pos++] = static_cast<uint8_t>(v >> 8);
    };
    for (const NodeState& node : w.nodes) {
      put(node.slot ? &*node.slot : nullptr);
      for (int q = 0; q < places - 1; ++q)
        put(q < static_cast<int>(node.queue.size()) ? &node.queue[q] : nullptr);
    }
    out[pos++] = static_cast<uint8_t>(w.gw.next & 0xFF);
    out[pos++] = static_cast<uint8_t>(w.gw.next >> 8);
    out[pos++] = static_cast<uint8_t>(w.gw.acks_received & 0xFF);
    out[pos++] = static_cast<uint8_t>(w.gw.acks_received >> 8);
  }

  void decode(const uint8_t* in, World& w) const {
    size_t pos = 0;
    uint32_t acks_on_board = 0;
    const uint32_t ack_bit = wide ? 0x8000u : 0x80u;
    auto get = [&]() -> uint32_t {
      uint32_t v = in[pos++];
      if (wide) v |= static_cast<uint32_t>(in[pos++]) << 8;
      return v;
    };
    for (NodeState& node : w.nodes) {
      node.slot.reset();
      node.queue.clear();
      for (int q = 0; q < places; ++q) {
        const uint32_t v = get();
        if (!v) continue;
        const bool is_ack = (v & ack_bit) != 0;
        const Coord dest = coord_at(n, static_cast<int>((v & ~ack_bit) - 1));
        const Packet p{0, is_ack ? PacketKind::Ack : PacketKind::Config, dest,
                       is_ack ? w.ack.exit : Side::West, 0};
        if (q == 0)
          node.slot = p;
        else
          node.queue.push_back(p);
        if (is_ack) ++acks_on_board;
      }
    }
    w.gw.next = static_cast<uint32_t>(in[pos]) |
                (static_cast<uint32_t>(in[pos + 1]) << 8);
    w.gw.acks_received = static_cast<uint32_t>(in[pos + 2]) |
                         (static_cast<uint32_t>(in[pos + 3]) << 8);
    w.configs_delivered = w.gw.acks_received + acks_on_board;
    w.acks_created = w.configs_delivered;
    w.tick = 1;
  }
};

// Append-only state arena with an open-addressing id table on top.
struct StateStore {
  static constexpr uint32_t kEmpty = UINT32_MAX;

  size_t stride;
  std::vector<uint8_t> arena;
  std::vector<uint32_t> parents;
  std::vector<uint32_t> table;
  size_t count = 0;

  explicit StateStore(size_t stride_) : stride(stride_), table(1u << 16, kEmpty) {}

  const uint8_t* at(uint32_t id) const { return arena.data() + id * stride; }

  static uint64_t hash(const uint8_t* b, size_t len) {
    uint64_t h = 1469598103934665603ULL;
    for (size_t i = 0; i < len; ++i) {
      h ^= b[i];
      h *= 1099511628211ULL;
    }
    return h;
  }

  void grow_if_needed() {
    if ((count + 1) * 2 < table.size()) return;
    std::vector<uint32_t> bigger(table.size() * 2, kEmpty);
    const uint64_t mask = bigger.size() - 1;
    for (uint32_t id = 0; id < count; ++id) {
      uint64_t idx = hash(at(id), stride) & mask;
      while (bigger[idx] != kEmpty) idx = (idx + 1) & mask;
      bigger[idx] = id;
    }
    table.swap(bigger);
  }

  std::pair<uint32_t, bool> insert(const uint8_t* b, uint32_t parent) {
    grow_if_needed();
    const uint64_t mask = table.size() - 1;
    uint64_t idx = hash(b, stride) & mask;
    while (table[idx] != kEmpty) {
      if (std::memcmp(at(table[idx]), b, stride) == 0)
        return {table[idx], false};
      idx = (idx + 1) & mask;
    }
    const uint32_t id = static_cast<uint32_t>(count++);
    arena.insert(arena.end(), b, b + stride);
    parents.push_back(parent);
    table[idx] = id;
    return {id, true};
  }
};

// Re-derives the choice digits that turn state `from` into state `to` in
// one tick, appending them to `out`.
inline void derive_edge_digits(const StateCodec& codec, const uint8_t* from,
                               const uint8_t* to, World& work,
                               std::vector<uint8_t>& buf,
                               std::vector<uint32_t>& out) {
  std::vector<uint32_t> digits;
  while (true) {
    codec.decode(from, work);
    ProbeResolver probe(&digits);
    step(work, probe);
    codec.encode(work, buf.data());
    if (std::memcmp(buf.data(), to, codec.size) == 0) {
      out.insert(out.end(), probe.taken.begin(), probe.taken.end());
      return;
    }
    int p = static_cast<int>(probe.taken.size()) - 1;
    while (p >= 0 && probe.taken[p] + 1 >= probe.radices[p]) --p;
    if (p < 0) throw invariant_error("search trace reconstruction failed");
    digits.assign(probe.taken.begin(), probe.taken.begin() + p + 1);
    ++digits[p];
  }
}

}  // namespace detail

// Breadth-first search over every contention resolution. Each stored state
// is expanded by rerunning the tick once per choice-digit string; a tick
// that reports a stall marks its state as a reachable deadlock, and the
// parent chain is re-derived into the resolver script that reaches it.
inline Verdict explore(const GridSpec& spec, const LinkTable& links,
                       const std::vector<Coord>& seq, EngineOptions opts = {},
                       ExploreBounds bounds = {}) {
  World base = make_world(spec, links, seq, opts, bounds.sequence_prefix);
  const detail::StateCodec codec(spec);
  detail::StateStore store(codec.size);
  std::vector<uint8_t> buf(codec.size), cur(codec.size);

  codec.encode(base, buf.data());
  store.insert(buf.data(), detail::StateStore::kEmpty);

  World work = base;
  std::vector<uint32_t> digits;

  uint32_t depth = 0;
  size_t layer_end = 1;

  for (uint32_t head = 0; head < store.count; ++head) {
    if (head == layer_end) {
      ++depth;
      layer_end = store.count;
      if (bounds.max_depth && depth > bounds.max_depth)
        return {VerdictKind::BoundExceeded, store.count, 0, {}};
    }
    std::memcpy(cur.data(), store.at(head), codec.size);
    digits.clear();
    while (true) {
      codec.decode(cur.data(), work);
      ProbeResolver probe(&digits);
      const StepReport rep = step(work, probe);
      if (rep.deadlock) {
        Verdict v{VerdictKind::DeadlockReachable, store.count, 0, {}};
        std::vector<uint32_t> chain;
        for (uint32_t id = head; id != detail::StateStore::kEmpty;
             id = store.parents[id])
          chain.push_back(id);
        std::reverse(chain.begin(), chain.end());
        for (size_t i = 0; i + 1 < chain.size(); ++i)
          detail::derive_edge_digits(codec, store.at(chain[i]),
                                     store.at(chain[i + 1]), work, buf,
                                     v.script);
        v.deadlock_tick = static_cast<uint32_t>(chain.size());
        return v;
      }
      if (rep.actions > 0) {
        codec.encode(work, buf.data());
        const auto [id, fresh] = store.insert(buf.data(), head);
        (void)id;
        if (fresh && store.count > bounds.max_states)
          return {VerdictKind::BoundExceeded, store.count, 0, {}};
      }
      int p = static_cast<int>(probe.taken.size()) - 1;
      while (p >= 0 && probe.taken[p] + 1 >= probe.radices[p]) --p;
      if (p < 0) break;
      digits.assign(probe.taken.begin(), probe.taken.begin() + p + 1);
      ++digits[p];
    }
  }
  return {VerdictKind::DeadlockFree, store.count, 0, {}};
}

}  // namespace hsf
