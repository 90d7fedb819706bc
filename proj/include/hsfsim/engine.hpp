#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hsfsim/gateway.hpp"
#include "hsfsim/grid.hpp"
#include "hsfsim/node.hpp"
#include "hsfsim/rng.hpp"
#include "hsfsim/routing.hpp"
#include "hsfsim/types.hpp"

namespace hsf {

// ----------------------------------------------------------------- events

enum class EventKind : uint8_t {
  Inject,
  Move,
  Deliver,
  AckCreate,
  AckSink,
  Stall,
};

inline const char* event_kind_name(EventKind k) {
  switch (k) {
    case EventKind::Inject: return "inject";
    case EventKind::Move: return "move";
    case EventKind::Deliver: return "deliver";
    case EventKind::AckCreate: return "ack_create";
    case EventKind::AckSink: return "ack_sink";
    case EventKind::Stall: return "stall";
  }
  return "?";
}

struct EventEndpoint {
  enum class Kind : uint8_t { None, Node, Gateway };
  Kind kind = Kind::None;
  Coord node{};
  Side side = Side::West;

  static EventEndpoint none() { return {}; }
  static EventEndpoint at(Coord c) { return {Kind::Node, c, Side::West}; }
  static EventEndpoint gateway(Side s) { return {Kind::Gateway, {}, s}; }

  friend bool operator==(const EventEndpoint& a, const EventEndpoint& b) {
    if (a.kind != b.kind) return false;
    if (a.kind == Kind::Node) return a.node == b.node;
    if (a.kind == Kind::Gateway) return a.side == b.side;
    return true;
  }
};

struct TraceEvent {
  uint32_t tick = 0;
  EventKind kind = EventKind::Move;
  EventEndpoint from{};
  EventEndpoint to{};
  uint32_t packet_id = 0;
  PacketKind packet_kind = PacketKind::Config;
  Coord dest{};

  friend bool operator==(const TraceEvent& a, const TraceEvent& b) {
    return a.tick == b.tick && a.kind == b.kind && a.from == b.from &&
           a.to == b.to && a.packet_id == b.packet_id &&
           a.packet_kind == b.packet_kind && a.dest == b.dest;
  }
};

// -------------------------------------------------------------- resolvers

// Every contested admission asks the resolver to pick one of `options`
// equally legal outcomes. Uncontested commits never consult it, so a
// replay script stays exactly as long as the run's genuine choice points.
struct RandomResolver {
  Rng rng;
  explicit RandomResolver(uint64_t seed) : rng(seed) {}
  uint32_t pick(uint32_t options) { return uniform_below(rng, options); }
};

struct ScriptResolver {
  const std::vector<uint32_t>* script = nullptr;
  size_t pos = 0;
  explicit ScriptResolver(const std::vector<uint32_t>& s) : script(&s) {}
  uint32_t pick(uint32_t options) {
    if (pos >= script->size())
      throw invariant_error("replay script exhausted");
    uint32_t v = (*script)[pos++];
    if (v >= options) throw invariant_error("replay choice out of range");
    return v;
  }
};

// ------------------------------------------------------------------ world

struct EngineOptions {
  int inject_rate = 1;
  bool dual_send = false;  // parallel nodes fire both outputs unconditionally
};

struct World {
  GridSpec spec{};
  const LinkTable* links = nullptr;
  const std::vector<Coord>* seq = nullptr;
  EngineOptions opts{};
  AckRoute ack{};
  uint32_t tick = 1;
  std::vector<NodeState> nodes;
  GatewayState gw{};
  uint32_t configs_delivered = 0;
  uint32_t acks_created = 0;

  NodeState& at(Coord c) {
    return nodes[static_cast<size_t>(node_index(spec.n, c))];
  }
  const NodeState& at(Coord c) const {
    return nodes[static_cast<size_t>(node_index(spec.n, c))];
  }
};

// `limit` truncates the injection sequence (0 keeps all of it); everything
// else about the world is the idle initial state.
inline World make_world(const GridSpec& spec, const LinkTable& links,
                        const std::vector<Coord>& seq, EngineOptions opts = {},
                        uint32_t limit = 0) {
  validate_grid(spec);
  if (opts.inject_rate < 1)
    throw std::invalid_argument("injection rate must be at least 1");
  World w;
  w.spec = spec;
  w.links = &links;
  w.seq = &seq;
  w.opts = opts;
  w.ack = ack_route(spec);
  w.nodes.assign(static_cast<size_t>(node_count(spec)), NodeState{});
  w.gw.seq_len = limit ? std::min<uint32_t>(limit, seq.size())
                       : static_cast<uint32_t>(seq.size());
  return w;
}

// ------------------------------------------------------------------- step

struct StepReport {
  uint32_t actions = 0;
  bool deadlock = false;
};

namespace detail {

inline uint64_t comb(uint32_t c, uint32_t k) {
  if (k > c) return 0;
  if (k > c - k) k = c - k;
  uint64_t r = 1;
  for (uint32_t i = 0; i < k; ++i) r = r * (c - i) / (i + 1);
  return r;
}

// Lexicographic unranking of the rank-th k-subset of {0..c-1}.
inline void unrank_subset(uint32_t c, uint32_t k, uint64_t rank,
                          std::vector<uint32_t>& out) {
  out.clear();
  for (uint32_t item = 0; k > 0; ++item) {
    const uint64_t with_item = comb(c - item - 1, k - 1);
    if (rank < with_item) {
      out.push_back(item);
      --k;
    } else {
      rank -= with_item;
    }
  }
}

struct SendCandidate {
  int sender = -1;       // node index; -1 for a gateway injection
  uint32_t gw_slot = 0;  // injection position within this tick
  Intent intent{};
  int receiver = 0;
  Axis in_axis = Axis::Horizontal;
};

struct AdmittedSend {
  SendCandidate cand;
  Packet packet{};  // filled at removal time for node senders
};

}  // namespace detail

// One lock-step tick. All intents derive from the start-of-tick state;
// admission happens per receiver against start-of-tick free capacity (the
// fallback round sees what the first round left over); commits land in a
// fixed order so identical resolver choices give identical worlds.
template <class Resolver>
StepReport step(World& w, Resolver& resolver,
                std::vector<TraceEvent>* trace = nullptr) {
  const int n = w.spec.n;
  const Variant& variant = w.spec.variant;
  const size_t count = w.nodes.size();

  std::vector<std::pair<int, IntentKind>> internals;
  std::vector<detail::SendCandidate> primary, fallback;

  for (size_t i = 0; i < count; ++i) {
    const Coord self = coord_at(n, static_cast<int>(i));
    for (const Intent& intent :
         select_intents(w.nodes[i], variant, n, self)) {
      if (intent.kind != IntentKind::Send) {
        internals.push_back({static_cast<int>(i), intent.kind});
        continue;
      }
      const LinkTarget& target = w.links->out_of(self, intent.out_axis);
      if (target.to_sink)
        throw invariant_error("packet routed into a gateway sink");
      detail::SendCandidate cand;
      cand.sender = static_cast<int>(i);
      cand.intent = intent;
      cand.receiver = node_index(n, target.node);
      cand.in_axis = target.axis;
      (intent.secondary ? fallback : primary).push_back(cand);
    }
  }

  const uint32_t injectable =
      w.gw.pending_empty()
          ? 0
          : std::min<uint32_t>(static_cast<uint32_t>(w.opts.inject_rate),
                               w.gw.seq_len - w.gw.next);
  for (uint32_t j = 0; j < injectable; ++j) {
    const LinkTarget& target = w.links->source_target(Side::West);
    detail::SendCandidate cand;
    cand.sender = -1;
    cand.gw_slot = j;
    cand.receiver = node_index(n, target.node);
    cand.in_axis = target.axis;
    primary.push_back(cand);
  }

  if (w.opts.dual_send) {
    primary.insert(primary.end(), fallback.begin(), fallback.end());
    fallback.clear();
  }

  std::vector<int> free_start(count);
  for (size_t i = 0; i < count; ++i)
    free_start[i] = capacity_free(w.nodes[i], variant);
  std::vector<int> admitted_into(count, 0);
  std::vector<char> primary_rejected(count, 0);
  std::vector<detail::AdmittedSend> admitted;

  auto run_round = [&](std::vector<detail::SendCandidate>& cands,
                       bool mark_rejects) {
    std::map<int, std::vector<uint32_t>> by_receiver;
    for (uint32_t idx = 0; idx < cands.size(); ++idx)
      by_receiver[cands[idx].receiver].push_back(idx);
    std::vector<uint32_t> chosen;
    for (auto& [receiver, indices] : by_receiver) {
      std::stable_sort(indices.begin(), indices.end(),
                       [&](uint32_t a, uint32_t b) {
                         return cands[a].in_axis < cands[b].in_axis;
                       });
      const uint32_t c = static_cast<uint32_t>(indices.size());
      const int cap = free_start[static_cast<size_t>(receiver)] -
                      admitted_into[static_cast<size_t>(receiver)];
      const uint32_t k = std::min<uint32_t>(c, cap > 0 ? cap : 0);
      chosen.clear();
      if (k == c) {
        for (uint32_t i = 0; i < c; ++i) chosen.push_back(i);
      } else if (k > 0) {
        const uint64_t rank = resolver.pick(
            static_cast<uint32_t>(detail::comb(c, k)));
        detail::unrank_subset(c, k, rank, chosen);
      }
      size_t next_chosen = 0;
      for (uint32_t i = 0; i < c; ++i) {
        const detail::SendCandidate& cand = cands[indices[i]];
        if (next_chosen < chosen.size() && chosen[next_chosen] == i) {
          ++next_chosen;
          admitted.push_back({cand, Packet{}});
          ++admitted_into[static_cast<size_t>(receiver)];
        } else if (mark_rejects && cand.sender >= 0) {
          primary_rejected[static_cast<size_t>(cand.sender)] = 1;
        }
      }
    }
  };

  run_round(primary, true);
  if (!fallback.empty()) {
    std::vector<detail::SendCandidate> eligible;
    for (const detail::SendCandidate& cand : fallback)
      if (primary_rejected[static_cast<size_t>(cand.sender)])
        eligible.push_back(cand);
    if (!eligible.empty()) run_round(eligible, false);
  }

  StepReport report;
  auto emit = [&](TraceEvent e) {
    if (trace) trace->push_back(e);
  };

  for (const auto& [idx, kind] : internals) {
    NodeState& node = w.nodes[static_cast<size_t>(idx)];
    const Coord self = coord_at(n, idx);
    if (kind == IntentKind::Deliver) {
      const uint32_t ack_id =
          node.slot->id + static_cast<uint32_t>(node_count(w.spec));
      const uint32_t config_id =
          commit_deliver(node, self, w.ack, ack_id, w.tick);
      ++w.configs_delivered;
      ++w.acks_created;
      emit({w.tick, EventKind::Deliver, EventEndpoint::at(self),
            EventEndpoint::at(self), config_id, PacketKind::Config, self});
      emit({w.tick, EventKind::AckCreate, EventEndpoint::at(self),
            EventEndpoint::at(self), ack_id, PacketKind::Ack, w.ack.dest});
    } else {
      const LinkTarget& out = w.links->out_of(self, Axis::Horizontal);
      if (!out.to_sink || out.sink_side != node.slot->exit)
        throw invariant_error("ack emitted away from its gateway sink");
      Intent slot_send;
      const Packet p = commit_send(node, slot_send);
      ++w.gw.acks_received;
      w.gw.last_ack_tick = w.tick;
      emit({w.tick, EventKind::AckSink, EventEndpoint::at(self),
            EventEndpoint::gateway(p.exit), p.id, PacketKind::Ack, p.dest});
    }
    ++report.actions;
  }

  // Queue extractions go first so their positions (fixed at intent time)
  // stay valid, then slot sends with their promotions, then arrivals.
  for (auto& adm : admitted)
    if (adm.cand.sender >= 0 && adm.cand.intent.queue_pos >= 0)
      adm.packet = commit_send(w.nodes[static_cast<size_t>(adm.cand.sender)],
                               adm.cand.intent);
  for (auto& adm : admitted)
    if (adm.cand.sender >= 0 && adm.cand.intent.queue_pos < 0)
      adm.packet = commit_send(w.nodes[static_cast<size_t>(adm.cand.sender)],
                               adm.cand.intent);

  std::stable_sort(admitted.begin(), admitted.end(),
                   [](const detail::AdmittedSend& a,
                      const detail::AdmittedSend& b) {
                     if (a.cand.receiver != b.cand.receiver)
                       return a.cand.receiver < b.cand.receiver;
                     return a.cand.in_axis < b.cand.in_axis;
                   });

  for (auto& adm : admitted) {
    const Coord to = coord_at(n, adm.cand.receiver);
    if (adm.cand.sender < 0) {
      adm.packet = Packet{w.gw.next, PacketKind::Config,
                          (*w.seq)[w.gw.next], Side::West, w.tick};
      ++w.gw.next;
      commit_receive(w.nodes[static_cast<size_t>(adm.cand.receiver)], variant,
                     adm.packet);
      emit({w.tick, EventKind::Inject, EventEndpoint::gateway(Side::West),
            EventEndpoint::at(to), adm.packet.id, adm.packet.kind,
            adm.packet.dest});
    } else {
      commit_receive(w.nodes[static_cast<size_t>(adm.cand.receiver)], variant,
                     adm.packet);
      emit({w.tick, EventKind::Move,
            EventEndpoint::at(coord_at(n, adm.cand.sender)),
            EventEndpoint::at(to), adm.packet.id, adm.packet.kind,
            adm.packet.dest});
    }
    ++report.actions;
  }

  if (report.actions == 0) {
    bool work_remains = !w.gw.pending_empty();
    for (size_t i = 0; !work_remains && i < count; ++i)
      work_remains = w.nodes[i].held() > 0;
    if (work_remains) {
      report.deadlock = true;
      emit({w.tick, EventKind::Stall, EventEndpoint::none(),
            EventEndpoint::none(), 0, PacketKind::Config, {0, 0}});
    }
  }

  ++w.tick;
  return report;
}

// ------------------------------------------------------------------- runs

struct RunResult {
  uint32_t acks = 0;
  uint32_t time = 0;  // completion tick; the horizon when the run fell short
  bool completed = false;
  bool deadlocked = false;
  uint32_t deadlock_tick = 0;
  uint64_t seed = 0;
};

template <class Resolver>
RunResult run(World& w, uint32_t horizon, Resolver& resolver,
              std::vector<TraceEvent>* trace = nullptr) {
  RunResult out;
  if (w.gw.complete()) {
    out.completed = true;
    out.acks = w.gw.acks_received;
    return out;
  }
  for (uint32_t t = 1; t <= horizon; ++t) {
    const StepReport rep = step(w, resolver, trace);
    if (rep.deadlock) {
      out.deadlocked = true;
      out.deadlock_tick = w.tick - 1;
      break;
    }
    if (w.gw.complete()) {
      out.completed = true;
      out.time = w.tick - 1;
      break;
    }
  }
  out.acks = w.gw.acks_received;
  if (!out.completed) out.time = horizon;
  return out;
}

// ------------------------------------------------------------ consistency

inline void validate_world(const World& w) {
  const int n = w.spec.n;
  uint32_t configs_in_flight = 0, acks_in_flight = 0;
  for (size_t i = 0; i < w.nodes.size(); ++i) {
    const NodeState& node = w.nodes[i];
    if (!node.well_formed())
      throw invariant_error("queued packets behind an empty slot");
    if (node.held() > 1 + w.spec.variant.queue_slots)
      throw invariant_error("node holds more packets than it has room for");
    auto check_packet = [&](const Packet& p) {
      if (!in_grid(n, p.dest))
        throw invariant_error("packet destined outside the grid");
      if (p.kind == PacketKind::Ack) {
        if (!(p.dest == w.ack.dest) || p.exit != w.ack.exit)
          throw invariant_error("ack bound for the wrong exit");
        ++acks_in_flight;
      } else {
        ++configs_in_flight;
      }
    };
    if (node.slot) check_packet(*node.slot);
    for (const Packet& p : node.queue) check_packet(p);
  }
  if (w.gw.next > w.gw.seq_len || w.gw.acks_received > w.gw.seq_len)
    throw invariant_error("gateway counters ran past the sequence");
  if (w.gw.next != w.configs_delivered + configs_in_flight)
    throw invariant_error("configuration packets not conserved");
  if (w.acks_created != w.gw.acks_received + acks_in_flight)
    throw invariant_error("ack packets not conserved");
  if (w.acks_created != w.configs_delivered)
    throw invariant_error("ack count diverged from deliveries");
}

template <class Resolver>
RunResult run_checked(World& w, uint32_t horizon, Resolver& resolver,
                      std::vector<TraceEvent>* trace = nullptr) {
  RunResult out;
  validate_world(w);
  if (w.gw.complete()) {
    out.completed = true;
    out.acks = w.gw.acks_received;
    return out;
  }
  for (uint32_t t = 1; t <= horizon; ++t) {
    const StepReport rep = step(w, resolver, trace);
    validate_world(w);
    if (rep.deadlock) {
      out.deadlocked = true;
      out.deadlock_tick = w.tick - 1;
      break;
    }
    if (w.gw.complete()) {
      out.completed = true;
      out.time = w.tick - 1;
      break;
    }
  }
  out.acks = w.gw.acks_received;
  if (!out.completed) out.time = horizon;
  return out;
}

// --------------------------------------------------------- wait-for graph

struct WaitEdge {
  Coord from{};
  Coord to{};
  uint32_t packet_id = 0;
};

constexpr int kMaxCycleLen = 8;

// Node u waits on node v when u wants to send a packet whose admission
// target v has no free capacity right now. Cycles of such edges are what
// makes a stall permanent; they are enumerated elementarily up to
// kMaxCycleLen nodes, each reported once starting from its lowest node id.
struct WaitForGraph {
  std::vector<WaitEdge> edges;
  std::vector<std::vector<Coord>> cycles;
};

inline WaitForGraph wait_for_graph(const World& w) {
  const int n = w.spec.n;
  WaitForGraph g;
  std::vector<std::vector<int>> adj(w.nodes.size());
  for (size_t i = 0; i < w.nodes.size(); ++i) {
    const Coord self = coord_at(n, static_cast<int>(i));
    for (const Intent& intent :
         select_intents(w.nodes[i], w.spec.variant, n, self)) {
      if (intent.kind != IntentKind::Send) continue;
      const LinkTarget& target = w.links->out_of(self, intent.out_axis);
      if (target.to_sink) continue;
      const NodeState& other = w.at(target.node);
      if (capacity_free(other, w.spec.variant) > 0) continue;
      const Packet& p = intent.queue_pos < 0
                            ? *w.nodes[i].slot
                            : w.nodes[i].queue[static_cast<size_t>(
                                  intent.queue_pos)];
      g.edges.push_back({self, target.node, p.id});
      adj[i].push_back(node_index(n, target.node));
    }
  }
  std::vector<char> on_path(w.nodes.size(), 0);
  std::vector<int> path;
  auto dfs = [&](auto&& rec, int start, int u) -> void {
    for (int v : adj[static_cast<size_t>(u)]) {
      if (v == start && path.size() >= 2) {
        std::vector<Coord> cycle;
        for (int id : path) cycle.push_back(coord_at(n, id));
        g.cycles.push_back(std::move(cycle));
      } else if (v > start && !on_path[static_cast<size_t>(v)] &&
                 static_cast<int>(path.size()) < kMaxCycleLen) {
        on_path[static_cast<size_t>(v)] = 1;
        path.push_back(v);
        rec(rec, start, v);
        path.pop_back();
        on_path[static_cast<size_t>(v)] = 0;
      }
    }
  };
  for (size_t s = 0; s < w.nodes.size(); ++s) {
    if (adj[s].empty()) continue;
    path.assign(1, static_cast<int>(s));
    on_path.assign(w.nodes.size(), 0);
    on_path[s] = 1;
    dfs(dfs, static_cast<int>(s), static_cast<int>(s));
  }
  return g;
}

}  // namespace hsf
