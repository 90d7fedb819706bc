#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <queue>
#include <set>

#include "hsfsim/grid.hpp"

using namespace hsf;

TEST_CASE("orientation follows row and column parity", "[grid]") {
  CHECK(orientation(10, {0, 0}) == Orientation{HDir::East, VDir::North});
  CHECK(orientation(10, {1, 1}) == Orientation{HDir::West, VDir::South});
  CHECK(orientation(10, {2, 2}) == Orientation{HDir::East, VDir::North});
  CHECK(orientation(4, {3, 2}) == Orientation{HDir::East, VDir::South});
  CHECK(orientation(4, {0, 3}) == Orientation{HDir::West, VDir::North});
  CHECK_THROWS_AS(orientation(4, {4, 0}), std::invalid_argument);
  CHECK_THROWS_AS(orientation(4, {0, -1}), std::invalid_argument);
}

TEST_CASE("grid spec validation rejects odd or tiny sides", "[grid]") {
  CHECK_THROWS_AS(validate_grid(GridSpec{7, variants::basic()}),
                  std::invalid_argument);
  CHECK_THROWS_AS(validate_grid(GridSpec{0, variants::basic()}),
                  std::invalid_argument);
  CHECK_THROWS_AS(validate_grid(GridSpec{1, variants::basic()}),
                  std::invalid_argument);
  CHECK_NOTHROW(validate_grid(GridSpec{2, variants::basic()}));
  CHECK_NOTHROW(validate_grid(GridSpec{10, variants::acks_ne()}));
}

TEST_CASE("periphery wraps on a 4x4 basic grid", "[grid]") {
  const GridSpec spec{4, variants::basic()};
  const LinkTable t = build_links(spec);

  // Left edge: row 1 feeds the gateway sink, row 3 wraps onto row 2.
  CHECK(t.out_of({0, 1}, Axis::Horizontal) ==
        LinkTarget{true, Side::West, {}, Axis::Horizontal});
  CHECK(t.out_of({0, 3}, Axis::Horizontal) ==
        LinkTarget{false, Side::West, {0, 2}, Axis::Horizontal});

  // Bottom edge: southbound column 1 wraps onto northbound column 0.
  CHECK(t.out_of({1, 0}, Axis::Vertical) ==
        LinkTarget{false, Side::West, {0, 0}, Axis::Vertical});
  CHECK(t.out_of({3, 0}, Axis::Vertical) ==
        LinkTarget{false, Side::West, {2, 0}, Axis::Vertical});

  // Top edge: northbound column 0 wraps onto southbound column 1.
  CHECK(t.out_of({0, 3}, Axis::Vertical) ==
        LinkTarget{false, Side::West, {1, 3}, Axis::Vertical});
  CHECK(t.out_of({2, 3}, Axis::Vertical) ==
        LinkTarget{false, Side::West, {3, 3}, Axis::Vertical});

  // Right edge without NE gateway: row 0 wraps onto row 1, row 2 onto row 3.
  CHECK(t.out_of({3, 0}, Axis::Horizontal) ==
        LinkTarget{false, Side::West, {3, 1}, Axis::Horizontal});
  CHECK(t.out_of({3, 2}, Axis::Horizontal) ==
        LinkTarget{false, Side::West, {3, 3}, Axis::Horizontal});

  // Interior links follow the flow direction.
  CHECK(t.out_of({1, 2}, Axis::Horizontal) ==
        LinkTarget{false, Side::West, {2, 2}, Axis::Horizontal});
  CHECK(t.out_of({2, 1}, Axis::Horizontal) ==
        LinkTarget{false, Side::West, {1, 1}, Axis::Horizontal});
  CHECK(t.out_of({2, 1}, Axis::Vertical) ==
        LinkTarget{false, Side::West, {2, 2}, Axis::Vertical});
  CHECK(t.out_of({1, 2}, Axis::Vertical) ==
        LinkTarget{false, Side::West, {1, 1}, Axis::Vertical});

  CHECK(t.out.size() == 32);
  CHECK_FALSE(t.has_ne);
  CHECK(t.sw_source == LinkTarget{false, Side::West, {0, 0}, Axis::Horizontal});
  CHECK_THROWS_AS(t.source_target(Side::East), std::invalid_argument);
}

TEST_CASE("NE gateway replaces the top right wrap", "[grid]") {
  const GridSpec spec{4, variants::acks_ne()};
  const LinkTable t = build_links(spec);

  CHECK(t.has_ne);
  CHECK(t.out_of({3, 2}, Axis::Horizontal) ==
        LinkTarget{true, Side::East, {}, Axis::Horizontal});
  CHECK(t.source_target(Side::East) ==
        LinkTarget{false, Side::West, {3, 3}, Axis::Horizontal});
  // Lower right wrap is untouched.
  CHECK(t.out_of({3, 0}, Axis::Horizontal) ==
        LinkTarget{false, Side::West, {3, 1}, Axis::Horizontal});

  const auto atts = gateway_attachments(spec);
  REQUIRE(atts.size() == 2);
  CHECK(atts[0].side == Side::West);
  CHECK(atts[0].source_feeds == Coord{0, 0});
  CHECK(atts[0].sink_fed_by == Coord{0, 1});
  CHECK(atts[1].side == Side::East);
  CHECK(atts[1].source_feeds == Coord{3, 3});
  CHECK(atts[1].sink_fed_by == Coord{3, 2});

  const auto basic_atts = gateway_attachments(GridSpec{10, variants::basic()});
  REQUIRE(basic_atts.size() == 1);
  CHECK(basic_atts[0].side == Side::West);
}

namespace {

// Each node input must be fed by exactly one output or gateway source, and
// each sink by exactly one output.
void check_link_bijection(const GridSpec& spec) {
  const int n = spec.n;
  const LinkTable t = build_links(spec);
  std::map<std::pair<int, int>, int> input_feeds;  // (node, axis) -> count
  int sw_sink_feeds = 0, ne_sink_feeds = 0;

  auto count_target = [&](const LinkTarget& tgt) {
    if (tgt.to_sink) {
      (tgt.sink_side == Side::West ? sw_sink_feeds : ne_sink_feeds)++;
    } else {
      REQUIRE(in_grid(n, tgt.node));
      input_feeds[{node_index(n, tgt.node), static_cast<int>(tgt.axis)}]++;
    }
  };

  for (int i = 0; i < n * n; ++i) {
    count_target(t.out_of(coord_at(n, i), Axis::Horizontal));
    count_target(t.out_of(coord_at(n, i), Axis::Vertical));
  }
  count_target(t.sw_source);
  if (t.has_ne) count_target(t.ne_source);

  REQUIRE(static_cast<int>(input_feeds.size()) == 2 * n * n);
  for (const auto& [key, count] : input_feeds) CHECK(count == 1);
  CHECK(sw_sink_feeds == 1);
  CHECK(ne_sink_feeds == (t.has_ne ? 1 : 0));
}

// Strong connectivity of nodes plus gateway vertices: BFS forward and
// backward from node 0 must reach everything.
void check_strongly_connected(const GridSpec& spec) {
  const int n = spec.n;
  const LinkTable t = build_links(spec);
  const int sw = n * n, ne = n * n + 1;
  const int vertices = n * n + (t.has_ne ? 2 : 1);

  std::vector<std::vector<int>> fwd(vertices), bwd(vertices);
  auto add_edge = [&](int u, int v) {
    fwd[u].push_back(v);
    bwd[v].push_back(u);
  };
  for (int i = 0; i < n * n; ++i) {
    for (Axis a : {Axis::Horizontal, Axis::Vertical}) {
      const LinkTarget& tgt = t.out_of(coord_at(n, i), a);
      if (tgt.to_sink)
        add_edge(i, tgt.sink_side == Side::West ? sw : ne);
      else
        add_edge(i, node_index(n, tgt.node));
    }
  }
  add_edge(sw, node_index(n, t.sw_source.node));
  if (t.has_ne) add_edge(ne, node_index(n, t.ne_source.node));

  auto bfs_count = [&](const std::vector<std::vector<int>>& adj) {
    std::vector<char> seen(vertices, 0);
    std::queue<int> q;
    q.push(0);
    seen[0] = 1;
    int reached = 1;
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      for (int v : adj[u])
        if (!seen[v]) {
          seen[v] = 1;
          ++reached;
          q.push(v);
        }
    }
    return reached;
  };
  CHECK(bfs_count(fwd) == vertices);
  CHECK(bfs_count(bwd) == vertices);
}

}  // namespace

TEST_CASE("link structure is a bijection and strongly connected", "[grid]") {
  for (int n : {2, 4, 6, 8, 10, 12}) {
    for (Variant v : {variants::basic(), variants::acks_ne(),
                      variants::queue(1), variants::acks_ne_queue(1)}) {
      INFO("n=" << n << " variant=" << variant_name(v));
      check_link_bijection({n, v});
      check_strongly_connected({n, v});
    }
  }
}

TEST_CASE("node indexing round-trips", "[grid]") {
  for (int n : {2, 4, 10}) {
    for (int i = 0; i < n * n; ++i) {
      CHECK(node_index(n, coord_at(n, i)) == i);
    }
  }
}
