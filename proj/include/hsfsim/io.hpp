#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hsfsim/engine.hpp"
#include "hsfsim/stats.hpp"

namespace hsf {

struct io_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ----------------------------------------------------------- event logs

constexpr const char* kEventLogHeader =
    "tick,kind,from,to,packet_id,packet_kind,dest";

namespace detail {

inline std::string endpoint_text(const EventEndpoint& e) {
  switch (e.kind) {
    case EventEndpoint::Kind::None: return "-";
    case EventEndpoint::Kind::Gateway: return to_string(e.side);
    case EventEndpoint::Kind::Node:
      return std::to_string(e.node.x) + ":" + std::to_string(e.node.y);
  }
  return "-";
}

[[noreturn]] inline void log_fail(int line_no, const std::string& line,
                                  const std::string& why) {
  throw io_error("event log line " + std::to_string(line_no) + " (\"" + line +
                 "\"): " + why);
}

inline bool parse_endpoint(const std::string& s, EventEndpoint& out) {
  if (s == "-") {
    out = EventEndpoint::none();
    return true;
  }
  if (s == "SW") {
    out = EventEndpoint::gateway(Side::West);
    return true;
  }
  if (s == "NE") {
    out = EventEndpoint::gateway(Side::East);
    return true;
  }
  const size_t colon = s.find(':');
  if (colon == std::string::npos) return false;
  try {
    out = EventEndpoint::at(
        {std::stoi(s.substr(0, colon)), std::stoi(s.substr(colon + 1))});
  } catch (const std::exception&) {
    return false;
  }
  return true;
}

inline bool parse_coord(const std::string& s, Coord& out) {
  EventEndpoint e;
  if (!parse_endpoint(s, e) || e.kind != EventEndpoint::Kind::Node)
    return false;
  out = e.node;
  return true;
}

inline std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> parts;
  size_t start = 0;
  for (;;) {
    const size_t pos = line.find(sep, start);
    if (pos == std::string::npos) {
      parts.push_back(line.substr(start));
      return parts;
    }
    parts.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

inline bool parse_event_kind(const std::string& s, EventKind& out) {
  for (EventKind k :
       {EventKind::Inject, EventKind::Move, EventKind::Deliver,
        EventKind::AckCreate, EventKind::AckSink, EventKind::Stall}) {
    if (s == event_kind_name(k)) {
      out = k;
      return true;
    }
  }
  return false;
}

}  // namespace detail

inline std::string write_event_log(const std::vector<TraceEvent>& events) {
  std::ostringstream out;
  out << kEventLogHeader << "\n";
  for (const TraceEvent& e : events) {
    out << e.tick << "," << event_kind_name(e.kind) << ","
        << detail::endpoint_text(e.from) << "," << detail::endpoint_text(e.to)
        << ",";
    if (e.kind == EventKind::Stall) {
      out << "-,-,-\n";
      continue;
    }
    out << e.packet_id << ","
        << (e.packet_kind == PacketKind::Config ? "config" : "ack") << ","
        << e.dest.x << ":" << e.dest.y << "\n";
  }
  return out.str();
}

inline std::vector<TraceEvent> parse_event_log(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  bool saw_header = false;
  std::vector<TraceEvent> events;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!saw_header) {
      if (line != kEventLogHeader)
        detail::log_fail(line_no, line, "expected header \"" +
                                            std::string(kEventLogHeader) +
                                            "\"");
      saw_header = true;
      continue;
    }
    const std::vector<std::string> f = detail::split(line, ',');
    if (f.size() != 7)
      detail::log_fail(line_no, line, "expected 7 fields, got " +
                                          std::to_string(f.size()));
    TraceEvent e;
    try {
      e.tick = static_cast<uint32_t>(std::stoul(f[0]));
    } catch (const std::exception&) {
      detail::log_fail(line_no, line, "bad tick \"" + f[0] + "\"");
    }
    if (!detail::parse_event_kind(f[1], e.kind))
      detail::log_fail(line_no, line, "unknown event kind \"" + f[1] + "\"");
    if (!detail::parse_endpoint(f[2], e.from))
      detail::log_fail(line_no, line, "bad endpoint \"" + f[2] + "\"");
    if (!detail::parse_endpoint(f[3], e.to))
      detail::log_fail(line_no, line, "bad endpoint \"" + f[3] + "\"");
    if (e.kind == EventKind::Stall) {
      if (f[4] != "-" || f[5] != "-" || f[6] != "-")
        detail::log_fail(line_no, line, "stall events carry no packet");
      events.push_back(e);
      continue;
    }
    try {
      e.packet_id = static_cast<uint32_t>(std::stoul(f[4]));
    } catch (const std::exception&) {
      detail::log_fail(line_no, line, "bad packet id \"" + f[4] + "\"");
    }
    if (f[5] == "config")
      e.packet_kind = PacketKind::Config;
    else if (f[5] == "ack")
      e.packet_kind = PacketKind::Ack;
    else
      detail::log_fail(line_no, line, "unknown packet kind \"" + f[5] + "\"");
    if (!detail::parse_coord(f[6], e.dest))
      detail::log_fail(line_no, line, "bad destination \"" + f[6] + "\"");
    events.push_back(e);
  }
  if (!saw_header) throw io_error("event log is missing its header line");
  return events;
}

// ------------------------------------------------------ wait-for graphs

// Graphviz rendering: every controller appears as a node, every wait as a
// directed edge; nodes and edges on a detected cycle are highlighted and
// each cycle is restated as a comment.
inline std::string write_dot(const GridSpec& spec, const WaitForGraph& g) {
  std::set<Coord> cycle_nodes;
  std::set<std::pair<Coord, Coord>> cycle_edges;
  for (const std::vector<Coord>& cycle : g.cycles)
    for (size_t i = 0; i < cycle.size(); ++i) {
      cycle_nodes.insert(cycle[i]);
      cycle_edges.insert({cycle[i], cycle[(i + 1) % cycle.size()]});
    }

  std::ostringstream out;
  out << "digraph wait_for {\n";
  for (const std::vector<Coord>& cycle : g.cycles) {
    out << "  // cycle:";
    for (const Coord& c : cycle) out << " " << to_string(c) << " ->";
    out << " " << to_string(cycle.front()) << "\n";
  }
  for (int y = 0; y < spec.n; ++y)
    for (int x = 0; x < spec.n; ++x) {
      const Coord c{x, y};
      out << "  \"" << to_string(c) << "\"";
      if (cycle_nodes.count(c)) out << " [color=red, style=bold]";
      out << ";\n";
    }
  for (const WaitEdge& e : g.edges) {
    out << "  \"" << to_string(e.from) << "\" -> \"" << to_string(e.to)
        << "\" [label=\"packet " << e.packet_id << "\"";
    if (cycle_edges.count({e.from, e.to})) out << ", color=red, style=bold";
    out << "];\n";
  }
  out << "}\n";
  return out.str();
}

// --------------------------------------------------------- estimate CSV

constexpr const char* kCsvHeader =
    "ordering,variant,runs,mean_acks,hw_acks,mean_time,hw_time,"
    "deadlock_fraction";

namespace detail {

// Locale-free fixed formatting: exactly four digits after `.`.
inline std::string fixed4(double v) {
  long long scaled = std::llround(v * 10000.0);
  const bool neg = scaled < 0;
  if (neg) scaled = -scaled;
  std::string frac = std::to_string(scaled % 10000);
  frac.insert(0, 4 - frac.size(), '0');
  return (neg ? std::string("-") : std::string()) +
         std::to_string(scaled / 10000) + "." + frac;
}

inline bool parse_fixed4(const std::string& s, double& out) {
  if (s.empty()) return false;
  size_t i = 0;
  bool neg = false;
  if (s[0] == '-') {
    neg = true;
    i = 1;
  }
  const size_t dot = s.find('.');
  if (dot == std::string::npos || dot < i + 1 || s.size() - dot - 1 != 4)
    return false;
  long long whole = 0, frac = 0;
  for (size_t j = i; j < dot; ++j) {
    if (s[j] < '0' || s[j] > '9') return false;
    whole = whole * 10 + (s[j] - '0');
  }
  for (size_t j = dot + 1; j < s.size(); ++j) {
    if (s[j] < '0' || s[j] > '9') return false;
    frac = frac * 10 + (s[j] - '0');
  }
  out = static_cast<double>(whole * 10000 + frac) / 10000.0;
  if (neg) out = -out;
  return true;
}

[[noreturn]] inline void csv_fail(int line_no, const std::string& line,
                                  const std::string& why) {
  throw io_error("csv line " + std::to_string(line_no) + " (\"" + line +
                 "\"): " + why);
}

}  // namespace detail

inline std::string write_csv(const std::vector<EstimateRow>& rows) {
  std::ostringstream out;
  out << kCsvHeader << "\n";
  for (const EstimateRow& r : rows) {
    out << ordering_name(r.ordering) << "," << variant_name(r.variant) << ","
        << r.runs << "," << detail::fixed4(r.mean_acks) << ","
        << detail::fixed4(r.hw_acks) << "," << detail::fixed4(r.mean_time)
        << "," << detail::fixed4(r.hw_time) << ","
        << detail::fixed4(r.deadlock_fraction) << "\n";
  }
  return out.str();
}

inline std::vector<EstimateRow> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  bool saw_header = false;
  std::vector<EstimateRow> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!saw_header) {
      if (line != kCsvHeader)
        detail::csv_fail(line_no, line, "expected header \"" +
                                            std::string(kCsvHeader) + "\"");
      saw_header = true;
      continue;
    }
    const std::vector<std::string> f = detail::split(line, ',');
    if (f.size() != 8)
      detail::csv_fail(line_no, line, "expected 8 fields, got " +
                                          std::to_string(f.size()));
    EstimateRow r;
    if (!parse_ordering(f[0], r.ordering))
      detail::csv_fail(line_no, line, "unknown ordering \"" + f[0] + "\"");
    if (!parse_variant(f[1], r.variant))
      detail::csv_fail(line_no, line, "unknown variant \"" + f[1] + "\"");
    try {
      r.runs = static_cast<uint32_t>(std::stoul(f[2]));
    } catch (const std::exception&) {
      detail::csv_fail(line_no, line, "bad run count \"" + f[2] + "\"");
    }
    double* fields[5] = {&r.mean_acks, &r.hw_acks, &r.mean_time, &r.hw_time,
                         &r.deadlock_fraction};
    for (int i = 0; i < 5; ++i)
      if (!detail::parse_fixed4(f[3 + static_cast<size_t>(i)], *fields[i]))
        detail::csv_fail(line_no, line,
                         "bad number \"" + f[3 + static_cast<size_t>(i)] +
                             "\" (need fixed 4 decimals)");
    r.deadlock_count = static_cast<uint32_t>(
        std::llround(r.deadlock_fraction * static_cast<double>(r.runs)));
    rows.push_back(r);
  }
  if (!saw_header) throw io_error("csv is missing its header line");
  return rows;
}

// ----------------------------------------------------------- text table

// Result matrix, orderings down the side and variants across the top.
// Cells show mean acks +- half-width; `*` flags any cell that ever
// deadlocked. Flagged cells get an exact binomial interval underneath.
inline std::string render_table(const std::vector<EstimateRow>& rows) {
  std::vector<std::string> variant_cols;
  std::vector<Ordering> ordering_rows;
  for (const EstimateRow& r : rows) {
    const std::string v = variant_name(r.variant);
    if (std::find(variant_cols.begin(), variant_cols.end(), v) ==
        variant_cols.end())
      variant_cols.push_back(v);
    if (std::find(ordering_rows.begin(), ordering_rows.end(), r.ordering) ==
        ordering_rows.end())
      ordering_rows.push_back(r.ordering);
  }

  auto cell_for = [&](Ordering o, const std::string& v) -> const EstimateRow* {
    const EstimateRow* found = nullptr;
    for (const EstimateRow& r : rows)
      if (r.ordering == o && variant_name(r.variant) == v) found = &r;
    return found;
  };
  auto two_decimals = [](double v) {
    const std::string s = detail::fixed4(v);
    return s.substr(0, s.size() - 2);
  };
  auto cell_text = [&](const EstimateRow* r) -> std::string {
    if (!r) return "-";
    std::string s = two_decimals(r->mean_acks) + "+-" + two_decimals(r->hw_acks);
    if (r->deadlock_fraction > 0) s += " *";
    return s;
  };

  std::vector<std::vector<std::string>> grid;
  std::vector<std::string> head;
  head.push_back("acks");
  for (const std::string& v : variant_cols) head.push_back(v);
  grid.push_back(head);
  for (Ordering o : ordering_rows) {
    std::vector<std::string> row;
    row.push_back(ordering_name(o));
    for (const std::string& v : variant_cols)
      row.push_back(cell_text(cell_for(o, v)));
    grid.push_back(row);
  }

  std::vector<size_t> width(grid[0].size(), 0);
  for (const auto& row : grid)
    for (size_t i = 0; i < row.size(); ++i)
      width[i] = std::max(width[i], row[i].size());

  std::ostringstream out;
  for (const auto& row : grid) {
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) out << " | ";
      out << row[i];
      out << std::string(width[i] - row[i].size(), ' ');
    }
    out << "\n";
  }

  bool any_flag = false;
  for (const EstimateRow& r : rows) any_flag |= r.deadlock_fraction > 0;
  if (any_flag) {
    out << "\n* deadlocked runs observed; exact 95% deadlock-fraction "
           "intervals:\n";
    for (Ordering o : ordering_rows)
      for (const std::string& v : variant_cols) {
        const EstimateRow* r = cell_for(o, v);
        if (!r || r->deadlock_fraction <= 0) continue;
        const Interval ci = clopper_pearson(r->deadlock_count, r->runs);
        out << "  " << ordering_name(o) << " / " << v << ": "
            << detail::fixed4(r->deadlock_fraction) << " ["
            << detail::fixed4(ci.lo) << ", " << detail::fixed4(ci.hi)
            << "]\n";
      }
  }
  return out.str();
}

// ----------------------------------------------------------- file plumbing

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw io_error("error while reading " + path);
  return buf.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error("cannot write " + path);
  out << content;
  out.flush();
  if (!out) throw io_error("error while writing " + path);
}

}  // namespace hsf
