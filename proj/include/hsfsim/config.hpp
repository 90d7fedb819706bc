#pragma once

#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>

#include "hsfsim/engine.hpp"
#include "hsfsim/gateway.hpp"
#include "hsfsim/grid.hpp"

namespace hsf {

struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  GridSpec spec{10, variants::basic()};
  Ordering ordering = Ordering::SWtoNE_x;
  uint32_t horizon = 300;
  uint32_t runs = 1000;
  uint64_t seed = 0;
  bool trace = false;
  EngineOptions opts{};

  friend bool operator==(const ExperimentConfig& a,
                         const ExperimentConfig& b) {
    return a.spec.n == b.spec.n && a.spec.variant == b.spec.variant &&
           a.ordering == b.ordering && a.horizon == b.horizon &&
           a.runs == b.runs && a.seed == b.seed && a.trace == b.trace &&
           a.opts.inject_rate == b.opts.inject_rate &&
           a.opts.dual_send == b.opts.dual_send;
  }
  friend bool operator!=(const ExperimentConfig& a,
                         const ExperimentConfig& b) {
    return !(a == b);
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] inline void config_fail(int line_no, const std::string& line,
                                     const std::string& why) {
  throw config_error("config line " + std::to_string(line_no) + " (\"" +
                     line + "\"): " + why);
}

inline uint64_t parse_u64(const std::string& s, bool& ok) {
  ok = !s.empty();
  uint64_t v = 0;
  for (char c : s) {
    if (c < '0' || c > '9') {
      ok = false;
      return 0;
    }
    const uint64_t d = static_cast<uint64_t>(c - '0');
    if (v > (UINT64_MAX - d) / 10) {
      ok = false;
      return 0;
    }
    v = v * 10 + d;
  }
  return v;
}

}  // namespace detail

// Parses key=value text (one pair per line, `#` starts a comment) into a
// validated configuration, with defaults for anything unspecified.
inline ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      detail::config_fail(line_no, line, "expected key=value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (key.empty()) detail::config_fail(line_no, line, "missing key");
    if (value.empty()) detail::config_fail(line_no, line, "missing value");

    bool ok = true;
    if (key == "n") {
      const uint64_t v = detail::parse_u64(value, ok);
      if (!ok || v > 10000)
        detail::config_fail(line_no, line, "n must be a small even integer");
      if (v < 2 || v % 2 != 0)
        detail::config_fail(line_no, line, "n must be even and at least 2");
      cfg.spec.n = static_cast<int>(v);
    } else if (key == "variant") {
      if (!parse_variant(value, cfg.spec.variant))
        detail::config_fail(line_no, line, "unknown variant \"" + value +
                                               "\"");
    } else if (key == "ordering") {
      if (!parse_ordering(value, cfg.ordering))
        detail::config_fail(line_no, line, "unknown ordering \"" + value +
                                               "\"");
    } else if (key == "horizon") {
      const uint64_t v = detail::parse_u64(value, ok);
      if (!ok || v == 0 || v > UINT32_MAX)
        detail::config_fail(line_no, line, "horizon must be a positive integer");
      cfg.horizon = static_cast<uint32_t>(v);
    } else if (key == "runs") {
      const uint64_t v = detail::parse_u64(value, ok);
      if (!ok || v == 0 || v > UINT32_MAX)
        detail::config_fail(line_no, line, "runs must be a positive integer");
      cfg.runs = static_cast<uint32_t>(v);
    } else if (key == "seed") {
      cfg.seed = detail::parse_u64(value, ok);
      if (!ok)
        detail::config_fail(line_no, line, "seed must be an unsigned integer");
    } else if (key == "trace") {
      if (value == "true")
        cfg.trace = true;
      else if (value == "false")
        cfg.trace = false;
      else
        detail::config_fail(line_no, line, "trace must be true or false");
    } else if (key == "inject-rate") {
      const uint64_t v = detail::parse_u64(value, ok);
      if (!ok || v == 0 || v > 1000)
        detail::config_fail(line_no, line,
                            "inject-rate must be a positive integer");
      cfg.opts.inject_rate = static_cast<int>(v);
    } else if (key == "parallel-dual-send") {
      if (value == "true")
        cfg.opts.dual_send = true;
      else if (value == "false")
        cfg.opts.dual_send = false;
      else
        detail::config_fail(line_no, line,
                            "parallel-dual-send must be true or false");
    } else {
      detail::config_fail(line_no, line, "unknown key \"" + key + "\"");
    }
  }
  return cfg;
}

inline std::string render(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "n=" << cfg.spec.n << "\n";
  out << "variant=" << variant_name(cfg.spec.variant) << "\n";
  out << "ordering=" << ordering_name(cfg.ordering) << "\n";
  out << "horizon=" << cfg.horizon << "\n";
  out << "runs=" << cfg.runs << "\n";
  out << "seed=" << cfg.seed << "\n";
  out << "trace=" << (cfg.trace ? "true" : "false") << "\n";
  out << "inject-rate=" << cfg.opts.inject_rate << "\n";
  out << "parallel-dual-send=" << (cfg.opts.dual_send ? "true" : "false")
      << "\n";
  return out.str();
}

}  // namespace hsf
