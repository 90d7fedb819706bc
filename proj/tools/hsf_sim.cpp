#include <algorithm>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hsfsim/config.hpp"
#include "hsfsim/explorer.hpp"
#include "hsfsim/io.hpp"
#include "hsfsim/stats.hpp"

using namespace hsf;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitConfig = 2;
constexpr int kExitInvariant = 3;
constexpr int kExitBound = 4;

struct CommonArgs {
  std::string config_path;
  uint64_t seed = 0;
  uint32_t runs = 0;
  uint32_t horizon = 0;
  int n = 0;
  std::string variant;
  std::string ordering;
};

void attach_common(CLI::App* sub, CommonArgs& a) {
  sub->add_option("--config", a.config_path, "key=value configuration file");
  sub->add_option("--seed", a.seed, "base random seed");
  sub->add_option("--runs", a.runs, "number of Monte Carlo runs");
  sub->add_option("--horizon", a.horizon, "tick budget per run");
  sub->add_option("-n,--n", a.n, "grid side length (even)");
  sub->add_option("--variant", a.variant,
                  "system variant (basic, queue-k, parallel, acks-NE, "
                  "acks-NE-queue-k)");
  sub->add_option("--ordering", a.ordering,
                  "injection ordering (sw-ne-x, sw-ne-y, ne-sw-x, ne-sw-y, "
                  "alternating)");
}

// Config file first, then explicit flags override it.
ExperimentConfig load_config(const CLI::App* sub, const CommonArgs& a) {
  ExperimentConfig cfg;
  if (sub->count("--config")) cfg = parse_config(read_file(a.config_path));
  if (sub->count("--seed")) cfg.seed = a.seed;
  if (sub->count("--runs")) {
    if (a.runs == 0) throw config_error("--runs must be positive");
    cfg.runs = a.runs;
  }
  if (sub->count("--horizon")) {
    if (a.horizon == 0) throw config_error("--horizon must be positive");
    cfg.horizon = a.horizon;
  }
  if (sub->count("--n")) {
    if (a.n < 2 || a.n % 2 != 0)
      throw config_error("n must be even and at least 2, got " +
                         std::to_string(a.n));
    cfg.spec.n = a.n;
  }
  if (sub->count("--variant") && !parse_variant(a.variant, cfg.spec.variant))
    throw config_error("unknown variant \"" + a.variant + "\"");
  if (sub->count("--ordering") && !parse_ordering(a.ordering, cfg.ordering))
    throw config_error("unknown ordering \"" + a.ordering + "\"");
  return cfg;
}

std::string describe(const ExperimentConfig& cfg) {
  std::string s = "n=" + std::to_string(cfg.spec.n) +
                  " variant=" + variant_name(cfg.spec.variant) +
                  " ordering=" + std::string(ordering_name(cfg.ordering));
  if (cfg.opts.inject_rate != 1)
    s += " inject-rate=" + std::to_string(cfg.opts.inject_rate);
  if (cfg.opts.dual_send) s += " parallel-dual-send=true";
  return s;
}

void print_cycles(const WaitForGraph& g) {
  for (const std::vector<Coord>& cycle : g.cycles) {
    std::cout << "cycle:";
    for (const Coord& c : cycle) std::cout << " " << to_string(c) << " ->";
    std::cout << " " << to_string(cycle.front()) << "\n";
  }
}

int cmd_run(const ExperimentConfig& cfg, const std::string& trace_path,
            const std::string& dot_path) {
  const LinkTable links = build_links(cfg.spec);
  const std::vector<Coord> seq = generate_sequence(cfg.spec.n, cfg.ordering);
  World w = make_world(cfg.spec, links, seq, cfg.opts);
  RandomResolver resolver(cfg.seed);
  const bool want_trace = !trace_path.empty() || cfg.trace;
  std::vector<TraceEvent> events;
  const RunResult res =
      run_checked(w, cfg.horizon, resolver, want_trace ? &events : nullptr);

  const size_t total = seq.size();
  std::cout << describe(cfg) << " seed=" << cfg.seed
            << " horizon=" << cfg.horizon << "\n";
  if (res.deadlocked)
    std::cout << "deadlocked tick=" << res.deadlock_tick;
  else if (res.completed)
    std::cout << "completed tick=" << res.time;
  else
    std::cout << "horizon-reached";
  std::cout << " acks=" << res.acks << "/" << total << "\n";

  const WaitForGraph g = wait_for_graph(w);
  if (res.deadlocked) print_cycles(g);
  if (!trace_path.empty())
    write_file(trace_path, write_event_log(events));
  else if (cfg.trace)
    std::cout << write_event_log(events);
  if (!dot_path.empty()) write_file(dot_path, write_dot(cfg.spec, g));
  return kExitOk;
}

void print_row(const EstimateRow& row) {
  const Interval ci = clopper_pearson(row.deadlock_count, row.runs);
  std::cout << "mean_acks=" << detail::fixed4(row.mean_acks)
            << " hw_acks=" << detail::fixed4(row.hw_acks)
            << " mean_time=" << detail::fixed4(row.mean_time)
            << " hw_time=" << detail::fixed4(row.hw_time)
            << " deadlock_fraction=" << detail::fixed4(row.deadlock_fraction)
            << " ci95=[" << detail::fixed4(ci.lo) << ","
            << detail::fixed4(ci.hi) << "]\n";
}

int cmd_estimate(const ExperimentConfig& cfg, const std::string& csv_path) {
  const EstimateRow row =
      run_experiment(cfg.spec, cfg.ordering, cfg.horizon, cfg.runs, cfg.seed,
                     cfg.opts);
  std::cout << describe(cfg) << " runs=" << cfg.runs
            << " horizon=" << cfg.horizon << " seed=" << cfg.seed << "\n";
  print_row(row);
  if (!csv_path.empty()) write_file(csv_path, write_csv({row}));
  return kExitOk;
}

int cmd_sweep(const ExperimentConfig& cfg, const std::string& variants_arg,
              const std::string& orderings_arg, const std::string& csv_path) {
  std::vector<Variant> variant_list;
  for (const std::string& name : detail::split(variants_arg, ',')) {
    Variant v;
    if (!parse_variant(name, v))
      throw config_error("unknown variant \"" + name + "\" in --variants");
    variant_list.push_back(v);
  }
  std::vector<Ordering> ordering_list;
  if (orderings_arg.empty()) {
    ordering_list.assign(std::begin(kAllOrderings), std::end(kAllOrderings));
  } else {
    for (const std::string& name : detail::split(orderings_arg, ',')) {
      Ordering o;
      if (!parse_ordering(name, o))
        throw config_error("unknown ordering \"" + name +
                           "\" in --orderings");
      ordering_list.push_back(o);
    }
  }

  std::vector<EstimateRow> rows;
  uint32_t cell = 0, failures = 0;
  for (Ordering o : ordering_list)
    for (const Variant& v : variant_list) {
      const GridSpec spec{cfg.spec.n, v};
      const uint64_t cell_seed = derive_seed(cfg.seed, cell++);
      try {
        rows.push_back(run_experiment(spec, o, cfg.horizon, cfg.runs,
                                      cell_seed, cfg.opts));
      } catch (const std::exception& e) {
        ++failures;
        std::cerr << "cell " << ordering_name(o) << "/" << variant_name(v)
                  << " failed: " << e.what() << "\n";
      }
    }

  std::cout << "n=" << cfg.spec.n << " runs=" << cfg.runs
            << " horizon=" << cfg.horizon << " seed=" << cfg.seed << "\n";
  std::cout << render_table(rows);
  if (!csv_path.empty()) write_file(csv_path, write_csv(rows));
  if (rows.empty() && failures > 0) return kExitIo;
  return kExitOk;
}

int cmd_check(const ExperimentConfig& cfg, const ExploreBounds& bounds,
              const std::string& trace_path, const std::string& dot_path) {
  const LinkTable links = build_links(cfg.spec);
  const std::vector<Coord> seq = generate_sequence(cfg.spec.n, cfg.ordering);
  const Verdict v = explore(cfg.spec, links, seq, cfg.opts, bounds);

  std::cout << describe(cfg) << "\n";
  std::cout << verdict_name(v.kind) << " states=" << v.states_explored;
  if (v.kind == VerdictKind::DeadlockReachable)
    std::cout << " tick=" << v.deadlock_tick
              << " choices=" << v.script.size();
  std::cout << "\n";

  if (v.kind == VerdictKind::BoundExceeded) {
    if (!trace_path.empty() || !dot_path.empty())
      std::cerr << "bound exceeded before any deadlock; nothing to export\n";
    return kExitBound;
  }
  if (v.kind == VerdictKind::DeadlockFree) {
    if (!trace_path.empty() || !dot_path.empty()) {
      std::cerr << "no deadlock found; no trace to export\n";
      return kExitIo;
    }
    return kExitOk;
  }

  // Reachable: replay the recorded choices to regenerate the shortest
  // deadlocking run for export.
  World w = make_world(cfg.spec, links, seq, cfg.opts);
  ScriptResolver replay(v.script);
  std::vector<TraceEvent> events;
  const uint32_t horizon = std::max(cfg.horizon, v.deadlock_tick + 1);
  const RunResult res = run(w, horizon, replay, &events);
  if (!res.deadlocked || res.deadlock_tick != v.deadlock_tick)
    throw invariant_error("deadlock replay diverged from the search");
  print_cycles(wait_for_graph(w));
  if (!trace_path.empty()) write_file(trace_path, write_event_log(events));
  if (!dot_path.empty())
    write_file(dot_path, write_dot(cfg.spec, wait_for_graph(w)));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Simulator and deadlock checker for a Manhattan-grid controller "
      "network"};
  app.require_subcommand(1);

  CommonArgs run_args, est_args, sweep_args, check_args;
  std::string trace_path, dot_path, csv_path;
  std::string check_trace_path, check_dot_path;
  std::string variants_arg = "basic,queue-1,parallel,acks-NE";
  std::string orderings_arg;
  ExploreBounds bounds;

  CLI::App* run_cmd =
      app.add_subcommand("run", "execute one seeded simulation run");
  attach_common(run_cmd, run_args);
  run_cmd->add_option("--trace", trace_path, "write the event log here");
  run_cmd->add_option("--dot", dot_path,
                      "write the final wait-for graph here (Graphviz)");

  CLI::App* est_cmd = app.add_subcommand(
      "estimate", "Monte Carlo estimate for one variant/ordering cell");
  attach_common(est_cmd, est_args);
  est_cmd->add_option("--csv", csv_path, "write the result row here");

  CLI::App* sweep_cmd = app.add_subcommand(
      "sweep", "estimate a whole ordering x variant result table");
  attach_common(sweep_cmd, sweep_args);
  sweep_cmd->add_option("--variants", variants_arg,
                        "comma-separated variant list");
  sweep_cmd->add_option("--orderings", orderings_arg,
                        "comma-separated ordering list (default: all five)");
  sweep_cmd->add_option("--csv", csv_path, "write all result rows here");

  CLI::App* check_cmd = app.add_subcommand(
      "check", "exhaustively search the reachable states for deadlocks");
  attach_common(check_cmd, check_args);
  check_cmd->add_option("--max-states", bounds.max_states,
                        "state budget for the search");
  check_cmd->add_option("--max-depth", bounds.max_depth,
                        "tick-depth bound (0 = unbounded)");
  check_cmd->add_option("--prefix", bounds.sequence_prefix,
                        "only inject the first k packets (0 = all)");
  check_cmd->add_option("--trace", check_trace_path,
                        "write the shortest deadlocking event log here");
  check_cmd->add_option("--dot", check_dot_path,
                        "write the deadlock wait-for graph here (Graphviz)");

  try {
    app.parse(argc, argv);
    if (run_cmd->parsed())
      return cmd_run(load_config(run_cmd, run_args), trace_path, dot_path);
    if (est_cmd->parsed())
      return cmd_estimate(load_config(est_cmd, est_args), csv_path);
    if (sweep_cmd->parsed())
      return cmd_sweep(load_config(sweep_cmd, sweep_args), variants_arg,
                       orderings_arg, csv_path);
    if (check_cmd->parsed())
      return cmd_check(load_config(check_cmd, check_args), bounds,
                       check_trace_path, check_dot_path);
    return kExitConfig;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  } catch (const config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const invariant_error& e) {
    std::cerr << "invariant breach: " << e.what() << "\n";
    return kExitInvariant;
  } catch (const io_error& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
}
