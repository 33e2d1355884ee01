// evq: batch CLI over the closed-network toolkit. One subcommand per
// analysis; stdout carries the report, CSV traces go to files named by
// flags. Identical invocations produce byte-identical stdout.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "evq/allocation.hpp"
#include "evq/charger_choice.hpp"
#include "evq/config.hpp"
#include "evq/distributions.hpp"
#include "evq/errors.hpp"
#include "evq/fleet.hpp"
#include "evq/mva.hpp"
#include "evq/product_form.hpp"
#include "evq/report.hpp"
#include "evq/sim.hpp"
#include "evq/visit_ratios.hpp"

namespace {

using namespace evq;

bool log_enabled() {
  const char* v = std::getenv("EVQ_LOG");
  return v != nullptr && *v != '\0';
}

void log_line(const std::string& msg) {
  if (log_enabled()) std::cerr << "[evq] " << msg << '\n';
}

enum class OutFmt { kTable, kCsv, kText };

OutFmt parse_fmt(const std::string& s) {
  if (s == "table") return OutFmt::kTable;
  if (s == "csv") return OutFmt::kCsv;
  if (s == "text") return OutFmt::kText;
  throw InvalidConfig("unknown output format '" + s +
                      "' (expected table, csv, or text)");
}

std::vector<double> parse_double_list(const std::string& text,
                                      const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string token;
  while (std::getline(ss, token, ',')) {
    const auto b = token.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    const auto e = token.find_last_not_of(" \t");
    token = token.substr(b, e - b + 1);
    try {
      std::size_t pos = 0;
      const double v = std::stod(token, &pos);
      if (pos != token.size()) throw std::invalid_argument(token);
      out.push_back(v);
    } catch (...) {
      throw DomainError("bad " + what + " value '" + token + "'");
    }
  }
  return out;
}

std::vector<int> parse_int_list(const std::string& text,
                                const std::string& what) {
  std::vector<int> out;
  for (double v : parse_double_list(text, what)) {
    const int i = static_cast<int>(v);
    if (static_cast<double>(i) != v) {
      throw DomainError(what + " values must be integers");
    }
    out.push_back(i);
  }
  return out;
}

std::string kind_name(NodeKind k) {
  switch (k) {
    case NodeKind::SingleServer:
      return "SS";
    case NodeKind::InfiniteServer:
      return "IS";
    case NodeKind::FiniteServer:
      return "FS";
  }
  return "?";
}

std::string chargers_str(const std::vector<int>& v) {
  std::string out = "(";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i > 0) out += ',';
    out += std::to_string(v[i]);
  }
  out += ')';
  return out;
}

std::string percent2(double x) { return fixed2(100.0 * x) + "%"; }

void kv(std::ostream& os, const std::string& key, const std::string& value) {
  static constexpr int kKeyWidth = 24;
  os << key;
  for (int i = static_cast<int>(key.size()); i < kKeyWidth; ++i) os << ' ';
  os << value << '\n';
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidConfig("cannot write file: " + path);
  out << content;
  if (!out) throw InvalidConfig("short write: " + path);
}

int resolve_fleet(int flag_value, const LoadedConfig& cfg) {
  const int m = flag_value >= 0 ? flag_value : cfg.solver.fleet_size;
  if (m < 0) {
    throw InvalidConfig(
        "fleet size not set (use --fleet-size or solver.fleet_size)");
  }
  return m;
}

// ---------------------------------------------------------------- solve ----

struct SolveOpts {
  std::string config_path;
  int fleet_size = -1;
  std::string method;  // empty: take the config's choice
  bool marginals = false;
  std::string output = "table";
};

int run_solve(const SolveOpts& o) {
  const LoadedConfig cfg = load_config(o.config_path);
  const NetworkModel& model = cfg.model;
  log_line("loaded " + o.config_path + ": " +
           std::to_string(model.station_count) + " stations, " +
           std::to_string(model.node_count()) + " nodes");
  const int m = resolve_fleet(o.fleet_size, cfg);
  const MethodChoice method =
      o.method.empty() ? cfg.solver.method : parse_method_choice(o.method);
  const OutFmt fmt = parse_fmt(o.output);
  const bool use_mva =
      method == MethodChoice::kMva || method == MethodChoice::kBoth;
  const bool use_conv =
      method == MethodChoice::kConvolution || method == MethodChoice::kBoth;
  if (!cfg.solver.arrival_cs2.empty() && use_conv) {
    throw InvalidConfig(
        "solver.arrival_cs2 needs method mva (the product form assumes "
        "exponential arrivals)");
  }

  const std::vector<double> lambda = visit_ratios(model);
  const int n = model.node_count();
  const int s = model.station_count;

  double thr = 0.0;
  std::vector<double> avail, queue, node_thr;
  bool approximate = false;

  std::optional<MvaResult> mva;
  std::optional<ProductFormSolution> conv;
  if (use_mva) {
    MvaOptions opt;
    opt.arrival_cs2 = cfg.solver.arrival_cs2;
    mva = mva_solve(model, lambda, m, opt);
  }
  if (use_conv) {
    conv = solve_product_form(model, lambda, m, true);
  }
  std::vector<double> conv_queue;
  if (conv) {
    conv_queue.resize(n, 0.0);
    for (int i = 0; i < n; ++i) {
      const std::vector<double>& p = conv->marginals[i];
      double l = 0.0;
      for (std::size_t k = 1; k < p.size(); ++k) l += k * p[k];
      conv_queue[i] = l;
    }
  }
  if (mva) {
    thr = mva->state.system_throughput;
    avail = mva->state.availability;
    queue = mva->state.queue_length;
    approximate = mva->state.approximate;
    node_thr.resize(n);
    for (int i = 0; i < n; ++i) node_thr[i] = lambda[i] * thr;
  } else {
    thr = conv->system_throughput;
    avail = conv->availability;
    queue = conv_queue;
    node_thr = conv->node_throughput;
  }

  // Marginal distributions are product-form quantities; reuse the
  // convolution solution when it exists, run one otherwise.
  std::vector<std::vector<double>> marginals;
  if (o.marginals) {
    if (conv) {
      marginals = conv->marginals;
    } else {
      marginals = solve_product_form(model, lambda, m, true).marginals;
    }
  }

  const std::string method_name = method_choice_name(method);
  if (fmt == OutFmt::kTable) {
    kv(std::cout, "fleet size", std::to_string(m));
    kv(std::cout, "method", method_name);
    if (approximate) kv(std::cout, "approximate", "yes (renewal arrivals)");
    kv(std::cout, "system throughput", fixed2(thr));
    std::cout << '\n';
    Table st({"station", "chargers", "availability", "loss"});
    for (int k = 0; k < s; ++k) {
      st.add({model.station_ids[k],
              std::to_string(model.nodes[model.fs_node[k]].servers),
              percent2(avail[k]), percent2(1.0 - avail[k])});
    }
    std::cout << st.text() << '\n';
    Table nt({"node", "label", "kind", "servers", "throughput", "mean queue"});
    for (int i = 0; i < n; ++i) {
      nt.add({std::to_string(i), model.nodes[i].label,
              kind_name(model.nodes[i].kind),
              std::to_string(model.nodes[i].servers), fixed2(node_thr[i]),
              fixed2(queue[i])});
    }
    std::cout << nt.text();
    if (o.marginals) {
      std::cout << '\n';
      Table mt({"node", "n", "probability"});
      for (int i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < marginals[i].size(); ++k) {
          mt.add({std::to_string(i), std::to_string(k),
                  fixed2(marginals[i][k])});
        }
      }
      std::cout << mt.text();
    }
    if (mva && conv) {
      std::cout << '\n';
      double da = 0.0, dq = 0.0, dt = 0.0;
      for (int k = 0; k < s; ++k) {
        da = std::max(da,
                      std::abs(mva->state.availability[k] - conv->availability[k]));
      }
      for (int i = 0; i < n; ++i) {
        dq = std::max(dq, std::abs(mva->state.queue_length[i] - conv_queue[i]));
        dt = std::max(dt, std::abs(lambda[i] * mva->state.system_throughput -
                                   conv->node_throughput[i]));
      }
      kv(std::cout, "method agreement", "mva vs convolution");
      kv(std::cout, "  throughput diff",
         full(std::abs(mva->state.system_throughput -
                       conv->system_throughput)));
      kv(std::cout, "  availability diff", full(da));
      kv(std::cout, "  queue diff", full(dq));
      kv(std::cout, "  node throughput diff", full(dt));
    }
    return 0;
  }

  if (fmt == OutFmt::kCsv) {
    std::string out;
    out += csv_line({"key", "value"});
    out += csv_line({"command", "solve"});
    out += csv_line({"fleet_size", std::to_string(m)});
    out += csv_line({"method", method_name});
    out += csv_line({"approximate", approximate ? "1" : "0"});
    out += csv_line({"system_throughput", full(thr)});
    out += '\n';
    out += csv_line({"station", "chargers", "availability", "loss"});
    for (int k = 0; k < s; ++k) {
      out += csv_line({model.station_ids[k],
                       std::to_string(model.nodes[model.fs_node[k]].servers),
                       full(avail[k]), full(1.0 - avail[k])});
    }
    out += '\n';
    out += csv_line({"node", "label", "kind", "servers", "visit_ratio",
                     "throughput", "mean_queue"});
    for (int i = 0; i < n; ++i) {
      out += csv_line({std::to_string(i), model.nodes[i].label,
                       kind_name(model.nodes[i].kind),
                       std::to_string(model.nodes[i].servers), full(lambda[i]),
                       full(node_thr[i]), full(queue[i])});
    }
    if (o.marginals) {
      out += '\n';
      out += csv_line({"node", "n", "probability"});
      for (int i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < marginals[i].size(); ++k) {
          out += csv_line({std::to_string(i), std::to_string(k),
                           full(marginals[i][k])});
        }
      }
    }
    std::cout << out;
    return 0;
  }

  // Structured text: one datum per line, full precision.
  std::cout << "command solve\n";
  std::cout << "fleet_size " << m << '\n';
  std::cout << "method " << method_name << '\n';
  std::cout << "approximate " << (approximate ? 1 : 0) << '\n';
  std::cout << "system_throughput " << full(thr) << '\n';
  for (int k = 0; k < s; ++k) {
    std::cout << "station " << model.station_ids[k] << " chargers "
              << model.nodes[model.fs_node[k]].servers << " availability "
              << full(avail[k]) << " loss " << full(1.0 - avail[k]) << '\n';
  }
  for (int i = 0; i < n; ++i) {
    std::cout << "node " << i << " label " << model.nodes[i].label << " kind "
              << kind_name(model.nodes[i].kind) << " servers "
              << model.nodes[i].servers << " visit_ratio " << full(lambda[i])
              << " throughput " << full(node_thr[i]) << " mean_queue "
              << full(queue[i]) << '\n';
  }
  if (o.marginals) {
    for (int i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < marginals[i].size(); ++k) {
        std::cout << "marginal " << i << ' ' << k << ' '
                  << full(marginals[i][k]) << '\n';
      }
    }
  }
  if (mva && conv) {
    std::cout << "diff system_throughput "
              << full(std::abs(mva->state.system_throughput -
                               conv->system_throughput))
              << '\n';
  }
  return 0;
}

// ----------------------------------------------------------- fleet-size ----

struct FleetOpts {
  std::string config_path;
  int max_fleet = -1;
  std::string trace_path;
  std::string output = "table";
};

int run_fleet_size(const FleetOpts& o) {
  const LoadedConfig cfg = load_config(o.config_path);
  if (!cfg.has_economics) {
    throw InvalidConfig("fleet sizing needs an economics section");
  }
  const OutFmt fmt = parse_fmt(o.output);
  if (fmt == OutFmt::kText) {
    throw InvalidConfig("fleet-size supports output table or csv");
  }
  const std::vector<double> lambda = visit_ratios(cfg.model);
  FleetSizingOptions fo;
  fo.max_fleet = o.max_fleet > 0 ? o.max_fleet : cfg.solver.max_fleet;
  fo.keep_trace = !o.trace_path.empty();
  log_line("fleet sizing up to M = " + std::to_string(fo.max_fleet));
  const FleetSizingResult res =
      optimal_fleet_size(cfg.model, lambda, cfg.economics, fo);

  double min_avail = 1.0;
  for (double a : res.availability) min_avail = std::min(min_avail, a);
  std::string fleet_str;
  for (std::size_t i = 0; i < res.optimal_fleet.size(); ++i) {
    if (i > 0) fleet_str += ", ";
    fleet_str += std::to_string(res.optimal_fleet[i]);
  }

  if (!o.trace_path.empty()) {
    std::string out =
        csv_line({"M", "profit", "revenue", "cost", "min_availability"});
    for (const FleetTraceRow& row : res.trace) {
      out += csv_line({std::to_string(row.fleet_size), full(row.profit),
                       full(row.revenue), full(row.cost),
                       full(row.min_availability)});
    }
    write_file(o.trace_path, out);
    log_line("wrote trace " + o.trace_path + " (" +
             std::to_string(res.trace.size()) + " rows)");
  }

  if (fmt == OutFmt::kCsv) {
    std::string out;
    out += csv_line({"key", "value"});
    out += csv_line({"command", "fleet-size"});
    for (int mstar : res.optimal_fleet) {
      out += csv_line({"optimal_fleet", std::to_string(mstar)});
    }
    out += csv_line({"profit", full(res.profit)});
    out += csv_line({"peak_interior", res.peak_interior ? "1" : "0"});
    out += csv_line({"min_availability", full(min_avail)});
    out += '\n';
    out += csv_line({"station", "availability"});
    for (std::size_t k = 0; k < res.availability.size(); ++k) {
      out += csv_line({cfg.model.station_ids[k], full(res.availability[k])});
    }
    std::cout << out;
    return 0;
  }

  kv(std::cout, "optimal fleet", fleet_str);
  kv(std::cout, "profit", fixed2(res.profit));
  kv(std::cout, "peak",
     res.peak_interior ? "interior" : "availability-bound");
  kv(std::cout, "min availability", percent2(min_avail));
  std::cout << '\n';
  Table at({"station", "availability"});
  for (std::size_t k = 0; k < res.availability.size(); ++k) {
    at.add({cfg.model.station_ids[k], percent2(res.availability[k])});
  }
  std::cout << at.text();
  return 0;
}

// ------------------------------------------------------------- allocate ----

struct AllocOpts {
  std::string config_path;
  int fleet_size = -1;
  std::string trace_path;
  std::string output = "table";
};

// The trace alternates accepted states (numbered steps, the final one
// starred) with the rejected candidates evaluated from each state.
Table allocation_table(const AllocationResult& res, bool machine) {
  Table t({"Step", "V", "Profit", "Revenue", "Cost", "Penalty"});
  auto fmt = [&](double x) { return machine ? full(x) : fixed2(x); };
  auto add = [&](const std::string& step, const CandidateEval& c) {
    t.add({step, chargers_str(c.chargers), fmt(c.profit), fmt(c.revenue),
           fmt(c.cost), fmt(c.penalty)});
  };
  const CandidateEval* state = &res.start_eval;
  int stepno = 1;
  for (const AllocationStep& st : res.steps) {
    const bool terminal = st.chosen < 0;
    std::string label = std::to_string(stepno);
    if (terminal && !machine) label += '*';
    add(label, *state);
    for (std::size_t c = 0; c < st.candidates.size(); ++c) {
      if (static_cast<int>(c) == st.chosen) continue;
      add(machine ? "" : "-", st.candidates[c]);
    }
    if (!terminal) {
      state = &st.candidates[st.chosen];
      ++stepno;
    }
  }
  if (res.steps.empty()) add("1", *state);
  return t;
}

int run_allocate(const AllocOpts& o) {
  const LoadedConfig cfg = load_config(o.config_path);
  if (!cfg.has_economics) {
    throw InvalidConfig("charger allocation needs an economics section");
  }
  const OutFmt fmt = parse_fmt(o.output);
  if (fmt == OutFmt::kText) {
    throw InvalidConfig("allocate supports output table or csv");
  }
  const int m = resolve_fleet(o.fleet_size, cfg);
  const std::vector<double> lambda = visit_ratios(cfg.model);
  AllocationOptions ao;
  ao.method = cfg.solver.method == MethodChoice::kConvolution
                  ? SolverMethod::kConvolution
                  : SolverMethod::kMva;
  log_line("greedy allocation at M = " + std::to_string(m));
  const AllocationResult res =
      allocate_chargers(cfg.model, lambda, cfg.economics, m, ao);

  if (!o.trace_path.empty()) {
    write_file(o.trace_path, allocation_table(res, true).csv());
    log_line("wrote trace " + o.trace_path);
  }

  if (fmt == OutFmt::kCsv) {
    std::string out;
    out += csv_line({"key", "value"});
    out += csv_line({"command", "allocate"});
    out += csv_line({"fleet_size", std::to_string(m)});
    out += csv_line({"chargers", chargers_str(res.chargers)});
    out += csv_line({"profit", full(res.final_eval.profit)});
    out += csv_line({"revenue", full(res.final_eval.revenue)});
    out += csv_line({"cost", full(res.final_eval.cost)});
    out += csv_line({"penalty", full(res.final_eval.penalty)});
    out += csv_line({"optimality", res.optimality});
    for (const std::string& w : res.warnings) {
      out += csv_line({"warning", w});
    }
    out += '\n';
    out += allocation_table(res, true).csv();
    std::cout << out;
    return 0;
  }

  std::cout << allocation_table(res, false).text() << '\n';
  kv(std::cout, "chargers", chargers_str(res.chargers));
  kv(std::cout, "profit", fixed2(res.final_eval.profit));
  kv(std::cout, "optimality", res.optimality);
  for (const std::string& w : res.warnings) kv(std::cout, "warning", w);
  return 0;
}

// ----------------------------------------------------- compare-chargers ----

struct CompareOpts {
  double gamma = 0.0;
  double t0 = 0.5;
  std::string c2_sweep = "1,1.5,2,2.5,3,4,6,8,12,16";
  std::string output = "table";
  bool simulate = false;
  std::uint64_t seed = 0;
  bool seed_given = false;
  double horizon = 20000.0;
  int replications = 5;
  std::string servers = "1,2";
  int fleet = 10;
};

int run_compare(const CompareOpts& o) {
  const OutFmt fmt = parse_fmt(o.output);
  if (fmt == OutFmt::kText) {
    throw InvalidConfig("compare-chargers supports output table or csv");
  }
  const std::vector<double> sweep = parse_double_list(o.c2_sweep, "c2-sweep");
  const ExponentialDelays expo = exponential_delays(o.gamma, o.t0);
  const double threshold = 1.0 + 2.0 / o.gamma;

  std::vector<ZeroInflatedDelays> rows;
  for (double c2 : sweep) {
    if (c2 < 1.0) {
      throw DomainError(
          "c2-sweep values below 1 have no zero-inflated charging "
          "distribution (c^2 = 2/p0 - 1 >= 1)");
    }
    rows.push_back(zero_inflated_delays(o.gamma, o.t0, 2.0 / (1.0 + c2)));
  }

  std::optional<TwoQueueResult> des;
  std::vector<int> server_options;
  if (o.simulate && !sweep.empty()) {
    if (!o.seed_given) {
      throw InvalidConfig("--simulate needs an explicit --seed");
    }
    TwoQueueSettings st;
    st.t0 = o.t0;
    st.server_options = parse_int_list(o.servers, "servers");
    st.cs2_grid = sweep;
    st.fleet_size = o.fleet;
    st.horizon_hours = o.horizon;
    st.replications = o.replications;
    st.base_seed = o.seed;
    log_line("two-queue experiment: " + std::to_string(sweep.size()) +
             " grid points x " + std::to_string(st.server_options.size()) +
             " server options");
    des = two_queue_charger_experiment(st);
    server_options = st.server_options;
  }

  std::vector<std::string> header = {"cs2", "p0", "one_fast_delay",
                                     "two_slow_delay", "threshold",
                                     "preferred"};
  if (des) {
    for (int sv : server_options) {
      header.push_back("thr_s" + std::to_string(sv));
      header.push_back("thr_s" + std::to_string(sv) + "_ci");
    }
  }
  const bool machine = fmt == OutFmt::kCsv;
  auto num = [&](double x) { return machine ? full(x) : fixed2(x); };
  Table t(header);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const ZeroInflatedDelays& z = rows[i];
    std::vector<std::string> cells = {
        num(sweep[i]),      num(2.0 / (1.0 + sweep[i])),
        num(z.one_fast),    num(z.two_slow),
        num(z.cs2_threshold),
        z.two_slow_preferred ? "two-slow" : "one-fast"};
    if (des) {
      for (const TwoQueueOption& opt : des->options) {
        cells.push_back(num(opt.throughput[i].mean));
        cells.push_back(num(opt.throughput[i].half_width));
      }
    }
    t.add(std::move(cells));
  }

  if (fmt == OutFmt::kCsv) {
    std::cout << t.csv();
    return 0;
  }

  kv(std::cout, "gamma", fixed2(o.gamma));
  kv(std::cout, "t0 hours", fixed2(o.t0));
  kv(std::cout, "cs2 threshold", fixed2(threshold));
  kv(std::cout, "exponential one-fast", fixed2(expo.one_fast));
  kv(std::cout, "exponential two-slow", fixed2(expo.two_slow));
  std::cout << '\n' << t.text();
  if (des) {
    std::cout << '\n';
    for (const TwoQueueOption& opt : des->options) {
      if (opt.servers == 1) continue;
      const std::string key =
          "crossing 1 vs " + std::to_string(opt.servers) + " servers";
      if (opt.crossing_cs2) {
        kv(std::cout, key, "cs2 " + fixed2(*opt.crossing_cs2));
      } else {
        kv(std::cout, key, "none in sweep range");
      }
    }
  }
  return 0;
}

// ------------------------------------------------------------- simulate ----

struct SimOpts {
  std::string config_path;
  std::uint64_t seed = 0;
  int fleet_size = -1;
  int replications = -1;
  double horizon = -1.0;
  double warmup = -1.0;
  std::string csv_path;
  std::string output = "table";
};

int run_simulate(const SimOpts& o) {
  const LoadedConfig cfg = load_config(o.config_path);
  const OutFmt fmt = parse_fmt(o.output);
  SimConfig sc;
  sc.model = cfg.model;
  sc.fleet_size = resolve_fleet(o.fleet_size, cfg);
  sc.node_distributions =
      build_node_distributions(cfg.model, cfg.travel, cfg.sim);
  sc.horizon_hours = o.horizon > 0.0 ? o.horizon : cfg.sim.horizon_hours;
  if (sc.horizon_hours <= 0.0) {
    throw InvalidConfig(
        "simulation horizon not set (use --horizon or sim.horizon_hours)");
  }
  sc.warmup_hours = o.warmup >= 0.0 ? o.warmup : cfg.sim.warmup_hours;
  sc.replications =
      o.replications > 0 ? o.replications : cfg.sim.replications;
  sc.batches = cfg.sim.batches;
  sc.base_seed = o.seed;
  sc.audit_conservation = true;
  log_line("simulating " + std::to_string(sc.replications) + " x " +
           full(sc.horizon_hours) + "h");
  const SimulationReport rep = simulate(sc);

  const NetworkModel& model = cfg.model;
  const int n = model.node_count();
  const int s = model.station_count;

  if (!o.csv_path.empty()) {
    std::string out = csv_line({"replication", "seed", "node", "label", "kind",
                                "throughput", "mean_queue", "availability",
                                "loss_fraction", "charge_delay"});
    for (std::size_t r = 0; r < rep.replication_rows.size(); ++r) {
      const ReplicationMetrics& rm = rep.replication_rows[r];
      for (int i = 0; i < n; ++i) {
        const Node& nd = model.nodes[i];
        std::string avail_cell, loss_cell, delay_cell;
        if (nd.kind == NodeKind::SingleServer) {
          avail_cell = full(rm.availability[nd.station]);
          loss_cell = full(rm.loss_fraction[nd.station]);
        } else if (nd.kind == NodeKind::FiniteServer) {
          delay_cell = full(rm.fs_delay[nd.station]);
        }
        out += csv_line({std::to_string(r), std::to_string(rm.seed),
                         std::to_string(i), nd.label, kind_name(nd.kind),
                         full(rm.node_throughput[i]),
                         full(rm.node_queue_length[i]), avail_cell, loss_cell,
                         delay_cell});
      }
    }
    write_file(o.csv_path, out);
    log_line("wrote per-replication metrics " + o.csv_path);
  }

  if (fmt == OutFmt::kCsv) {
    std::string out;
    out += csv_line({"key", "value"});
    out += csv_line({"command", "simulate"});
    out += csv_line({"fleet_size", std::to_string(sc.fleet_size)});
    out += csv_line({"replications", std::to_string(rep.replications)});
    out += csv_line({"batches", std::to_string(rep.batches)});
    out += csv_line({"horizon_hours", full(rep.horizon_hours)});
    out += csv_line({"warmup_hours", full(rep.warmup_hours)});
    out += csv_line({"base_seed", std::to_string(rep.base_seed)});
    for (std::size_t r = 0; r < rep.replication_seeds.size(); ++r) {
      out += csv_line({"replication_seed_" + std::to_string(r),
                       std::to_string(rep.replication_seeds[r])});
    }
    out += csv_line({"system_throughput", full(rep.system_throughput.mean)});
    out += csv_line(
        {"system_throughput_ci", full(rep.system_throughput.half_width)});
    out += '\n';
    out += csv_line({"station", "availability", "availability_ci", "loss",
                     "loss_ci", "charge_delay", "charge_delay_ci"});
    for (int k = 0; k < s; ++k) {
      out += csv_line({model.station_ids[k], full(rep.availability[k].mean),
                       full(rep.availability[k].half_width),
                       full(rep.loss_fraction[k].mean),
                       full(rep.loss_fraction[k].half_width),
                       full(rep.fs_delay[k].mean),
                       full(rep.fs_delay[k].half_width)});
    }
    out += '\n';
    out += csv_line(
        {"node", "label", "kind", "throughput", "throughput_ci", "mean_queue",
         "mean_queue_ci"});
    for (int i = 0; i < n; ++i) {
      out += csv_line({std::to_string(i), model.nodes[i].label,
                       kind_name(model.nodes[i].kind),
                       full(rep.node_throughput[i].mean),
                       full(rep.node_throughput[i].half_width),
                       full(rep.node_queue_length[i].mean),
                       full(rep.node_queue_length[i].half_width)});
    }
    std::cout << out;
    return 0;
  }

  if (fmt == OutFmt::kText) {
    std::cout << "command simulate\n";
    std::cout << "fleet_size " << sc.fleet_size << '\n';
    std::cout << "replications " << rep.replications << '\n';
    std::cout << "batches " << rep.batches << '\n';
    std::cout << "horizon_hours " << full(rep.horizon_hours) << '\n';
    std::cout << "warmup_hours " << full(rep.warmup_hours) << '\n';
    std::cout << "base_seed " << rep.base_seed << '\n';
    for (std::size_t r = 0; r < rep.replication_seeds.size(); ++r) {
      std::cout << "replication_seed " << r << ' ' << rep.replication_seeds[r]
                << '\n';
    }
    std::cout << "system_throughput " << full(rep.system_throughput.mean)
              << " ci " << full(rep.system_throughput.half_width) << '\n';
    for (int k = 0; k < s; ++k) {
      std::cout << "station " << model.station_ids[k] << " availability "
                << full(rep.availability[k].mean) << " ci "
                << full(rep.availability[k].half_width) << " loss "
                << full(rep.loss_fraction[k].mean) << " ci "
                << full(rep.loss_fraction[k].half_width) << " charge_delay "
                << full(rep.fs_delay[k].mean) << " ci "
                << full(rep.fs_delay[k].half_width) << '\n';
    }
    for (int i = 0; i < n; ++i) {
      std::cout << "node " << i << " label " << model.nodes[i].label
                << " kind " << kind_name(model.nodes[i].kind) << " throughput "
                << full(rep.node_throughput[i].mean) << " ci "
                << full(rep.node_throughput[i].half_width) << " mean_queue "
                << full(rep.node_queue_length[i].mean) << " ci "
                << full(rep.node_queue_length[i].half_width) << '\n';
    }
    return 0;
  }

  kv(std::cout, "fleet size", std::to_string(sc.fleet_size));
  kv(std::cout, "replications", std::to_string(rep.replications));
  kv(std::cout, "batches", std::to_string(rep.batches));
  kv(std::cout, "horizon hours", fixed2(rep.horizon_hours));
  kv(std::cout, "warmup hours", fixed2(rep.warmup_hours));
  kv(std::cout, "base seed", std::to_string(rep.base_seed));
  kv(std::cout, "system throughput",
     fixed2(rep.system_throughput.mean) + " +/- " +
         fixed2(rep.system_throughput.half_width));
  std::cout << '\n';
  Table st({"station", "availability", "+/-", "loss", "+/-", "charge delay",
            "+/-"});
  for (int k = 0; k < s; ++k) {
    st.add({model.station_ids[k], percent2(rep.availability[k].mean),
            percent2(rep.availability[k].half_width),
            percent2(rep.loss_fraction[k].mean),
            percent2(rep.loss_fraction[k].half_width),
            fixed2(rep.fs_delay[k].mean),
            fixed2(rep.fs_delay[k].half_width)});
  }
  std::cout << st.text() << '\n';
  Table nt({"node", "label", "kind", "throughput", "+/-", "mean queue",
            "+/-"});
  for (int i = 0; i < n; ++i) {
    nt.add({std::to_string(i), model.nodes[i].label,
            kind_name(model.nodes[i].kind),
            fixed2(rep.node_throughput[i].mean),
            fixed2(rep.node_throughput[i].half_width),
            fixed2(rep.node_queue_length[i].mean),
            fixed2(rep.node_queue_length[i].half_width)});
  }
  std::cout << nt.text();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Closed-network analysis toolkit for shared electric-vehicle fleets"};
  app.require_subcommand(1);

  SolveOpts so;
  CLI::App* solve =
      app.add_subcommand("solve", "Stationary analysis at a fixed fleet size");
  solve->add_option("--config", so.config_path, "Config file")->required();
  solve->add_option("--fleet-size", so.fleet_size,
                    "Vehicles in the network (overrides the config)");
  solve->add_option("--method", so.method, "mva, convolution, or both");
  solve->add_flag("--marginals", so.marginals,
                  "Also print per-node marginal distributions");
  solve->add_option("--output", so.output, "table, csv, or text");

  FleetOpts fo;
  CLI::App* fleet = app.add_subcommand(
      "fleet-size", "Scan fleet sizes for the constrained profit maximum");
  fleet->add_option("--config", fo.config_path, "Config file")->required();
  fleet->add_option("--max-fleet", fo.max_fleet,
                    "Scan cap (overrides the config)");
  fleet->add_option("--trace", fo.trace_path,
                    "Write the per-M search trace to this CSV file");
  fleet->add_option("--output", fo.output, "table or csv");

  AllocOpts ao;
  CLI::App* alloc = app.add_subcommand(
      "allocate", "Greedy charger allocation across stations");
  alloc->add_option("--config", ao.config_path, "Config file")->required();
  alloc->add_option("--fleet-size", ao.fleet_size,
                    "Vehicles in the network (overrides the config)");
  alloc->add_option("--trace", ao.trace_path,
                    "Write the candidate trace to this CSV file");
  alloc->add_option("--output", ao.output, "table or csv");

  CompareOpts co;
  CLI::App* comp = app.add_subcommand(
      "compare-chargers",
      "One fast charger vs several slow ones at equal capacity");
  comp->add_option("--gamma", co.gamma, "Charger utilization in (0,1)")
      ->required();
  comp->add_option("--t0", co.t0, "Fast-charger mean charge time, hours");
  comp->add_option("--c2-sweep", co.c2_sweep,
                   "Comma-separated charge-time cs2 grid (empty for none)");
  comp->add_option("--output", co.output, "table or csv");
  comp->add_flag("--simulate", co.simulate,
                 "Add measured throughput columns from the two-queue "
                 "experiment");
  CLI::Option* comp_seed =
      comp->add_option("--seed", co.seed, "Base RNG seed (with --simulate)");
  comp->add_option("--horizon", co.horizon, "Hours per replication");
  comp->add_option("--replications", co.replications, "Replications");
  comp->add_option("--servers", co.servers,
                   "Comma-separated slow-server counts (1 = the fast one)");
  comp->add_option("--fleet", co.fleet, "Vehicles in the two-queue cycle");

  SimOpts mo;
  CLI::App* sim = app.add_subcommand(
      "simulate", "Discrete-event simulation of the configured network");
  sim->add_option("--config", mo.config_path, "Config file")->required();
  sim->add_option("--seed", mo.seed, "Base RNG seed (required)")->required();
  sim->add_option("--fleet-size", mo.fleet_size,
                  "Vehicles in the network (overrides the config)");
  sim->add_option("--replications", mo.replications,
                  "Replications (overrides the config)");
  sim->add_option("--horizon", mo.horizon,
                  "Hours per replication (overrides the config)");
  sim->add_option("--warmup", mo.warmup,
                  "Warmup hours (overrides the config)");
  sim->add_option("--csv", mo.csv_path,
                  "Write per-replication metrics to this CSV file");
  sim->add_option("--output", mo.output, "table, csv, or text");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  co.seed_given = comp_seed->count() > 0;

  try {
    if (*solve) return run_solve(so);
    if (*fleet) return run_fleet_size(fo);
    if (*alloc) return run_allocate(ao);
    if (*comp) return run_compare(co);
    if (*sim) return run_simulate(mo);
    std::cerr << "error: no subcommand\n";
    return 2;
  } catch (const InfeasibleAtCap& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return 3;
  } catch (const NumericalBreakdown& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 4;
  } catch (const NumericalUnderflow& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 4;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 1;
  }
}
