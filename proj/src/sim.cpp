#include "evq/sim.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <queue>
#include <string>
#include <tuple>
#include <utility>

#include "evq/errors.hpp"
#include "evq/rng.hpp"

namespace evq {

namespace {

// Heap events: passenger arrivals recur at SS nodes; completions carry the
// vehicle finishing a travel leg (IS) or a charge (FS). The vehicle pickup
// an arrival triggers is handled inside the arrival event itself.
//
// Equal timestamps are ordered completion first, then by node index, then
// by insertion order. Exponential clocks never tie, but deterministic and
// zero-inflated services do, and the order must not depend on heap
// internals.
struct Event {
  double time = 0.0;
  int kind = 0;  // 0 completion, 1 arrival
  int node = 0;
  std::uint64_t seq = 0;
  int vehicle = -1;
};

struct EventAfter {
  bool operator()(const Event& a, const Event& b) const {
    return std::tie(a.time, a.kind, a.node, a.seq) >
           std::tie(b.time, b.kind, b.node, b.seq);
  }
};

class Engine {
 public:
  Engine(const SimConfig& cfg, double warmup, int replication)
      : cfg_(cfg),
        model_(cfg.model),
        n_(model_.node_count()),
        s_(model_.station_count),
        warmup_(warmup) {
    rng_.reserve(n_);
    for (int i = 0; i < n_; ++i) {
      rng_.push_back(node_stream(cfg.base_seed,
                                 static_cast<std::uint64_t>(replication),
                                 static_cast<std::uint64_t>(i)));
    }
    count_.assign(n_, 0);
    last_.assign(n_, 0.0);
    integral_.assign(n_, 0.0);
    completions_.assign(n_, 0);
    avail_int_.assign(s_, 0.0);
    arrivals_.assign(s_, 0);
    losses_.assign(s_, 0);
    delay_sum_.assign(s_, 0.0);
    delay_cnt_.assign(s_, 0);
    ss_queue_.resize(s_);
    fs_wait_.resize(s_);
    fs_busy_.assign(s_, 0);
    join_time_.assign(std::max(cfg.fleet_size, 1), 0.0);
    window_arrivals_.assign(s_, 0);
    window_losses_.assign(s_, 0);
    window_delay_sum_.assign(s_, 0.0);
    window_delay_cnt_.assign(s_, 0);

    const double len =
        (cfg.horizon_hours - warmup_) / static_cast<double>(cfg.batches);
    boundaries_.reserve(cfg.batches + 1);
    for (int b = 0; b <= cfg.batches; ++b) {
      boundaries_.push_back(warmup_ + len * static_cast<double>(b));
    }
    boundaries_.back() = cfg.horizon_hours;

    node_thr_out_.resize(n_);
    node_q_out_.resize(n_);
    avail_out_.resize(s_);
    loss_out_.resize(s_);
    delay_out_.resize(s_);
  }

  void run() {
    for (int v = 0; v < cfg_.fleet_size; ++v) {
      const int st = v % s_;
      ++count_[model_.ss_node[st]];
      ss_queue_[st].push_back(v);
    }
    for (int st = 0; st < s_; ++st) {
      const int node = model_.ss_node[st];
      const double ia = cfg_.node_distributions[node].sample(rng_[node]);
      push_event(ia, 1, node, -1);
    }
    while (!heap_.empty()) {
      const Event e = heap_.top();
      if (e.time >= cfg_.horizon_hours) break;
      heap_.pop();
      advance(e.time);
      if (e.kind == 1) {
        on_arrival(e.node, e.time);
      } else {
        on_completion(e.node, e.vehicle, e.time);
      }
      if (cfg_.audit_conservation) audit();
    }
    advance(cfg_.horizon_hours);
  }

  ReplicationMetrics metrics(std::uint64_t seed) const {
    ReplicationMetrics m;
    m.seed = seed;
    m.node_throughput.resize(n_);
    m.node_queue_length.resize(n_);
    for (int i = 0; i < n_; ++i) {
      m.node_throughput[i] = summarize_batches(node_thr_out_[i]).mean;
      m.node_queue_length[i] = summarize_batches(node_q_out_[i]).mean;
      m.system_throughput += m.node_throughput[i];
    }
    m.availability.resize(s_);
    m.loss_fraction.resize(s_);
    m.fs_delay.resize(s_);
    for (int st = 0; st < s_; ++st) {
      m.availability[st] = summarize_batches(avail_out_[st]).mean;
      m.loss_fraction[st] =
          window_arrivals_[st] > 0
              ? static_cast<double>(window_losses_[st]) /
                    static_cast<double>(window_arrivals_[st])
              : 0.0;
      m.fs_delay[st] = window_delay_cnt_[st] > 0
                           ? window_delay_sum_[st] /
                                 static_cast<double>(window_delay_cnt_[st])
                           : 0.0;
      m.arrivals += window_arrivals_[st];
      m.losses += window_losses_[st];
    }
    return m;
  }

  std::vector<double> system_thr_batches() const {
    std::vector<double> out(sys_out_);
    return out;
  }
  const std::vector<std::vector<double>>& node_thr_batches() const {
    return node_thr_out_;
  }
  const std::vector<std::vector<double>>& node_q_batches() const {
    return node_q_out_;
  }
  const std::vector<std::vector<double>>& avail_batches() const {
    return avail_out_;
  }
  const std::vector<std::vector<double>>& loss_batches() const {
    return loss_out_;
  }
  const std::vector<std::vector<double>>& delay_batches() const {
    return delay_out_;
  }

 private:
  void push_event(double time, int kind, int node, int vehicle) {
    heap_.push(Event{time, kind, node, seq_++, vehicle});
  }

  // Lazy time accounting: a node's integral only advances when its count
  // changes or a batch boundary forces a flush.
  void touch(int i, double t) {
    const double dt = t - last_[i];
    if (dt > 0.0) {
      integral_[i] += static_cast<double>(count_[i]) * dt;
      const Node& nd = model_.nodes[i];
      if (nd.kind == NodeKind::SingleServer && count_[i] > 0) {
        avail_int_[nd.station] += dt;
      }
    }
    last_[i] = t;
  }

  void change_count(int i, int delta, double t) {
    touch(i, t);
    count_[i] += delta;
  }

  void advance(double t) {
    while (boundary_idx_ < static_cast<int>(boundaries_.size()) &&
           t >= boundaries_[boundary_idx_]) {
      const double tb = boundaries_[boundary_idx_];
      for (int i = 0; i < n_; ++i) touch(i, tb);
      if (boundary_idx_ > 0) {
        record_batch(tb - boundaries_[boundary_idx_ - 1]);
      }
      reset_accumulators();
      ++boundary_idx_;
    }
  }

  void record_batch(double len) {
    long long total = 0;
    for (int i = 0; i < n_; ++i) {
      total += completions_[i];
      node_thr_out_[i].push_back(static_cast<double>(completions_[i]) / len);
      node_q_out_[i].push_back(integral_[i] / len);
    }
    sys_out_.push_back(static_cast<double>(total) / len);
    for (int st = 0; st < s_; ++st) {
      avail_out_[st].push_back(avail_int_[st] / len);
      if (arrivals_[st] > 0) {
        loss_out_[st].push_back(static_cast<double>(losses_[st]) /
                                static_cast<double>(arrivals_[st]));
      }
      if (delay_cnt_[st] > 0) {
        delay_out_[st].push_back(delay_sum_[st] /
                                 static_cast<double>(delay_cnt_[st]));
      }
      window_arrivals_[st] += arrivals_[st];
      window_losses_[st] += losses_[st];
      window_delay_sum_[st] += delay_sum_[st];
      window_delay_cnt_[st] += delay_cnt_[st];
    }
  }

  void reset_accumulators() {
    std::fill(integral_.begin(), integral_.end(), 0.0);
    std::fill(completions_.begin(), completions_.end(), 0);
    std::fill(avail_int_.begin(), avail_int_.end(), 0.0);
    std::fill(arrivals_.begin(), arrivals_.end(), 0);
    std::fill(losses_.begin(), losses_.end(), 0);
    std::fill(delay_sum_.begin(), delay_sum_.end(), 0.0);
    std::fill(delay_cnt_.begin(), delay_cnt_.end(), 0);
  }

  void on_arrival(int node, double t) {
    const int st = model_.nodes[node].station;
    ++arrivals_[st];
    const double ia = cfg_.node_distributions[node].sample(rng_[node]);
    push_event(t + ia, 1, node, -1);
    auto& q = ss_queue_[st];
    if (q.empty()) {
      ++losses_[st];
      return;
    }
    const int veh = q.front();
    q.pop_front();
    change_count(node, -1, t);
    complete_service(node, veh, t);
  }

  void on_completion(int node, int veh, double t) {
    const Node& nd = model_.nodes[node];
    change_count(node, -1, t);
    if (nd.kind == NodeKind::FiniteServer) {
      const int st = nd.station;
      delay_sum_[st] += t - join_time_[veh];
      ++delay_cnt_[st];
      if (!fs_wait_[st].empty()) {
        const int w = fs_wait_[st].front();
        fs_wait_[st].pop_front();
        const double d = cfg_.node_distributions[node].sample(rng_[node]);
        push_event(t + d, 0, node, w);
      } else {
        --fs_busy_[st];
      }
    }
    complete_service(node, veh, t);
  }

  void complete_service(int node, int veh, double t) {
    ++completions_[node];
    const auto& row = model_.routing[node];
    int target = row.back().first;
    if (row.size() > 1) {
      const double u = rng_[node].next_double();
      double acc = 0.0;
      for (const auto& [j, p] : row) {
        acc += p;
        if (u < acc) {
          target = j;
          break;
        }
      }
    }
    deliver(target, veh, t);
  }

  void deliver(int node, int veh, double t) {
    change_count(node, +1, t);
    const Node& nd = model_.nodes[node];
    switch (nd.kind) {
      case NodeKind::SingleServer:
        ss_queue_[nd.station].push_back(veh);
        break;
      case NodeKind::InfiniteServer: {
        const double d = cfg_.node_distributions[node].sample(rng_[node]);
        push_event(t + d, 0, node, veh);
        break;
      }
      case NodeKind::FiniteServer: {
        join_time_[veh] = t;
        const int st = nd.station;
        if (fs_busy_[st] < nd.servers) {
          ++fs_busy_[st];
          const double d = cfg_.node_distributions[node].sample(rng_[node]);
          push_event(t + d, 0, node, veh);
        } else {
          fs_wait_[st].push_back(veh);
        }
        break;
      }
    }
  }

  void audit() const {
    long long total = 0;
    for (int i = 0; i < n_; ++i) total += count_[i];
    if (total != cfg_.fleet_size) {
      throw Error("vehicle conservation violated: " + std::to_string(total) +
                  " counted, " + std::to_string(cfg_.fleet_size) +
                  " deployed");
    }
  }

  const SimConfig& cfg_;
  const NetworkModel& model_;
  int n_;
  int s_;
  double warmup_;

  std::vector<Pcg32> rng_;
  std::priority_queue<Event, std::vector<Event>, EventAfter> heap_;
  std::uint64_t seq_ = 0;

  std::vector<int> count_;
  std::vector<double> last_;
  std::vector<double> integral_;
  std::vector<long long> completions_;
  std::vector<double> avail_int_;
  std::vector<long long> arrivals_;
  std::vector<long long> losses_;
  std::vector<double> delay_sum_;
  std::vector<long long> delay_cnt_;
  std::vector<std::deque<int>> ss_queue_;
  std::vector<std::deque<int>> fs_wait_;
  std::vector<int> fs_busy_;
  std::vector<double> join_time_;

  std::vector<double> boundaries_;
  int boundary_idx_ = 0;

  std::vector<std::vector<double>> node_thr_out_;
  std::vector<std::vector<double>> node_q_out_;
  std::vector<double> sys_out_;
  std::vector<std::vector<double>> avail_out_;
  std::vector<std::vector<double>> loss_out_;
  std::vector<std::vector<double>> delay_out_;

  std::vector<long long> window_arrivals_;
  std::vector<long long> window_losses_;
  std::vector<double> window_delay_sum_;
  std::vector<long long> window_delay_cnt_;
};

MetricEstimate pool_metric(const std::vector<BatchSummary>& reps) {
  // Replications that never observed the metric (no arrivals, no charges)
  // carry no information and would drag the mean toward zero.
  std::vector<BatchSummary> seen;
  seen.reserve(reps.size());
  for (const BatchSummary& b : reps) {
    if (b.batches > 0) seen.push_back(b);
  }
  return pool_replications(seen);
}

}  // namespace

std::vector<Distribution> exponential_node_distributions(
    const NetworkModel& model) {
  std::vector<Distribution> out;
  out.reserve(model.nodes.size());
  for (const Node& nd : model.nodes) {
    out.push_back(Distribution::exponential(1.0 / nd.base_rate));
  }
  return out;
}

SimulationReport simulate(const SimConfig& config) {
  validate_model(config.model);
  const int n = config.model.node_count();
  const int s = config.model.station_count;
  if (static_cast<int>(config.node_distributions.size()) != n) {
    throw InvalidConfig("need one distribution per node: " +
                        std::to_string(config.node_distributions.size()) +
                        " given for " + std::to_string(n) + " nodes");
  }
  if (config.fleet_size < 0) throw InvalidConfig("negative fleet size");
  if (!(config.horizon_hours > 0.0)) {
    throw InvalidConfig("horizon must be positive");
  }
  const double warmup = config.warmup_hours < 0.0
                            ? 0.1 * config.horizon_hours
                            : config.warmup_hours;
  if (!(warmup < config.horizon_hours)) {
    throw InvalidConfig("warmup must be shorter than the horizon");
  }
  if (config.replications < 1) throw InvalidConfig("need >= 1 replications");
  if (config.batches < 1) throw InvalidConfig("need >= 1 batches");

  SimulationReport report;
  report.replications = config.replications;
  report.batches = config.batches;
  report.horizon_hours = config.horizon_hours;
  report.warmup_hours = warmup;
  report.base_seed = config.base_seed;

  std::vector<std::vector<BatchSummary>> node_thr(n), node_q(n);
  std::vector<std::vector<BatchSummary>> avail(s), loss(s), delay(s);
  std::vector<BatchSummary> sys_thr;

  for (int r = 0; r < config.replications; ++r) {
    Engine engine(config, warmup, r);
    engine.run();
    const std::uint64_t seed =
        config.base_seed ^ static_cast<std::uint64_t>(r);
    report.replication_seeds.push_back(seed);
    report.replication_rows.push_back(engine.metrics(seed));
    sys_thr.push_back(summarize_batches(engine.system_thr_batches()));
    for (int i = 0; i < n; ++i) {
      node_thr[i].push_back(summarize_batches(engine.node_thr_batches()[i]));
      node_q[i].push_back(summarize_batches(engine.node_q_batches()[i]));
    }
    for (int st = 0; st < s; ++st) {
      avail[st].push_back(summarize_batches(engine.avail_batches()[st]));
      loss[st].push_back(summarize_batches(engine.loss_batches()[st]));
      delay[st].push_back(summarize_batches(engine.delay_batches()[st]));
    }
  }

  report.system_throughput = pool_metric(sys_thr);
  report.node_throughput.resize(n);
  report.node_queue_length.resize(n);
  for (int i = 0; i < n; ++i) {
    report.node_throughput[i] = pool_metric(node_thr[i]);
    report.node_queue_length[i] = pool_metric(node_q[i]);
  }
  report.availability.resize(s);
  report.loss_fraction.resize(s);
  report.fs_delay.resize(s);
  for (int st = 0; st < s; ++st) {
    report.availability[st] = pool_metric(avail[st]);
    report.loss_fraction[st] = pool_metric(loss[st]);
    report.fs_delay[st] = pool_metric(delay[st]);
  }
  return report;
}

namespace {

NetworkModel two_queue_model(double stage_mean, int servers, double t0) {
  NetworkModel m;
  Node stage;
  stage.kind = NodeKind::SingleServer;
  stage.base_rate = 1.0 / stage_mean;
  stage.servers = 1;
  stage.station = 0;
  stage.label = "SS:loop";
  Node charger;
  charger.kind = NodeKind::FiniteServer;
  charger.base_rate = 1.0 / (static_cast<double>(servers) * t0);
  charger.servers = servers;
  charger.station = 0;
  charger.label = "FS:loop";
  m.nodes = {stage, charger};
  m.routing = {{{1, 1.0}}, {{0, 1.0}}};
  m.station_count = 1;
  m.station_ids = {"loop"};
  m.ss_node = {0};
  m.fs_node = {1};
  validate_model(m);
  return m;
}

}  // namespace

TwoQueueResult two_queue_charger_experiment(const TwoQueueSettings& settings) {
  if (settings.cs2_grid.empty()) {
    throw InvalidConfig("dispersion sweep is empty");
  }
  if (!(settings.t0 > 0.0) || !(settings.queue1_mean > 0.0)) {
    throw InvalidConfig("two-queue mean service times must be positive");
  }
  if (settings.fleet_size < 1) {
    throw InvalidConfig("two-queue experiment needs at least one vehicle");
  }
  if (settings.server_options.empty()) {
    throw InvalidConfig("no server options given");
  }
  for (int k : settings.server_options) {
    if (k < 1) throw InvalidConfig("server counts must be >= 1");
  }
  for (std::size_t i = 1; i < settings.cs2_grid.size(); ++i) {
    if (settings.cs2_grid[i] <= settings.cs2_grid[i - 1]) {
      throw InvalidConfig("dispersion sweep must be strictly increasing");
    }
  }

  TwoQueueResult out;
  out.cs2_grid = settings.cs2_grid;
  for (std::size_t oi = 0; oi < settings.server_options.size(); ++oi) {
    const int servers = settings.server_options[oi];
    TwoQueueOption opt;
    opt.servers = servers;
    for (std::size_t gi = 0; gi < settings.cs2_grid.size(); ++gi) {
      SimConfig cfg;
      cfg.model = two_queue_model(settings.queue1_mean, servers, settings.t0);
      cfg.fleet_size = settings.fleet_size;
      cfg.node_distributions = {
          Distribution::exponential(settings.queue1_mean),
          Distribution::make(settings.charge_family,
                             static_cast<double>(servers) * settings.t0,
                             settings.cs2_grid[gi])};
      cfg.horizon_hours = settings.horizon_hours;
      cfg.replications = settings.replications;
      cfg.base_seed =
          mix64(settings.base_seed ^
                (static_cast<std::uint64_t>(servers) << 32) ^
                static_cast<std::uint64_t>(gi));
      const SimulationReport rep = simulate(cfg);
      opt.throughput.push_back(rep.node_throughput[1]);
    }
    out.options.push_back(std::move(opt));
  }

  const TwoQueueOption* single = nullptr;
  for (const TwoQueueOption& o : out.options) {
    if (o.servers == 1) {
      single = &o;
      break;
    }
  }
  if (single != nullptr) {
    for (TwoQueueOption& o : out.options) {
      if (o.servers == 1) continue;
      for (std::size_t i = 1; i < out.cs2_grid.size(); ++i) {
        const double before =
            o.throughput[i - 1].mean - single->throughput[i - 1].mean;
        const double after = o.throughput[i].mean - single->throughput[i].mean;
        if (before <= 0.0 && after > 0.0) {
          const double w = after == before ? 0.0 : -before / (after - before);
          o.crossing_cs2 = out.cs2_grid[i - 1] +
                           w * (out.cs2_grid[i] - out.cs2_grid[i - 1]);
          break;
        }
      }
    }
  }
  return out;
}

}  // namespace evq
