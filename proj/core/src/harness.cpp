#include "leoroute/harness.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>
#include <stdexcept>

namespace leoroute {

namespace {

std::unique_ptr<QNetwork> build_network(const ExperimentConfig& cfg,
                                        bool gat_lstm) {
  if (!cfg.run.checkpoint_in.empty()) {
    std::ifstream in(cfg.run.checkpoint_in, std::ios::binary);
    if (!in)
      throw std::invalid_argument("run.checkpoint: cannot open " +
                                  cfg.run.checkpoint_in);
    auto net = load_network(in);
    std::string want = gat_lstm ? "gat_lstm" : "mlp";
    if (net->kind() != want)
      throw std::invalid_argument("run.checkpoint: network kind '" +
                                  net->kind() + "' does not match policy");
    return net;
  }
  Rng rng = make_rng(cfg.run.seed, Stream::kParamInit);
  return gat_lstm ? make_gat_lstm_net(cfg.agent.net, rng)
                  : make_mlp_net(cfg.agent.net, rng);
}

}  // namespace

std::unique_ptr<Policy> make_policy(const ExperimentConfig& cfg) {
  switch (cfg.run.policy) {
    case PolicyKind::kRandom:
      return std::make_unique<RandomPolicy>();
    case PolicyKind::kDijkstra:
      return std::make_unique<DijkstraPolicy>(cfg.link,
                                              cfg.traffic.packet_size_bytes,
                                              cfg.run.dijkstra_queue_aware);
    case PolicyKind::kProposed:
    case PolicyKind::kMlpDqn: {
      bool gat = cfg.run.policy == PolicyKind::kProposed;
      DqnPolicyConfig pc;
      pc.trainer = cfg.agent.trainer;
      pc.eps = cfg.agent.eps;
      pc.train_every_slots = cfg.agent.train_every_slots;
      pc.learning = cfg.run.train;
      pc.eval_epsilon = cfg.run.eval_epsilon;
      return std::make_unique<DqnPolicy>(build_network(cfg, gat), pc,
                                         cfg.run.seed,
                                         to_string(cfg.run.policy));
    }
  }
  throw std::logic_error("make_policy: unreachable");
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

RunResult run_experiment(const ExperimentConfig& cfg_in) {
  ExperimentConfig cfg = cfg_in;
  cfg.validate();
  cfg.traffic.base_rate_lambda0 = cfg.resolved_lambda0();

  Constellation constellation = build_constellation(cfg.constellation);
  std::unique_ptr<Policy> policy = make_policy(cfg);
  auto* dqn = dynamic_cast<DqnPolicy*>(policy.get());

  EngineConfig ecfg;
  ecfg.link = cfg.link;
  ecfg.max_queue = cfg.max_queue;
  ecfg.reward = cfg.reward;
  ecfg.pomdp = cfg.pomdp_config();
  ecfg.window = dqn != nullptr ? dqn->trainer().net().config().window
                               : cfg.agent.net.window;
  ecfg.strict_routing = cfg.run.strict_routing;
  ecfg.seed = cfg.run.seed;

  Simulation sim(constellation, cfg.traffic, ecfg, *policy);

  std::vector<SlotStats> measured;
  std::vector<SlotStats> all_slots;
  bool keep_all = cfg.run.slot_logs || cfg.run.arrivals_log;
  long warmup =
      static_cast<long>(std::floor(cfg.run.warmup_fraction *
                                   static_cast<double>(cfg.run.slots_per_episode)));
  RunResult result;
  for (long ep = 0; ep < cfg.run.episodes; ++ep) {
    sim.begin_episode();
    for (long s = 0; s < cfg.run.slots_per_episode; ++s) {
      SlotStats st = sim.step();
      result.decisions += st.decisions;
      if (s >= warmup) measured.push_back(st);
      if (keep_all) all_slots.push_back(std::move(st));
    }
    if (!sim.conservation_ok())
      throw std::logic_error("run_experiment: packet conservation violated at episode " +
                             std::to_string(ep));
  }

  MetricsParams mp;
  mp.slot_duration_s = cfg.constellation.slot_duration_s;
  mp.offered_load_mbps = cfg.resolved_load_mbps();
  mp.num_nodes = cfg.constellation.num_satellites;
  mp.max_queue = cfg.max_queue;
  mp.warmup_fraction = 0.0;  // warmup already excluded per episode
  result.metrics = compute_metrics(measured, mp);
  result.metrics.policy = to_string(cfg.run.policy);
  result.metrics.seed = cfg.run.seed;
  result.metrics.validate(mp);
  result.totals = sim.totals();
  result.disconnected_slots = sim.disconnected_slots();
  if (dqn != nullptr) result.training_log = dqn->training_log();

  if (!cfg.run.out_dir.empty()) {
    namespace fs = std::filesystem;
    fs::create_directories(cfg.run.out_dir);
    {
      std::ofstream out(fs::path(cfg.run.out_dir) / "summary.csv");
      write_summary_csv(out, std::span<const RunMetrics>(&result.metrics, 1));
    }
    if (dqn != nullptr && cfg.run.train) {
      std::ofstream out(fs::path(cfg.run.out_dir) / "training_log.csv");
      write_training_log_csv(out, result.training_log);
      std::ofstream ck(fs::path(cfg.run.out_dir) / "checkpoint.bin",
                       std::ios::binary);
      dqn->save_checkpoint(ck);
    }
    if (cfg.run.slot_logs) {
      std::ofstream out(fs::path(cfg.run.out_dir) / "slot_log.csv");
      write_slot_log_csv(out, all_slots);
    }
    if (cfg.run.arrivals_log) {
      std::ofstream out(fs::path(cfg.run.out_dir) / "arrivals.csv");
      write_arrivals_csv(out, all_slots);
    }
  }
  return result;
}

std::vector<RunMetrics> load_sweep(const ExperimentConfig& base,
                                   const std::vector<double>& loads_mbps) {
  if (loads_mbps.empty())
    throw std::invalid_argument("load_sweep: no loads given");
  std::vector<std::future<RunResult>> cells;
  cells.reserve(loads_mbps.size());
  for (double load : loads_mbps) {
    ExperimentConfig cfg = base;
    cfg.traffic.offered_load_mbps = load;
    cfg.traffic.base_rate_lambda0 = 0.0;  // re-calibrate per cell
    if (!cfg.run.out_dir.empty()) {
      std::ostringstream dir;
      dir << cfg.run.out_dir << "/load_" << load;
      cfg.run.out_dir = dir.str();
    }
    cells.push_back(std::async(std::launch::async,
                               [cfg]() { return run_experiment(cfg); }));
  }
  std::vector<RunMetrics> rows;
  rows.reserve(cells.size());
  for (auto& cell : cells) rows.push_back(cell.get().metrics);
  return rows;
}

void write_summary_csv(std::ostream& out, std::span<const RunMetrics> rows) {
  out << "policy,load_mbps,seed,throughput_mbps,delay_ms,loss_rate,mean_queue\n";
  for (const RunMetrics& m : rows) {
    out << m.policy << ',' << format_double(m.load_mbps) << ',' << m.seed << ','
        << format_double(m.throughput_mbps) << ',';
    if (m.mean_delay_ms) out << format_double(*m.mean_delay_ms);
    out << ',' << format_double(m.loss_rate) << ','
        << format_double(m.mean_queue) << '\n';
  }
}

std::vector<RunMetrics> parse_summary_csv(std::istream& in) {
  std::vector<RunMetrics> rows;
  std::string line;
  if (!std::getline(in, line)) return rows;  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string field;
    RunMetrics m;
    std::getline(ls, m.policy, ',');
    std::getline(ls, field, ',');
    m.load_mbps = std::stod(field);
    std::getline(ls, field, ',');
    m.seed = static_cast<std::uint64_t>(std::stoull(field));
    std::getline(ls, field, ',');
    m.throughput_mbps = std::stod(field);
    std::getline(ls, field, ',');
    if (!field.empty()) m.mean_delay_ms = std::stod(field);
    std::getline(ls, field, ',');
    m.loss_rate = std::stod(field);
    std::getline(ls, field, ',');
    m.mean_queue = std::stod(field);
    rows.push_back(std::move(m));
  }
  return rows;
}

void write_training_log_csv(std::ostream& out,
                            std::span<const TrainLogRow> rows) {
  out << "step,epsilon,loss,mean_reward,buffer_size\n";
  for (const TrainLogRow& r : rows) {
    out << r.step << ',' << format_double(r.epsilon) << ','
        << format_double(r.loss) << ',' << format_double(r.mean_reward) << ','
        << r.buffer_size << '\n';
  }
}

void write_slot_log_csv(std::ostream& out, std::span<const SlotStats> slots) {
  out << "slot,node,queue_len,delivered,dropped_overflow,dropped_ttl\n";
  for (const SlotStats& s : slots) {
    for (size_t i = 0; i < s.node_queue_end.size(); ++i) {
      out << s.slot << ',' << i << ',' << s.node_queue_end[i] << ','
          << s.node_delivered[i] << ',' << s.node_dropped_overflow[i] << ','
          << s.node_dropped_ttl[i] << '\n';
    }
  }
}

void write_arrivals_csv(std::ostream& out, std::span<const SlotStats> slots) {
  out << "slot,node,arrivals\n";
  for (const SlotStats& s : slots) {
    for (size_t i = 0; i < s.node_arrivals.size(); ++i)
      out << s.slot << ',' << i << ',' << s.node_arrivals[i] << '\n';
  }
}

void write_green_csv(std::ostream& out,
                     std::span<const std::pair<std::string, GreenReport>> rows) {
  out << "method,decisions,time_per_decision_ms,tdp_w,"
         "carbon_intensity_g_per_kwh,energy_kwh,co2_g\n";
  for (const auto& [name, r] : rows) {
    out << name << ',' << r.n_decisions << ','
        << format_double(r.time_per_decision_ms) << ','
        << format_double(r.tdp_w) << ','
        << format_double(r.carbon_intensity_g_per_kwh) << ','
        << format_double(r.energy_kwh) << ',' << format_double(r.co2_g) << '\n';
  }
}

void dump_topology_csvs(const Constellation& c, long slots,
                        const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  for (long t = 0; t < slots; ++t) {
    long topo_slot = c.config.static_topology ? 0 : t;
    auto pos = propagate(c, topo_slot);
    TopologySnapshot snap = snapshot(pos, c, t);
    {
      std::ofstream out(fs::path(dir) / ("positions_" + std::to_string(t) + ".csv"));
      out << "sat_id,x_km,y_km,z_km\n";
      for (const SatellitePosition& p : pos) {
        out << p.sat_id << ',' << format_double(p.coords_km.x) << ','
            << format_double(p.coords_km.y) << ','
            << format_double(p.coords_km.z) << '\n';
      }
    }
    {
      std::ofstream out(fs::path(dir) / ("edges_" + std::to_string(t) + ".csv"));
      out << "src,dst,distance_km\n";
      for (const Edge& e : snap.edges) {
        out << e.a << ',' << e.b << ',' << format_double(e.distance_km) << '\n';
      }
    }
  }
}

}  // namespace leoroute
