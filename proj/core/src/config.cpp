#include "leoroute/config.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace leoroute {

std::string to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::kProposed: return "proposed";
    case PolicyKind::kDijkstra: return "dijkstra";
    case PolicyKind::kMlpDqn: return "mlp_dqn";
    case PolicyKind::kRandom: return "random";
  }
  return "?";
}

PolicyKind policy_from_string(const std::string& name) {
  if (name == "proposed") return PolicyKind::kProposed;
  if (name == "dijkstra") return PolicyKind::kDijkstra;
  if (name == "mlp_dqn") return PolicyKind::kMlpDqn;
  if (name == "random") return PolicyKind::kRandom;
  throw std::invalid_argument(
      "run.policy: unknown policy '" + name +
      "' (expected proposed|dijkstra|mlp_dqn|random)");
}

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

class KeyValues {
 public:
  static KeyValues parse(const std::string& text) {
    KeyValues kv;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      size_t cut = line.find_first_of("#;");
      if (cut != std::string::npos) line = line.substr(0, cut);
      line = trim(line);
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']')
          throw std::invalid_argument("config line " + std::to_string(lineno) +
                                      ": malformed section header");
        section = trim(line.substr(1, line.size() - 2));
        continue;
      }
      size_t eq = line.find('=');
      if (eq == std::string::npos)
        throw std::invalid_argument("config line " + std::to_string(lineno) +
                                    ": expected key = value");
      std::string key = trim(line.substr(0, eq));
      std::string value = trim(line.substr(eq + 1));
      if (section.empty() || key.empty())
        throw std::invalid_argument("config line " + std::to_string(lineno) +
                                    ": key outside a [section] or empty");
      kv.map_[section + "." + key] = value;
    }
    return kv;
  }

  bool has(const std::string& key) const { return map_.count(key) > 0; }

  std::string get_string(const std::string& key, const std::string& dflt) const {
    auto it = map_.find(key);
    if (it == map_.end()) return dflt;
    consumed_.insert(key);
    return it->second;
  }

  double get_double(const std::string& key, double dflt) const {
    auto it = map_.find(key);
    if (it == map_.end()) return dflt;
    consumed_.insert(key);
    try {
      size_t pos = 0;
      double v = std::stod(it->second, &pos);
      if (pos != it->second.size()) throw std::invalid_argument("");
      return v;
    } catch (...) {
      throw std::invalid_argument(key + ": not a number: '" + it->second + "'");
    }
  }

  long get_long(const std::string& key, long dflt) const {
    auto it = map_.find(key);
    if (it == map_.end()) return dflt;
    consumed_.insert(key);
    try {
      size_t pos = 0;
      long v = std::stol(it->second, &pos);
      if (pos != it->second.size()) throw std::invalid_argument("");
      return v;
    } catch (...) {
      throw std::invalid_argument(key + ": not an integer: '" + it->second + "'");
    }
  }

  bool get_bool(const std::string& key, bool dflt) const {
    auto it = map_.find(key);
    if (it == map_.end()) return dflt;
    consumed_.insert(key);
    const std::string& v = it->second;
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw std::invalid_argument(key + ": expected true|false, got '" + v + "'");
  }

  void check_all_consumed() const {
    for (const auto& [key, value] : map_) {
      if (consumed_.count(key) == 0)
        throw std::invalid_argument("unknown config key '" + key + "'");
    }
  }

 private:
  std::map<std::string, std::string> map_;
  mutable std::set<std::string> consumed_;
};

std::vector<HotFlow> parse_hot_flows(const std::string& text) {
  // "src>dst@lambda0[, src>dst@lambda0 ...]"
  std::vector<HotFlow> flows;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    size_t gt = item.find('>');
    size_t at = item.find('@');
    if (gt == std::string::npos || at == std::string::npos || at < gt)
      throw std::invalid_argument(
          "traffic.hot_flows: expected 'src>dst@rate', got '" + item + "'");
    HotFlow f;
    f.src = std::stoi(trim(item.substr(0, gt)));
    f.dst = std::stoi(trim(item.substr(gt + 1, at - gt - 1)));
    f.lambda0 = std::stod(trim(item.substr(at + 1)));
    flows.push_back(f);
  }
  return flows;
}

}  // namespace

double ExperimentConfig::resolved_lambda0() const {
  if (traffic.base_rate_lambda0 > 0.0) return traffic.base_rate_lambda0;
  return calibrate_lambda0(traffic.offered_load_mbps, traffic,
                           constellation.num_satellites,
                           constellation.slot_duration_s);
}

double ExperimentConfig::resolved_load_mbps() const {
  double bits = 8.0 * traffic.packet_size_bytes;
  return resolved_lambda0() * constellation.num_satellites * bits /
         constellation.slot_duration_s / 1e6;
}

PomdpConfig ExperimentConfig::pomdp_config() const {
  PomdpConfig pc;
  pc.max_degree = kMaxDegree;
  pc.max_queue = max_queue;
  pc.altitude_norm_km = constellation.altitude_km;
  pc.packet_size_bytes = traffic.packet_size_bytes;
  return pc;
}

void ExperimentConfig::validate() const {
  constellation.validate();
  traffic.validate();
  link.validate();
  reward.validate();
  agent.net.validate();
  agent.trainer.validate();
  agent.eps.validate();
  if (max_queue <= 0)
    throw std::invalid_argument("transport.max_queue_packets: must be positive");
  if (agent.train_every_slots <= 0)
    throw std::invalid_argument("agent.train_every_slots: must be positive");
  if (!run.seed_set) throw std::invalid_argument("run.seed: required");
  if (run.episodes <= 0 || run.episodes > 1300)
    throw std::invalid_argument("run.episodes: must be in [1, 1300]");
  if (run.slots_per_episode <= 0)
    throw std::invalid_argument("run.slots_per_episode: must be positive");
  if (run.warmup_fraction < 0.0 || run.warmup_fraction >= 1.0)
    throw std::invalid_argument("run.warmup_fraction: must be in [0, 1)");
  if (run.eval_epsilon < 0.0 || run.eval_epsilon > 1.0)
    throw std::invalid_argument("run.eval_epsilon: must be in [0, 1]");
  if (traffic.base_rate_lambda0 == 0.0 && traffic.offered_load_mbps <= 0.0)
    throw std::invalid_argument("traffic.offered_load_mbps: must be positive");
  if (agent.net.max_degree != kMaxDegree)
    throw std::invalid_argument("agent.max_degree: fixed at 4 by the ISL grid");
  int n = constellation.num_satellites;
  for (const HotFlow& f : traffic.hot_flows) {
    if (f.src < 0 || f.src >= n || f.dst < 0 || f.dst >= n)
      throw std::invalid_argument("traffic.hot_flows: node id out of range");
  }
}

ExperimentConfig parse_config_text(const std::string& text) {
  KeyValues kv = KeyValues::parse(text);
  ExperimentConfig c;

  c.constellation.num_planes =
      static_cast<int>(kv.get_long("constellation.num_planes", 5));
  c.constellation.sats_per_plane =
      static_cast<int>(kv.get_long("constellation.sats_per_plane", 9));
  c.constellation.num_satellites = static_cast<int>(kv.get_long(
      "constellation.num_satellites",
      static_cast<long>(c.constellation.num_planes) *
          c.constellation.sats_per_plane));
  c.constellation.inclination_deg =
      kv.get_double("constellation.inclination_deg", 70.0);
  c.constellation.altitude_km = kv.get_double("constellation.altitude_km", 570.0);
  c.constellation.phasing_offset_deg =
      kv.get_double("constellation.phasing_offset_deg", 0.0);
  c.constellation.slot_duration_s =
      kv.get_double("constellation.slot_duration_ms", 10.0) / 1000.0;
  c.constellation.polar_cutoff_deg =
      kv.get_double("constellation.polar_cutoff_deg", 65.0);
  c.constellation.static_topology =
      kv.get_bool("constellation.static_topology", false);

  c.traffic.offered_load_mbps = kv.get_double("traffic.offered_load_mbps", 120.0);
  c.traffic.base_rate_lambda0 = kv.get_double("traffic.lambda0_per_node", 0.0);
  c.traffic.period_slots = kv.get_long("traffic.period_slots", 1000);
  c.traffic.packet_size_bytes =
      static_cast<int>(kv.get_long("traffic.packet_size_bytes", 1500));
  c.traffic.sin_amplitude = kv.get_double("traffic.sin_amplitude", 1.0);
  c.traffic.node_phase_stride_slots =
      kv.get_double("traffic.node_phase_stride_slots", 0.0);
  c.traffic.ttl_hops = static_cast<int>(kv.get_long("traffic.ttl_hops", 30));
  c.traffic.hot_flows = parse_hot_flows(kv.get_string("traffic.hot_flows", ""));

  c.link.capacity_bps = kv.get_double("transport.isl_capacity_mbps", 300.0) * 1e6;
  c.link.processing_delay_s =
      kv.get_double("transport.processing_delay_ms", 1.0) / 1000.0;
  c.max_queue = kv.get_long("transport.max_queue_packets", kMaxQueueDefault);

  c.reward.alpha = kv.get_double("reward.alpha", 0.4);
  c.reward.beta = kv.get_double("reward.beta", 0.6);
  c.reward.delay_norm_s = kv.get_double("reward.delay_norm_ms", 100.0) / 1000.0;
  c.reward.drop_penalty = kv.get_double("reward.drop_penalty", -10.0);
  c.reward.max_queue = c.max_queue;

  c.agent.net.gat_heads = static_cast<int>(kv.get_long("agent.gat_heads", 4));
  c.agent.net.gat_dim = static_cast<int>(kv.get_long("agent.gat_dim", 64));
  c.agent.net.lstm_dim = static_cast<int>(kv.get_long("agent.lstm_dim", 128));
  c.agent.net.qhead_hidden =
      static_cast<int>(kv.get_long("agent.qhead_hidden", 64));
  c.agent.net.mlp_hidden = static_cast<int>(kv.get_long("agent.mlp_hidden", 128));
  c.agent.net.window = static_cast<int>(kv.get_long("agent.window", 8));
  c.agent.net.leak = kv.get_double("agent.gat_leak", 0.2);
  c.agent.net.aggregate_projected =
      kv.get_bool("agent.aggregate_projected", true);

  c.agent.trainer.learning_rate = kv.get_double("agent.learning_rate", 1e-4);
  c.agent.trainer.gamma = kv.get_double("agent.gamma", 0.99);
  c.agent.trainer.batch_size =
      static_cast<int>(kv.get_long("agent.batch_size", 128));
  c.agent.trainer.replay_capacity = static_cast<std::size_t>(
      kv.get_long("agent.replay_capacity", 100000));
  c.agent.trainer.target_sync_steps = kv.get_long("agent.target_sync_steps", 200);
  c.agent.trainer.grad_clip = kv.get_double("agent.grad_clip", 10.0);
  std::string opt = kv.get_string("agent.optimizer", "sgd");
  if (opt == "sgd") {
    c.agent.trainer.use_adam = false;
  } else if (opt == "adam") {
    c.agent.trainer.use_adam = true;
  } else {
    throw std::invalid_argument("agent.optimizer: expected sgd|adam, got '" +
                                opt + "'");
  }

  c.agent.eps.eps0 = kv.get_double("agent.eps_initial", 1.0);
  c.agent.eps.eps_min = kv.get_double("agent.eps_min", 0.01);
  std::string eps_mode = kv.get_string("agent.eps_mode", "exponential");
  if (eps_mode == "exponential") {
    c.agent.eps.mode = EpsilonSchedule::Mode::kExponential;
  } else if (eps_mode == "multiplicative") {
    c.agent.eps.mode = EpsilonSchedule::Mode::kMultiplicative;
  } else {
    throw std::invalid_argument(
        "agent.eps_mode: expected exponential|multiplicative, got '" +
        eps_mode + "'");
  }
  c.agent.eps.k_decay = kv.get_double("agent.eps_decay_k", 199.5);
  c.agent.eps.factor = kv.get_double("agent.eps_decay_factor", 0.995);
  c.agent.train_every_slots = kv.get_long("agent.train_every_slots", 1);

  if (kv.has("run.seed")) {
    c.run.seed = static_cast<std::uint64_t>(kv.get_long("run.seed", 0));
    c.run.seed_set = true;
  }
  c.run.episodes = kv.get_long("run.episodes", 1);
  c.run.slots_per_episode = kv.get_long("run.slots_per_episode", 1000);
  c.run.policy = policy_from_string(kv.get_string("run.policy", "proposed"));
  c.run.out_dir = kv.get_string("run.out_dir", "out");
  c.run.strict_routing = kv.get_bool("run.strict_routing", false);
  c.run.dijkstra_queue_aware = kv.get_bool("run.dijkstra_queue_aware", false);
  c.run.warmup_fraction = kv.get_double("run.warmup_fraction", 0.1);
  c.run.slot_logs = kv.get_bool("run.slot_logs", false);
  c.run.arrivals_log = kv.get_bool("run.arrivals_log", false);
  c.run.eval_epsilon = kv.get_double("run.eval_epsilon", 0.0);
  c.run.checkpoint_in = kv.get_string("run.checkpoint", "");

  kv.check_all_consumed();
  c.validate();
  return c;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

}  // namespace leoroute
