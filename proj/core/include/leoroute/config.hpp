#pragma once

#include <string>

#include "leoroute/agent.hpp"
#include "leoroute/constellation.hpp"
#include "leoroute/pomdp.hpp"
#include "leoroute/traffic.hpp"
#include "leoroute/transport.hpp"

namespace leoroute {

enum class PolicyKind { kProposed, kDijkstra, kMlpDqn, kRandom };

std::string to_string(PolicyKind kind);
PolicyKind policy_from_string(const std::string& name);

struct AgentSettings {
  NetConfig net;
  TrainerConfig trainer;
  EpsilonSchedule eps;
  long train_every_slots = 1;
};

struct RunSettings {
  std::uint64_t seed = 0;
  bool seed_set = false;  // the seed key is mandatory
  long episodes = 1;
  long slots_per_episode = 1000;
  PolicyKind policy = PolicyKind::kProposed;
  std::string out_dir = "out";
  bool strict_routing = false;
  bool dijkstra_queue_aware = false;
  double warmup_fraction = 0.1;
  bool slot_logs = false;
  bool arrivals_log = false;
  double eval_epsilon = 0.0;
  bool train = false;          // learning enabled (set by the train subcommand)
  std::string checkpoint_in;   // optional checkpoint to start from
};

struct ExperimentConfig {
  ConstellationConfig constellation;
  TrafficConfig traffic;
  LinkParams link;
  long max_queue = kMaxQueueDefault;
  RewardWeights reward;
  AgentSettings agent;
  RunSettings run;

  // lambda0 from the explicit key when given, otherwise calibrated from the
  // offered load preset.
  double resolved_lambda0() const;
  // Aggregate offered load implied by the resolved lambda0, Mbps.
  double resolved_load_mbps() const;

  PomdpConfig pomdp_config() const;

  void validate() const;  // throws std::invalid_argument with field paths
};

// Plain-text sectioned key/value format:
//   [section]
//   key = value   # comment
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

}  // namespace leoroute
