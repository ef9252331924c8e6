#pragma once

#include <deque>
#include <map>
#include <unordered_map>
#include <vector>

#include "leoroute/agent.hpp"
#include "leoroute/constellation.hpp"
#include "leoroute/pomdp.hpp"
#include "leoroute/traffic.hpp"
#include "leoroute/transport.hpp"

namespace leoroute {

inline constexpr int kNoRoute = -1;

// Everything a routing decision may look at, frozen at slot start.
struct SlotContext {
  long slot = 0;
  TopologySnapshot snap;
  std::vector<SatellitePosition> positions;
  std::vector<long> queue_len;
};

struct DecisionContext {
  int node = 0;
  const Packet* packet = nullptr;
  const SlotContext* ctx = nullptr;
  const double* obs_window = nullptr;  // window rows x obs_size
  const char* valid_mask = nullptr;    // max_degree entries
  int degree = 0;
};

class Policy {
 public:
  virtual ~Policy() = default;
  virtual const char* name() const = 0;
  virtual void begin_slot(const SlotContext&) {}
  // Neighbor slot index in [0, degree), or kNoRoute to hold the packet.
  virtual int decide(const DecisionContext& dc, Rng& rng) = 0;
  virtual void observe_transition(Transition&&) {}
  virtual void end_slot(const SlotContext&) {}
};

struct EngineConfig {
  LinkParams link;
  long max_queue = kMaxQueueDefault;
  RewardWeights reward;
  PomdpConfig pomdp;
  int window = 8;
  bool strict_routing = true;  // violations throw; otherwise counted + dropped
  bool record_deliveries = false;
  std::uint64_t seed = 1;
};

struct SlotStats {
  long slot = 0;
  long generated = 0;
  long delivered = 0;
  long dropped_overflow = 0;
  long dropped_ttl = 0;
  long decisions = 0;
  long queue_sum_end = 0;
  double delivered_delay_sum_s = 0.0;
  double delivered_bits = 0.0;
  std::vector<long> node_queue_end;
  std::vector<long> node_arrivals;
  std::vector<long> node_delivered;
  std::vector<long> node_dropped_overflow;
  std::vector<long> node_dropped_ttl;
};

struct Totals {
  long generated = 0;
  long delivered = 0;
  long dropped_overflow = 0;
  long dropped_ttl = 0;
  long dropped_violation = 0;
  long routing_violations = 0;
  long flushed_at_reset = 0;  // packets discarded by an episode reset
};

struct DeliveryRecord {
  long created_slot = 0;
  long arrival_slot = 0;
  double e2e_delay_s = 0.0;
  double prop_sum_s = 0.0;
  int hops = 0;
};

// Discrete-time packet engine: per-slot service with per-link shares, a
// propagation pipeline, FIFO queues with arrival-side overflow, TTL
// enforcement, and per-packet transition bookkeeping for learning policies.
class Simulation {
 public:
  Simulation(Constellation constellation, TrafficConfig traffic,
             EngineConfig engine, Policy& policy);

  int num_nodes() const { return constellation_.config.num_satellites; }
  long slot() const { return slot_; }
  const Totals& totals() const { return totals_; }
  const EngineConfig& engine_config() const { return ecfg_; }

  // Queued plus airborne packets.
  long in_flight() const;
  bool conservation_ok() const;

  // Clears queues, pipeline, histories and pending episodes; restarts the
  // slot clock. Counters persist (flushed packets are accounted separately).
  void begin_episode();

  SlotStats step();

  // Observation window for (node, dst) over the retained slot history,
  // front zero-padded; out must hold window * obs_size doubles.
  void materialize_window(int node, int dst, double* out) const;

  long queue_length(int node) const;
  long disconnected_slots() const { return disconnected_slots_; }
  const std::vector<DeliveryRecord>& deliveries() const { return deliveries_; }

 private:
  struct InFlight {
    Packet packet;
    int to = 0;
  };
  struct PendingTransition {
    std::vector<double> window;
    int action = 0;
    double reward = 0.0;
  };

  SlotContext make_context() const;
  void finalize_pending(long packet_id, const double* next_window, bool done,
                        double extra_reward);

  Constellation constellation_;
  TrafficConfig traffic_;
  EngineConfig ecfg_;
  Policy& policy_;

  std::vector<NodeState> nodes_;
  std::map<long, std::vector<InFlight>> pipeline_;  // arrival slot -> packets
  std::unordered_map<long, PendingTransition> pending_;
  std::deque<SlotContext> history_;
  std::vector<Rng> traffic_rngs_;
  Rng policy_rng_;
  long next_packet_id_ = 0;
  long slot_ = 0;
  Totals totals_;
  bool was_connected_ = true;
  long disconnected_slots_ = 0;
  std::vector<DeliveryRecord> deliveries_;

  std::vector<double> window_buf_;
  std::vector<double> zero_window_;
};

}  // namespace leoroute
