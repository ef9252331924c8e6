#pragma once

#include <vector>

#include "leoroute/rng.hpp"

namespace leoroute {

struct HotFlow {
  int src = 0;
  int dst = 0;
  double lambda0 = 0.0;  // packets per slot, same periodic modulation as background
};

struct TrafficConfig {
  double base_rate_lambda0 = 0.0;  // packets per slot per node; 0 = derive from load
  double offered_load_mbps = 120.0;
  long period_slots = 1000;           // T
  int packet_size_bytes = 1500;
  double sin_amplitude = 1.0;         // 0 makes the process stationary
  double node_phase_stride_slots = 0.0;  // optional per-node phase offset
  int ttl_hops = 30;
  std::vector<HotFlow> hot_flows;

  void validate() const;  // throws std::invalid_argument with "traffic.<field>"
};

struct Packet {
  long id = 0;
  int src = 0;
  int dst = 0;
  int size_bytes = 0;
  long created_slot = 0;
  int ttl = 0;
  std::vector<int> trace;           // begins with src
  double intra_slot_delay_s = 0.0;  // accumulated per-hop trans + proc time
  double prop_sum_s = 0.0;          // accumulated propagation time
};

// lambda_i(t) = lambda0 * (1 + A * sin(2*pi*(t + i*stride)/T)), exactly periodic in T.
double arrival_rate(int node, long t, const TrafficConfig& config);

// Same formula for an arbitrary base rate (hot flows share the modulation).
double modulated_rate(double lambda0, int node, long t, const TrafficConfig& config);

// Poisson count with the given mean; deterministic per rng state.
long sample_arrivals(Rng& rng, double rate);

// `count` packets at `node`, destinations uniform over the other nodes,
// ids assigned from `next_id`.
std::vector<Packet> generate_packets(Rng& rng, int node, long count, long t,
                                     int num_nodes, long& next_id,
                                     const TrafficConfig& config);

// lambda0 such that the time-averaged aggregate generation rate equals the
// offered load: lambda0 = load_bps * slot / (packet_bits * num_nodes).
double calibrate_lambda0(double offered_load_mbps, const TrafficConfig& config,
                         int num_nodes, double slot_duration_s);

}  // namespace leoroute
