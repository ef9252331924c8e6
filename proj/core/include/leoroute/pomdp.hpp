#pragma once

#include <span>
#include <vector>

#include "leoroute/constellation.hpp"
#include "leoroute/obs_layout.hpp"
#include "leoroute/transport.hpp"

namespace leoroute {

struct PomdpConfig {
  int max_degree = kMaxDegree;
  long max_queue = kMaxQueueDefault;
  double altitude_norm_km = 570.0;  // distance normalizer
  int packet_size_bytes = 1500;
};

struct RewardWeights {
  double alpha = 0.4;          // delay weight, applied to D / delay_norm_s
  double beta = 0.6;           // queue weight, applied to Q / max_queue
  double delay_norm_s = 0.1;
  long max_queue = kMaxQueueDefault;
  double drop_penalty = -10.0;  // added on terminal drop

  void validate() const;  // alpha, beta > 0 and beta > alpha (congestion-dominant)
};

// Local observation for routing `dst`-bound traffic at `node`.
std::vector<double> observe(int node, int dst, const TopologySnapshot& snap,
                            const std::vector<SatellitePosition>& positions,
                            const std::vector<long>& queue_len,
                            const LinkParams& link, const PomdpConfig& pc);

// Same, written into a caller buffer of ObsLayout{pc.max_degree}.size().
void observe_into(int node, int dst, const TopologySnapshot& snap,
                  const std::vector<SatellitePosition>& positions,
                  const std::vector<long>& queue_len, const LinkParams& link,
                  const PomdpConfig& pc, double* out);

// r = -(alpha * D/delay_norm + beta * Q/max_queue); always <= 0.
double reward(const RewardWeights& w, double delay_s, long queue_len);

double discounted_return(std::span<const double> rewards, double gamma);

enum class StepKind { kForwarded, kDelivered, kDroppedTtl };

struct StepOutcome {
  double reward = 0.0;
  bool done = false;
  StepKind kind = StepKind::kForwarded;
};

// Send-time part of the per-packet episode protocol: Eq-style reward for the
// chosen hop plus terminal classification. Delivery earns no bonus; a TTL
// death adds the drop penalty. Overflow at the receiving queue is resolved by
// the engine when it happens.
StepOutcome episode_step(const Packet& packet, int action_node,
                         double delay_chosen_s, long queue_len,
                         const RewardWeights& w);

}  // namespace leoroute
