#include "leoroute/pomdp.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

namespace leoroute {

void RewardWeights::validate() const {
  if (alpha <= 0.0) throw std::invalid_argument("reward.alpha: must be positive");
  if (beta <= 0.0) throw std::invalid_argument("reward.beta: must be positive");
  if (beta <= alpha)
    throw std::invalid_argument("reward.beta: must exceed reward.alpha");
  if (delay_norm_s <= 0.0)
    throw std::invalid_argument("reward.delay_norm_ms: must be positive");
  if (max_queue <= 0)
    throw std::invalid_argument("reward.max_queue: must be positive");
}

void observe_into(int node, int dst, const TopologySnapshot& snap,
                  const std::vector<SatellitePosition>& positions,
                  const std::vector<long>& queue_len, const LinkParams& link,
                  const PomdpConfig& pc, double* out) {
  ObsLayout L{pc.max_degree};
  std::memset(out, 0, sizeof(double) * static_cast<size_t>(L.size()));

  const auto& nb = snap.neighbors[static_cast<size_t>(node)];
  const auto& nd = snap.neighbor_dist[static_cast<size_t>(node)];
  if (static_cast<int>(nb.size()) > pc.max_degree)
    throw std::logic_error("observe: node degree exceeds max_degree");

  long q = queue_len[static_cast<size_t>(node)];
  out[L.own_queue()] = static_cast<double>(q) / static_cast<double>(pc.max_queue);

  const Vec3& here = positions[static_cast<size_t>(node)].coords_km;
  for (size_t k = 0; k < nb.size(); ++k) {
    int j = nb[k];
    double dist = nd[k];
    out[L.delay(static_cast<int>(k))] =
        link_delay(link, dist, q, pc.packet_size_bytes).total_s();
    Vec3 d = positions[static_cast<size_t>(j)].coords_km - here;
    double n = norm(d);
    int base = L.topo(static_cast<int>(k));
    if (n > 0.0) {
      out[base + 0] = d.x / n;
      out[base + 1] = d.y / n;
      out[base + 2] = d.z / n;
    }
    out[base + 3] = dist / pc.altitude_norm_km;
    out[base + 4] = 1.0;
    out[L.mask(static_cast<int>(k))] = 1.0;
  }

  Vec3 to_dst = positions[static_cast<size_t>(dst)].coords_km - here;
  double n = norm(to_dst);
  int base = L.dst();
  if (n > 0.0) {
    out[base + 0] = to_dst.x / n;
    out[base + 1] = to_dst.y / n;
    out[base + 2] = to_dst.z / n;
  }
  out[base + 3] = n / pc.altitude_norm_km;
}

std::vector<double> observe(int node, int dst, const TopologySnapshot& snap,
                            const std::vector<SatellitePosition>& positions,
                            const std::vector<long>& queue_len,
                            const LinkParams& link, const PomdpConfig& pc) {
  std::vector<double> out(static_cast<size_t>(ObsLayout{pc.max_degree}.size()));
  observe_into(node, dst, snap, positions, queue_len, link, pc, out.data());
  return out;
}

double reward(const RewardWeights& w, double delay_s, long queue_len) {
  if (delay_s < 0.0) throw std::invalid_argument("reward: delay must be >= 0");
  if (queue_len < 0) throw std::invalid_argument("reward: queue must be >= 0");
  double d_norm = delay_s / w.delay_norm_s;
  double q_norm = static_cast<double>(queue_len) / static_cast<double>(w.max_queue);
  return -(w.alpha * d_norm + w.beta * q_norm);
}

double discounted_return(std::span<const double> rewards, double gamma) {
  if (gamma <= 0.0 || gamma >= 1.0)
    throw std::invalid_argument("discounted_return: gamma must be in (0, 1)");
  double acc = 0.0;
  double g = 1.0;
  for (double r : rewards) {
    acc += g * r;
    g *= gamma;
  }
  return acc;
}

StepOutcome episode_step(const Packet& packet, int action_node,
                         double delay_chosen_s, long queue_len,
                         const RewardWeights& w) {
  StepOutcome out;
  out.reward = reward(w, delay_chosen_s, queue_len);
  if (action_node == packet.dst) {
    out.done = true;
    out.kind = StepKind::kDelivered;
  } else if (packet.ttl <= 1) {
    out.done = true;
    out.kind = StepKind::kDroppedTtl;
    out.reward += w.drop_penalty;
  }
  return out;
}

}  // namespace leoroute
