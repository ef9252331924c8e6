#include "leoroute/policies.hpp"

#include <limits>
#include <queue>
#include <stdexcept>

namespace leoroute {

int RandomPolicy::decide(const DecisionContext& dc, Rng& rng) {
  if (dc.degree <= 0) throw std::invalid_argument("random_policy: no valid action");
  std::uniform_int_distribution<int> pick(0, dc.degree - 1);
  return pick(rng);
}

std::vector<std::vector<int>> compute_next_hops(
    const TopologySnapshot& snap, const LinkParams& link,
    int packet_size_bytes, const std::vector<long>* queue_len) {
  int n = snap.num_nodes();
  double trans = 8.0 * packet_size_bytes / link.capacity_bps;
  constexpr double kInf = std::numeric_limits<double>::infinity();

  // w(u -> v): prop + trans, plus v's queue estimate when queue-aware.
  auto edge_weight = [&](int u, int v, double dist) {
    (void)u;
    double w = dist / kSpeedOfLightKmPerS + trans;
    if (queue_len != nullptr)
      w += static_cast<double>((*queue_len)[static_cast<size_t>(v)]) * trans;
    return w;
  };

  std::vector<std::vector<int>> next(static_cast<size_t>(n),
                                     std::vector<int>(static_cast<size_t>(n), -1));
  std::vector<double> dist_to(static_cast<size_t>(n));

  for (int dst = 0; dst < n; ++dst) {
    std::fill(dist_to.begin(), dist_to.end(), kInf);
    dist_to[static_cast<size_t>(dst)] = 0.0;
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    heap.push({0.0, dst});
    while (!heap.empty()) {
      auto [d, v] = heap.top();
      heap.pop();
      if (d > dist_to[static_cast<size_t>(v)]) continue;
      const auto& nb = snap.neighbors[static_cast<size_t>(v)];
      const auto& nd = snap.neighbor_dist[static_cast<size_t>(v)];
      for (size_t k = 0; k < nb.size(); ++k) {
        int u = nb[k];
        double cand = d + edge_weight(u, v, nd[k]);
        if (cand < dist_to[static_cast<size_t>(u)]) {
          dist_to[static_cast<size_t>(u)] = cand;
          heap.push({cand, u});
        }
      }
    }
    for (int i = 0; i < n; ++i) {
      if (i == dst || dist_to[static_cast<size_t>(i)] == kInf) continue;
      const auto& nb = snap.neighbors[static_cast<size_t>(i)];
      const auto& nd = snap.neighbor_dist[static_cast<size_t>(i)];
      int best = -1;
      double best_cost = kInf;
      for (size_t k = 0; k < nb.size(); ++k) {
        int j = nb[k];
        if (dist_to[static_cast<size_t>(j)] == kInf) continue;
        double cost = edge_weight(i, j, nd[k]) + dist_to[static_cast<size_t>(j)];
        if (cost < best_cost) {  // strict < keeps the lowest neighbor id on ties
          best_cost = cost;
          best = j;
        }
      }
      next[static_cast<size_t>(i)][static_cast<size_t>(dst)] = best;
    }
  }
  return next;
}

void DijkstraPolicy::begin_slot(const SlotContext& ctx) {
  next_hop_ = compute_next_hops(ctx.snap, link_, packet_size_bytes_,
                                queue_aware_ ? &ctx.queue_len : nullptr);
}

int DijkstraPolicy::decide(const DecisionContext& dc, Rng&) {
  int nh = next_hop_[static_cast<size_t>(dc.node)]
                    [static_cast<size_t>(dc.packet->dst)];
  if (nh < 0) return kNoRoute;  // unreachable: hold the packet
  int idx = dc.ctx->snap.neighbor_index(dc.node, nh);
  if (idx < 0) throw std::logic_error("dijkstra: next hop not in neighbor set");
  return idx;
}

DqnPolicy::DqnPolicy(std::unique_ptr<QNetwork> net, DqnPolicyConfig cfg,
                     std::uint64_t seed, std::string policy_name)
    : trainer_(std::move(net), cfg.trainer),
      cfg_(cfg),
      name_(std::move(policy_name)),
      replay_rng_(make_rng(seed, Stream::kReplay)) {
  cfg_.eps.validate();
  if (cfg_.train_every_slots <= 0)
    throw std::invalid_argument("agent.train_every_slots: must be positive");
}

double DqnPolicy::current_epsilon() const {
  return cfg_.learning ? cfg_.eps.at(global_slot_) : cfg_.eval_epsilon;
}

int DqnPolicy::decide(const DecisionContext& dc, Rng& rng) {
  return select_action(trainer_.net(), dc.obs_window, current_epsilon(), rng);
}

void DqnPolicy::observe_transition(Transition&& tr) {
  if (cfg_.learning) trainer_.buffer().push(std::move(tr));
}

void DqnPolicy::end_slot(const SlotContext&) {
  double eps = current_epsilon();
  if (cfg_.learning && (global_slot_ + 1) % cfg_.train_every_slots == 0) {
    if (auto res = trainer_.train_step(replay_rng_)) {
      log_.push_back({trainer_.train_steps(), eps, res->loss,
                      res->mean_batch_reward, trainer_.buffer().size()});
    }
  }
  ++global_slot_;
}

void DqnPolicy::save_checkpoint(std::ostream& out) const {
  trainer_.net().save(out);
}

}  // namespace leoroute
