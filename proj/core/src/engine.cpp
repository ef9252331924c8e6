#include "leoroute/engine.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <stdexcept>

namespace leoroute {

Simulation::Simulation(Constellation constellation, TrafficConfig traffic,
                       EngineConfig engine, Policy& policy)
    : constellation_(std::move(constellation)),
      traffic_(std::move(traffic)),
      ecfg_(engine),
      policy_(policy) {
  constellation_.config.validate();
  traffic_.validate();
  ecfg_.link.validate();
  ecfg_.reward.validate();
  int n = num_nodes();
  for (const HotFlow& f : traffic_.hot_flows) {
    if (f.src < 0 || f.src >= n || f.dst < 0 || f.dst >= n)
      throw std::invalid_argument("traffic.hot_flows: node id out of range");
  }
  nodes_.resize(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) nodes_[static_cast<size_t>(i)].node = i;
  traffic_rngs_.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i)
    traffic_rngs_.push_back(make_rng(ecfg_.seed, Stream::kTraffic,
                                     static_cast<std::uint64_t>(i)));
  policy_rng_ = make_rng(ecfg_.seed, Stream::kPolicy);
  int obs = ObsLayout{ecfg_.pomdp.max_degree}.size();
  window_buf_.assign(static_cast<size_t>(ecfg_.window) * obs, 0.0);
  zero_window_.assign(window_buf_.size(), 0.0);
}

long Simulation::in_flight() const {
  long n = 0;
  for (const NodeState& s : nodes_) n += static_cast<long>(s.queue.size());
  for (const auto& [slot, v] : pipeline_) n += static_cast<long>(v.size());
  return n;
}

bool Simulation::conservation_ok() const {
  return totals_.generated == totals_.delivered + totals_.dropped_overflow +
                                  totals_.dropped_ttl + totals_.dropped_violation +
                                  totals_.flushed_at_reset + in_flight();
}

long Simulation::queue_length(int node) const {
  return static_cast<long>(nodes_[static_cast<size_t>(node)].queue.size());
}

void Simulation::begin_episode() {
  totals_.flushed_at_reset += in_flight();
  for (NodeState& s : nodes_) s.queue.clear();
  pipeline_.clear();
  pending_.clear();
  history_.clear();
  deliveries_.clear();
  slot_ = 0;
}

SlotContext Simulation::make_context() const {
  SlotContext ctx;
  ctx.slot = slot_;
  long topo_slot = constellation_.config.static_topology ? 0 : slot_;
  ctx.positions = propagate(constellation_, topo_slot);
  ctx.snap = snapshot(ctx.positions, constellation_, slot_);
  ctx.queue_len.resize(nodes_.size());
  for (size_t i = 0; i < nodes_.size(); ++i)
    ctx.queue_len[i] = static_cast<long>(nodes_[i].queue.size());
  return ctx;
}

void Simulation::materialize_window(int node, int dst, double* out) const {
  ObsLayout L{ecfg_.pomdp.max_degree};
  int obs = L.size();
  int W = ecfg_.window;
  long have = static_cast<long>(history_.size());
  for (int w = 0; w < W; ++w) {
    double* row = out + static_cast<size_t>(w) * obs;
    long k = have - W + w;
    if (k < 0) {
      std::fill(row, row + obs, 0.0);
    } else {
      const SlotContext& c = history_[static_cast<size_t>(k)];
      observe_into(node, dst, c.snap, c.positions, c.queue_len, ecfg_.link,
                   ecfg_.pomdp, row);
    }
  }
}

void Simulation::finalize_pending(long packet_id, const double* next_window,
                                  bool done, double extra_reward) {
  auto it = pending_.find(packet_id);
  if (it == pending_.end()) return;
  Transition tr;
  tr.obs_window = std::move(it->second.window);
  tr.action = it->second.action;
  tr.reward = it->second.reward + extra_reward;
  tr.next_obs_window.assign(next_window, next_window + zero_window_.size());
  tr.done = done;
  pending_.erase(it);
  policy_.observe_transition(std::move(tr));
}

SlotStats Simulation::step() {
  const ConstellationConfig& ccfg = constellation_.config;
  int n = num_nodes();
  long t = slot_;

  history_.push_back(make_context());
  while (static_cast<int>(history_.size()) > ecfg_.window) history_.pop_front();
  const SlotContext& ctx = history_.back();

  if (!ctx.snap.connected) {
    ++disconnected_slots_;
    if (was_connected_)
      std::cerr << "leoroute: topology transiently disconnected at slot " << t
                << "\n";
  }
  was_connected_ = ctx.snap.connected;

  policy_.begin_slot(ctx);

  SlotStats stats;
  stats.slot = t;
  stats.node_queue_end.assign(static_cast<size_t>(n), 0);
  stats.node_arrivals.assign(static_cast<size_t>(n), 0);
  stats.node_delivered.assign(static_cast<size_t>(n), 0);
  stats.node_dropped_overflow.assign(static_cast<size_t>(n), 0);
  stats.node_dropped_ttl.assign(static_cast<size_t>(n), 0);

  long share = per_link_share(ecfg_.link, ccfg.slot_duration_s,
                              traffic_.packet_size_bytes);

  // --- service phase: FIFO scan bounded by the node service rate ---
  std::vector<long> budgets;
  std::vector<char> mask(static_cast<size_t>(ecfg_.pomdp.max_degree), 0);
  for (int i = 0; i < n; ++i) {
    NodeState& node = nodes_[static_cast<size_t>(i)];
    int degree = ctx.snap.degree(i);
    if (degree == 0 || node.queue.empty() || share <= 0) continue;
    if (degree > ecfg_.pomdp.max_degree)
      throw std::logic_error("engine: node degree exceeds max_degree");

    budgets.assign(static_cast<size_t>(degree), share);
    long remaining = share * degree;
    long mu = remaining;
    long examined = 0;
    long q_start = ctx.queue_len[static_cast<size_t>(i)];

    std::fill(mask.begin(), mask.end(), 0);
    for (int k = 0; k < degree; ++k) mask[static_cast<size_t>(k)] = 1;

    std::deque<Packet> kept;
    while (!node.queue.empty()) {
      if (examined >= mu || remaining <= 0) break;
      Packet pkt = std::move(node.queue.front());
      node.queue.pop_front();
      ++examined;

      materialize_window(i, pkt.dst, window_buf_.data());
      // The packet's previous decision chains into this one.
      finalize_pending(pkt.id, window_buf_.data(), false, 0.0);

      DecisionContext dc;
      dc.node = i;
      dc.packet = &pkt;
      dc.ctx = &ctx;
      dc.obs_window = window_buf_.data();
      dc.valid_mask = mask.data();
      dc.degree = degree;
      int action = policy_.decide(dc, policy_rng_);
      ++stats.decisions;

      if (action == kNoRoute) {
        kept.push_back(std::move(pkt));
        continue;
      }
      if (action < 0 || action >= degree) {
        ++totals_.routing_violations;
        if (ecfg_.strict_routing)
          throw std::runtime_error(
              "routing contract violation: action " + std::to_string(action) +
              " outside neighbor set of node " + std::to_string(i) +
              " at slot " + std::to_string(t));
        ++totals_.dropped_violation;
        continue;  // counted and dropped
      }

      int j = ctx.snap.neighbors[static_cast<size_t>(i)][static_cast<size_t>(action)];
      double dist = ctx.snap.neighbor_dist[static_cast<size_t>(i)][static_cast<size_t>(action)];
      DelayBreakdown d =
          link_delay(ecfg_.link, dist, q_start, traffic_.packet_size_bytes);

      if (budgets[static_cast<size_t>(action)] <= 0) {
        // Chosen egress exhausted this slot: the packet waits in place and the
        // wait itself is a recorded step, so congested choices cost reward.
        PendingTransition p;
        p.window.assign(window_buf_.begin(), window_buf_.end());
        p.action = action;
        p.reward = reward(ecfg_.reward, d.total_s(), q_start);
        pending_[pkt.id] = std::move(p);
        kept.push_back(std::move(pkt));
        continue;
      }

      --budgets[static_cast<size_t>(action)];
      --remaining;

      StepOutcome out = episode_step(pkt, j, d.total_s(), q_start, ecfg_.reward);
      pkt.ttl -= 1;
      pkt.trace.push_back(j);
      pkt.intra_slot_delay_s += d.trans_s + d.proc_s;
      pkt.prop_sum_s += d.prop_s;
      long hop_slots = static_cast<long>(std::ceil(d.prop_s / ccfg.slot_duration_s));
      if (hop_slots < 1) hop_slots = 1;
      long arrival = t + hop_slots;

      if (out.kind == StepKind::kDroppedTtl) {
        Transition tr;
        tr.obs_window.assign(window_buf_.begin(), window_buf_.end());
        tr.action = action;
        tr.reward = out.reward;
        tr.next_obs_window = zero_window_;
        tr.done = true;
        policy_.observe_transition(std::move(tr));
        ++totals_.dropped_ttl;
        ++stats.dropped_ttl;
        ++stats.node_dropped_ttl[static_cast<size_t>(i)];
        node.counters.dropped_ttl += 1;
        continue;  // packet discarded at the forwarding node
      }

      if (out.kind == StepKind::kDelivered) {
        Transition tr;
        tr.obs_window.assign(window_buf_.begin(), window_buf_.end());
        tr.action = action;
        tr.reward = out.reward;
        tr.next_obs_window = zero_window_;
        tr.done = true;
        policy_.observe_transition(std::move(tr));
      } else {
        PendingTransition p;
        p.window.assign(window_buf_.begin(), window_buf_.end());
        p.action = action;
        p.reward = out.reward;
        pending_[pkt.id] = std::move(p);
      }
      pipeline_[arrival].push_back({std::move(pkt), j});
    }
    // Unexamined tail keeps its order behind the held packets.
    while (!node.queue.empty()) {
      kept.push_back(std::move(node.queue.front()));
      node.queue.pop_front();
    }
    node.queue = std::move(kept);
  }

  // --- pipeline arrivals due this slot ---
  if (auto it = pipeline_.find(t); it != pipeline_.end()) {
    for (InFlight& f : it->second) {
      int j = f.to;
      if (j == f.packet.dst) {
        double e2e = static_cast<double>(t - f.packet.created_slot) *
                         ccfg.slot_duration_s +
                     f.packet.intra_slot_delay_s;
        ++totals_.delivered;
        ++stats.delivered;
        ++stats.node_delivered[static_cast<size_t>(j)];
        stats.delivered_delay_sum_s += e2e;
        stats.delivered_bits += 8.0 * f.packet.size_bytes;
        nodes_[static_cast<size_t>(j)].counters.delivered += 1;
        if (ecfg_.record_deliveries) {
          deliveries_.push_back({f.packet.created_slot, t, e2e,
                                 f.packet.prop_sum_s,
                                 static_cast<int>(f.packet.trace.size()) - 1});
        }
      } else {
        nodes_[static_cast<size_t>(j)].queue.push_back(std::move(f.packet));
      }
    }
    pipeline_.erase(it);
  }

  // --- external traffic ---
  for (int i = 0; i < n; ++i) {
    Rng& rng = traffic_rngs_[static_cast<size_t>(i)];
    long count = sample_arrivals(rng, arrival_rate(i, t, traffic_));
    std::vector<Packet> fresh =
        generate_packets(rng, i, count, t, n, next_packet_id_, traffic_);
    for (const HotFlow& f : traffic_.hot_flows) {
      if (f.src != i) continue;
      long extra = sample_arrivals(rng, modulated_rate(f.lambda0, i, t, traffic_));
      for (long k = 0; k < extra; ++k) {
        Packet p;
        p.id = next_packet_id_++;
        p.src = i;
        p.dst = f.dst;
        p.size_bytes = traffic_.packet_size_bytes;
        p.created_slot = t;
        p.ttl = traffic_.ttl_hops;
        p.trace.push_back(i);
        fresh.push_back(std::move(p));
      }
    }
    totals_.generated += static_cast<long>(fresh.size());
    stats.generated += static_cast<long>(fresh.size());
    stats.node_arrivals[static_cast<size_t>(i)] += static_cast<long>(fresh.size());
    NodeState& node = nodes_[static_cast<size_t>(i)];
    for (Packet& p : fresh) node.queue.push_back(std::move(p));
  }

  // --- arrival-side overflow, newest first ---
  for (int i = 0; i < n; ++i) {
    NodeState& node = nodes_[static_cast<size_t>(i)];
    while (static_cast<long>(node.queue.size()) > ecfg_.max_queue) {
      Packet victim = std::move(node.queue.back());
      node.queue.pop_back();
      ++totals_.dropped_overflow;
      ++stats.dropped_overflow;
      ++stats.node_dropped_overflow[static_cast<size_t>(i)];
      node.counters.dropped_overflow += 1;
      finalize_pending(victim.id, zero_window_.data(), true,
                       ecfg_.reward.drop_penalty);
    }
    long qlen = static_cast<long>(node.queue.size());
    stats.node_queue_end[static_cast<size_t>(i)] = qlen;
    stats.queue_sum_end += qlen;
  }

  policy_.end_slot(ctx);
  ++slot_;
  return stats;
}

}  // namespace leoroute
