#pragma once

#include <deque>

#include "leoroute/traffic.hpp"

namespace leoroute {

struct LinkParams {
  double capacity_bps = 300e6;        // per ISL
  double processing_delay_s = 0.001;  // per hop

  void validate() const;  // throws std::invalid_argument with "transport.<field>"
};

struct DelayBreakdown {
  double prop_s = 0.0;
  double trans_s = 0.0;
  double queue_s = 0.0;
  double proc_s = 0.0;
  double total_s() const { return prop_s + trans_s + queue_s + proc_s; }
};

struct NodeCounters {
  long delivered = 0;
  long dropped_overflow = 0;
  long dropped_ttl = 0;
};

struct NodeState {
  int node = 0;
  std::deque<Packet> queue;
  NodeCounters counters;
};

inline constexpr long kMaxQueueDefault = 640;

// Packets one link can push out per slot.
long per_link_share(const LinkParams& link, double slot_duration_s,
                    int packet_size_bytes);

// mu_i(t) = degree * per-link share.
long service_capacity(int degree, const LinkParams& link,
                      double slot_duration_s, int packet_size_bytes);

struct QueueStep {
  long next_q = 0;
  long dropped = 0;
};

// Q(t+1) = max(Q - mu, 0) + A, clamped to max_queue; excess is dropped.
QueueStep step_queue(long q, long mu, long a, long max_queue = kMaxQueueDefault);

// Per-hop delay estimate: prop from distance, trans from capacity, queue as
// head-of-line count times trans, proc constant.
DelayBreakdown link_delay(const LinkParams& link, double distance_km,
                          long queue_ahead, int packet_size_bytes);

}  // namespace leoroute
