#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "leoroute/engine.hpp"

namespace leoroute {

struct MetricsParams {
  double slot_duration_s = 0.01;
  double offered_load_mbps = 0.0;
  int num_nodes = 0;
  long max_queue = kMaxQueueDefault;
  double warmup_fraction = 0.1;
};

struct RunMetrics {
  std::string policy;
  double load_mbps = 0.0;
  std::uint64_t seed = 0;
  double throughput_mbps = 0.0;
  std::optional<double> mean_delay_ms;  // absent when nothing was delivered
  double loss_rate = 0.0;
  double mean_queue = 0.0;
  long generated = 0;
  long delivered = 0;
  long dropped = 0;

  void validate(const MetricsParams& p) const;  // bounds from the run contract
};

// Steady-state metrics over the slot logs; the first warmup_fraction of the
// slots is excluded from every average.
RunMetrics compute_metrics(std::span<const SlotStats> slots,
                           const MetricsParams& p);

struct GreenReport {
  long n_decisions = 0;
  double time_per_decision_ms = 0.0;
  double tdp_w = 0.0;
  double carbon_intensity_g_per_kwh = 0.0;
  double energy_kwh = 0.0;
  double co2_g = 0.0;
};

GreenReport green_report(long n_decisions, double time_per_decision_ms,
                         double tdp_w, double carbon_intensity_g_per_kwh);

}  // namespace leoroute
