#include "leoroute/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace leoroute {

void RunMetrics::validate(const MetricsParams& p) const {
  if (loss_rate < 0.0 || loss_rate > 1.0)
    throw std::logic_error("metrics: loss_rate outside [0, 1]");
  if (mean_queue < 0.0 || mean_queue > static_cast<double>(p.max_queue))
    throw std::logic_error("metrics: mean_queue outside [0, max_queue]");
  if (throughput_mbps < 0.0)
    throw std::logic_error("metrics: negative throughput");
  if (delivered > generated)
    throw std::logic_error("metrics: delivered exceeds generated");
}

RunMetrics compute_metrics(std::span<const SlotStats> slots,
                           const MetricsParams& p) {
  if (slots.empty()) throw std::invalid_argument("compute_metrics: no slot logs");
  if (p.num_nodes <= 0)
    throw std::invalid_argument("compute_metrics: num_nodes must be positive");

  size_t warmup = static_cast<size_t>(
      std::floor(p.warmup_fraction * static_cast<double>(slots.size())));
  if (warmup >= slots.size()) warmup = slots.size() - 1;

  RunMetrics m;
  m.load_mbps = p.offered_load_mbps;
  double delay_sum = 0.0;
  double bits = 0.0;
  long queue_sum = 0;
  size_t measured = 0;
  for (size_t k = warmup; k < slots.size(); ++k) {
    const SlotStats& s = slots[k];
    m.generated += s.generated;
    m.delivered += s.delivered;
    m.dropped += s.dropped_overflow + s.dropped_ttl;
    delay_sum += s.delivered_delay_sum_s;
    bits += s.delivered_bits;
    queue_sum += s.queue_sum_end;
    ++measured;
  }
  double seconds = static_cast<double>(measured) * p.slot_duration_s;
  m.throughput_mbps = seconds > 0.0 ? bits / seconds / 1e6 : 0.0;
  if (m.delivered > 0)
    m.mean_delay_ms = delay_sum / static_cast<double>(m.delivered) * 1000.0;
  m.loss_rate = m.generated > 0
                    ? static_cast<double>(m.dropped) / static_cast<double>(m.generated)
                    : 0.0;
  m.mean_queue = static_cast<double>(queue_sum) /
                 (static_cast<double>(measured) * p.num_nodes);
  return m;
}

GreenReport green_report(long n_decisions, double time_per_decision_ms,
                         double tdp_w, double carbon_intensity_g_per_kwh) {
  if (n_decisions < 0 || time_per_decision_ms < 0.0 || tdp_w < 0.0 ||
      carbon_intensity_g_per_kwh < 0.0)
    throw std::invalid_argument("green_report: inputs must be >= 0");
  GreenReport r;
  r.n_decisions = n_decisions;
  r.time_per_decision_ms = time_per_decision_ms;
  r.tdp_w = tdp_w;
  r.carbon_intensity_g_per_kwh = carbon_intensity_g_per_kwh;
  double hours = static_cast<double>(n_decisions) * time_per_decision_ms /
                 1000.0 / 3600.0;
  r.energy_kwh = hours * tdp_w / 1000.0;
  r.co2_g = r.energy_kwh * carbon_intensity_g_per_kwh;
  return r;
}

}  // namespace leoroute
