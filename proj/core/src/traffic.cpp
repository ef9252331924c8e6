#include "leoroute/traffic.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "leoroute/geometry.hpp"

namespace leoroute {

void TrafficConfig::validate() const {
  auto fail = [](const std::string& field, const std::string& why) {
    throw std::invalid_argument("traffic." + field + ": " + why);
  };
  if (base_rate_lambda0 < 0.0) fail("base_rate_lambda0", "must be >= 0");
  if (period_slots <= 0) fail("period_slots", "must be positive");
  if (packet_size_bytes <= 0) fail("packet_size_bytes", "must be positive");
  if (sin_amplitude < 0.0 || sin_amplitude > 1.0)
    fail("sin_amplitude", "must be in [0, 1]");
  if (ttl_hops <= 0 || ttl_hops > 30) fail("ttl_hops", "must be in (0, 30]");
  for (const HotFlow& f : hot_flows) {
    if (f.lambda0 < 0.0) fail("hot_flows", "flow rate must be >= 0");
    if (f.src == f.dst) fail("hot_flows", "flow src must differ from dst");
  }
}

double modulated_rate(double lambda0, int node, long t,
                      const TrafficConfig& config) {
  // Phase reduced modulo T before the sin so the rate is exactly periodic.
  double phase = std::fmod(static_cast<double>(t) +
                               node * config.node_phase_stride_slots,
                           static_cast<double>(config.period_slots));
  double rate = lambda0 * (1.0 + config.sin_amplitude *
                                     std::sin(2.0 * kPi * phase /
                                              static_cast<double>(config.period_slots)));
  return rate > 0.0 ? rate : 0.0;  // clip -0.0 and rounding residue at the trough
}

double arrival_rate(int node, long t, const TrafficConfig& config) {
  if (t < 0) throw std::invalid_argument("arrival_rate: t must be >= 0");
  return modulated_rate(config.base_rate_lambda0, node, t, config);
}

long sample_arrivals(Rng& rng, double rate) {
  if (rate < 0.0) throw std::invalid_argument("sample_arrivals: rate must be >= 0");
  if (rate == 0.0) return 0;
  std::poisson_distribution<long> dist(rate);
  return dist(rng);
}

std::vector<Packet> generate_packets(Rng& rng, int node, long count, long t,
                                     int num_nodes, long& next_id,
                                     const TrafficConfig& config) {
  if (count < 0) throw std::invalid_argument("generate_packets: count must be >= 0");
  if (num_nodes < 2 && count > 0)
    throw std::invalid_argument("generate_packets: need at least 2 nodes");
  std::vector<Packet> out;
  out.reserve(static_cast<size_t>(count));
  std::uniform_int_distribution<int> pick(0, num_nodes - 2);
  for (long k = 0; k < count; ++k) {
    int d = pick(rng);
    if (d >= node) ++d;  // uniform over V \ {node}
    Packet p;
    p.id = next_id++;
    p.src = node;
    p.dst = d;
    p.size_bytes = config.packet_size_bytes;
    p.created_slot = t;
    p.ttl = config.ttl_hops;
    p.trace.push_back(node);
    out.push_back(std::move(p));
  }
  return out;
}

double calibrate_lambda0(double offered_load_mbps, const TrafficConfig& config,
                         int num_nodes, double slot_duration_s) {
  if (offered_load_mbps <= 0.0)
    throw std::invalid_argument("traffic.offered_load_mbps: must be positive");
  if (num_nodes <= 0)
    throw std::invalid_argument("calibrate_lambda0: num_nodes must be positive");
  double packet_bits = 8.0 * config.packet_size_bytes;
  return offered_load_mbps * 1e6 * slot_duration_s / (packet_bits * num_nodes);
}

}  // namespace leoroute
