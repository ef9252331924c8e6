#include "leoroute/transport.hpp"

#include <cmath>
#include <stdexcept>

#include "leoroute/geometry.hpp"

namespace leoroute {

void LinkParams::validate() const {
  if (capacity_bps <= 0.0)
    throw std::invalid_argument("transport.isl_capacity_mbps: must be positive");
  if (processing_delay_s < 0.0)
    throw std::invalid_argument("transport.processing_delay_ms: must be >= 0");
}

long per_link_share(const LinkParams& link, double slot_duration_s,
                    int packet_size_bytes) {
  double bits = 8.0 * packet_size_bytes;
  return static_cast<long>(std::floor(link.capacity_bps * slot_duration_s / bits));
}

long service_capacity(int degree, const LinkParams& link,
                      double slot_duration_s, int packet_size_bytes) {
  if (degree < 0) throw std::invalid_argument("service_capacity: degree must be >= 0");
  return degree * per_link_share(link, slot_duration_s, packet_size_bytes);
}

QueueStep step_queue(long q, long mu, long a, long max_queue) {
  if (q < 0 || mu < 0 || a < 0)
    throw std::invalid_argument("step_queue: arguments must be >= 0");
  long after = (q > mu ? q - mu : 0) + a;
  QueueStep out;
  out.next_q = after > max_queue ? max_queue : after;
  out.dropped = after > max_queue ? after - max_queue : 0;
  return out;
}

DelayBreakdown link_delay(const LinkParams& link, double distance_km,
                          long queue_ahead, int packet_size_bytes) {
  if (distance_km < 0.0)
    throw std::invalid_argument("link_delay: distance must be >= 0");
  DelayBreakdown d;
  d.prop_s = distance_km / kSpeedOfLightKmPerS;
  d.trans_s = 8.0 * packet_size_bytes / link.capacity_bps;
  d.queue_s = static_cast<double>(queue_ahead) * d.trans_s;
  d.proc_s = link.processing_delay_s;
  return d;
}

}  // namespace leoroute
