#include "leoroute/constellation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

namespace leoroute {

double ConstellationConfig::mean_motion_rad_s() const {
  double a = orbit_radius_km();
  return std::sqrt(kEarthMuKm3PerS2 / (a * a * a));
}

double ConstellationConfig::orbital_period_s() const {
  return 2.0 * kPi / mean_motion_rad_s();
}

void ConstellationConfig::validate() const {
  auto fail = [](const std::string& field, const std::string& why) {
    throw std::invalid_argument("constellation." + field + ": " + why);
  };
  if (num_planes <= 0) fail("num_planes", "must be positive");
  if (sats_per_plane <= 0) fail("sats_per_plane", "must be positive");
  if (num_planes * sats_per_plane != num_satellites)
    fail("num_satellites", "num_planes * sats_per_plane must equal num_satellites");
  if (altitude_km <= 0.0) fail("altitude_km", "must be positive");
  if (inclination_deg < 0.0 || inclination_deg > 180.0)
    fail("inclination_deg", "must be in [0, 180]");
  if (slot_duration_s <= 0.0) fail("slot_duration_s", "must be positive");
  if (polar_cutoff_deg <= 0.0 || polar_cutoff_deg > 90.0)
    fail("polar_cutoff_deg", "must be in (0, 90]");
}

namespace {

Vec3 orbital_position(double radius_km, double raan, double inclination,
                      double anomaly) {
  double cu = std::cos(anomaly), su = std::sin(anomaly);
  double co = std::cos(raan), so = std::sin(raan);
  double ci = std::cos(inclination);
  return {radius_km * (co * cu - so * su * ci),
          radius_km * (so * cu + co * su * ci),
          radius_km * su * std::sin(inclination)};
}

Vec3 position_at(const ConstellationConfig& cfg, const OrbitSlot& s, long slot) {
  double anomaly = s.anomaly0_rad +
                   cfg.mean_motion_rad_s() * static_cast<double>(slot) *
                       cfg.slot_duration_s;
  anomaly = std::fmod(anomaly, 2.0 * kPi);
  return orbital_position(cfg.orbit_radius_km(), s.raan_rad,
                          deg_to_rad(cfg.inclination_deg), anomaly);
}

}  // namespace

Constellation build_constellation(const ConstellationConfig& config) {
  config.validate();
  Constellation c;
  c.config = config;
  c.sats.reserve(static_cast<size_t>(config.num_satellites));
  for (int p = 0; p < config.num_planes; ++p) {
    double raan = 2.0 * kPi * p / config.num_planes;
    for (int s = 0; s < config.sats_per_plane; ++s) {
      OrbitSlot slot;
      slot.sat_id = p * config.sats_per_plane + s;
      slot.plane = p;
      slot.index_in_plane = s;
      slot.raan_rad = raan;
      slot.anomaly0_rad = 2.0 * kPi * s / config.sats_per_plane +
                          p * deg_to_rad(config.phasing_offset_deg);
      c.sats.push_back(slot);
    }
  }

  // Pick the in-plane index shift toward the next plane that minimizes the
  // total squared link length at the reference epoch. A plane-wide common
  // shift keeps the grid mutual (and the node degree bounded), which a
  // per-satellite instantaneous nearest pick does not.
  c.inter_plane_offset.assign(static_cast<size_t>(config.num_planes), 0);
  if (config.num_planes >= 2) {
    int S = config.sats_per_plane;
    for (int p = 0; p < config.num_planes; ++p) {
      int q = (p + 1) % config.num_planes;
      int best = 0;
      double best_cost = std::numeric_limits<double>::infinity();
      for (int d = 0; d < S; ++d) {
        double cost = 0.0;
        for (int s = 0; s < S; ++s) {
          Vec3 a = position_at(config, c.sats[p * S + s], 0);
          Vec3 b = position_at(config, c.sats[q * S + (s + d) % S], 0);
          Vec3 diff = a - b;
          cost += dot(diff, diff);
        }
        if (cost < best_cost) {
          best_cost = cost;
          best = d;
        }
      }
      c.inter_plane_offset[static_cast<size_t>(p)] = best;
    }
  }
  return c;
}

std::vector<SatellitePosition> propagate(const Constellation& c, long slot) {
  if (slot < 0) throw std::invalid_argument("propagate: slot must be >= 0");
  std::vector<SatellitePosition> out;
  out.reserve(c.sats.size());
  for (const OrbitSlot& s : c.sats) {
    out.push_back({s.sat_id, position_at(c.config, s, slot)});
  }
  return out;
}

int TopologySnapshot::neighbor_index(int i, int j) const {
  const auto& nb = neighbors[static_cast<size_t>(i)];
  auto it = std::lower_bound(nb.begin(), nb.end(), j);
  if (it != nb.end() && *it == j) return static_cast<int>(it - nb.begin());
  return -1;
}

TopologySnapshot snapshot(const std::vector<SatellitePosition>& positions,
                          const Constellation& c, long slot) {
  const ConstellationConfig& cfg = c.config;
  int N = cfg.num_satellites;
  int P = cfg.num_planes;
  int S = cfg.sats_per_plane;

  TopologySnapshot snap;
  snap.slot = slot;
  snap.neighbors.resize(static_cast<size_t>(N));
  snap.neighbor_dist.resize(static_cast<size_t>(N));

  std::vector<double> lat(static_cast<size_t>(N));
  for (int i = 0; i < N; ++i)
    lat[static_cast<size_t>(i)] = latitude_deg(positions[static_cast<size_t>(i)].coords_km);

  std::vector<std::pair<int, int>> pairs;
  auto add_pair = [&pairs](int i, int j) {
    if (i != j) pairs.emplace_back(std::min(i, j), std::max(i, j));
  };

  for (int p = 0; p < P; ++p) {
    for (int s = 0; s < S; ++s) {
      int i = p * S + s;
      // Two intra-plane ring neighbors (one when S == 2, none when S == 1).
      if (S > 1) {
        add_pair(i, p * S + (s + 1) % S);
        add_pair(i, p * S + (s - 1 + S) % S);
      }
      // One link into each adjacent plane, rigid index offset; severed when
      // either endpoint is above the polar cutoff.
      if (P >= 2) {
        int q_next = (p + 1) % P;
        if (q_next != p) {
          int j = q_next * S + (s + c.inter_plane_offset[static_cast<size_t>(p)]) % S;
          if (std::abs(lat[static_cast<size_t>(i)]) <= cfg.polar_cutoff_deg &&
              std::abs(lat[static_cast<size_t>(j)]) <= cfg.polar_cutoff_deg)
            add_pair(i, j);
        }
      }
    }
  }

  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());

  snap.edges.reserve(pairs.size());
  for (auto [a, b] : pairs) {
    double d = distance(positions[static_cast<size_t>(a)].coords_km,
                        positions[static_cast<size_t>(b)].coords_km);
    snap.edges.push_back({a, b, d});
    snap.neighbors[static_cast<size_t>(a)].push_back(b);
    snap.neighbors[static_cast<size_t>(b)].push_back(a);
    snap.neighbor_dist[static_cast<size_t>(a)].push_back(d);
    snap.neighbor_dist[static_cast<size_t>(b)].push_back(d);
  }
  // Neighbor lists are built in ascending edge order, which already yields
  // ascending ids per node; enforce it anyway.
  for (int i = 0; i < N; ++i) {
    auto& nb = snap.neighbors[static_cast<size_t>(i)];
    auto& nd = snap.neighbor_dist[static_cast<size_t>(i)];
    std::vector<size_t> order(nb.size());
    for (size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::sort(order.begin(), order.end(),
              [&nb](size_t x, size_t y) { return nb[x] < nb[y]; });
    std::vector<int> nb2(nb.size());
    std::vector<double> nd2(nd.size());
    for (size_t k = 0; k < order.size(); ++k) {
      nb2[k] = nb[order[k]];
      nd2[k] = nd[order[k]];
    }
    nb = std::move(nb2);
    nd = std::move(nd2);
  }

  snap.connected = is_connected(snap);
  return snap;
}

bool is_connected(const TopologySnapshot& snap) {
  int N = snap.num_nodes();
  if (N == 0) return true;
  std::vector<char> seen(static_cast<size_t>(N), 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int count = 1;
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    for (int v : snap.neighbors[static_cast<size_t>(u)]) {
      if (!seen[static_cast<size_t>(v)]) {
        seen[static_cast<size_t>(v)] = 1;
        ++count;
        stack.push_back(v);
      }
    }
  }
  return count == N;
}

}  // namespace leoroute
