#pragma once

#include <vector>

#include "leoroute/geometry.hpp"

namespace leoroute {

struct ConstellationConfig {
  int num_satellites = 45;
  int num_planes = 5;
  int sats_per_plane = 9;
  double inclination_deg = 70.0;
  double altitude_km = 570.0;
  double phasing_offset_deg = 0.0;  // extra in-plane phase per plane index
  double slot_duration_s = 0.01;
  double polar_cutoff_deg = 65.0;   // inter-plane links severed above this |lat|
  bool static_topology = false;     // freeze the t=0 snapshot for every slot

  double orbit_radius_km() const { return kEarthRadiusKm + altitude_km; }
  double mean_motion_rad_s() const;
  double orbital_period_s() const;

  // Throws std::invalid_argument with a "constellation.<field>" path.
  void validate() const;
};

struct OrbitSlot {
  int sat_id = 0;
  int plane = 0;
  int index_in_plane = 0;
  double raan_rad = 0.0;      // right ascension of the orbital plane
  double anomaly0_rad = 0.0;  // in-plane phase at t = 0
};

struct Constellation {
  ConstellationConfig config;
  std::vector<OrbitSlot> sats;
  // inter_plane_offset[p] = in-plane index shift toward plane (p+1) % P, chosen
  // once from the t=0 geometry so the +grid stays rigid and symmetric.
  std::vector<int> inter_plane_offset;
};

struct SatellitePosition {
  int sat_id = 0;
  Vec3 coords_km;
};

struct Edge {
  int a = 0;  // a < b
  int b = 0;
  double distance_km = 0.0;
};

struct TopologySnapshot {
  long slot = 0;
  std::vector<Edge> edges;
  std::vector<std::vector<int>> neighbors;          // ascending ids per node
  std::vector<std::vector<double>> neighbor_dist;   // km, parallel to neighbors
  bool connected = false;

  int num_nodes() const { return static_cast<int>(neighbors.size()); }
  int degree(int i) const { return static_cast<int>(neighbors[i].size()); }
  // Index of j in neighbors[i], or -1.
  int neighbor_index(int i, int j) const;
};

Constellation build_constellation(const ConstellationConfig& config);

std::vector<SatellitePosition> propagate(const Constellation& c, long slot);

TopologySnapshot snapshot(const std::vector<SatellitePosition>& positions,
                          const Constellation& c, long slot);

bool is_connected(const TopologySnapshot& snap);

}  // namespace leoroute
