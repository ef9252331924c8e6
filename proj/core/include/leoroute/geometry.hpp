#pragma once

#include <cmath>

namespace leoroute {

inline constexpr double kEarthRadiusKm = 6371.0;          // spherical Earth
inline constexpr double kEarthMuKm3PerS2 = 398600.4418;   // gravitational parameter
inline constexpr double kSpeedOfLightKmPerS = 299792.458;
inline constexpr double kPi = 3.14159265358979323846;

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
};

inline double dot(const Vec3& a, const Vec3& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}

inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

inline double distance(const Vec3& a, const Vec3& b) { return norm(a - b); }

inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

// Geocentric latitude in degrees.
inline double latitude_deg(const Vec3& p) {
  double r = norm(p);
  return r > 0.0 ? rad_to_deg(std::asin(p.z / r)) : 0.0;
}

}  // namespace leoroute
