#pragma once

namespace leoroute {

inline constexpr int kMaxDegree = 4;

// Fixed per-decision observation layout, all slots zero-filled when the
// corresponding neighbor is absent:
//   [0]                      own queue / max_queue
//   [1 .. md]                per-neighbor total delay estimate, seconds
//   [1+md .. 1+6*md)         per-neighbor 5-vector:
//                              unit direction (3), distance/altitude, alive flag
//   [1+6*md .. 5+6*md)       destination: unit direction (3), distance/altitude
//   [5+6*md .. 5+7*md)       validity mask (1.0 / 0.0)
struct ObsLayout {
  int max_degree = kMaxDegree;

  int size() const { return 5 + 7 * max_degree; }
  int own_queue() const { return 0; }
  int delay(int k) const { return 1 + k; }
  int topo(int k) const { return 1 + max_degree + 5 * k; }
  int dst() const { return 1 + 6 * max_degree; }
  int mask(int k) const { return 5 + 6 * max_degree + k; }
};

}  // namespace leoroute
