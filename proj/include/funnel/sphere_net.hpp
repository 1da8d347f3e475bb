#pragma once

#include "funnel/common.hpp"
#include "funnel/schedule.hpp"

#include <vector>

namespace funnel {

// Finite covering net on the unit sphere S^{m-1}: every unit vector lies
// within `mesh` of some net point.
struct SigmaNet {
  int dim = 1;
  double mesh = 1.0;
  std::vector<Vector> points;

  int size() const { return static_cast<int>(points.size()); }
};

// Deterministic construction:
//   m = 1: {-1, +1} regardless of sigma;
//   m = 2: uniform angular grid with k = ceil(pi / (2 asin(min(1, sigma/2))));
//   m >= 3: polar ladder with spacing <= sigma plus a per-latitude
//           (m-1)-dimensional net of mesh sigma/(2 sin(polar)): the meridian
//           chord contributes at most sigma/2 and the scaled band net at most
//           sigma/2, so each cell has diameter <= sigma.
SigmaNet build_sigma_net(int m, double sigma, long max_points = Caps{}.max_net_points);

struct CoveringReport {
  double max_gap = 0.0;
  bool pass = false;
  long samples = 0;
  Vector worst_direction;
};

// Statistical certificate: samples uniform unit vectors and records the
// largest distance to the net. Reproducible for a fixed seed.
CoveringReport covering_check(const SigmaNet& net, long samples, std::uint64_t seed);

} // namespace funnel
