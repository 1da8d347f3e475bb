#pragma once

#include "funnel/common.hpp"

#include <random>

namespace funnel {

using Rng = std::mt19937_64;

inline double uniform_real(Rng& rng, double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  return d(rng);
}

inline Vector uniform_in_box(Rng& rng, const Vector& lo, const Vector& hi) {
  Vector v(lo.size());
  for (Eigen::Index i = 0; i < lo.size(); ++i) v[i] = uniform_real(rng, lo[i], hi[i]);
  return v;
}

// Uniform direction; for dim 1 this is a fair ±1 coin.
inline Vector uniform_on_sphere(Rng& rng, int dim) {
  if (dim == 1) {
    Vector v(1);
    v[0] = (rng() & 1u) ? 1.0 : -1.0;
    return v;
  }
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector v(dim);
  double norm = 0.0;
  do {
    for (int i = 0; i < dim; ++i) v[i] = gauss(rng);
    norm = v.norm();
  } while (norm < 1e-12);
  return v / norm;
}

inline Vector uniform_in_ball(Rng& rng, int dim, double radius) {
  Vector dir = uniform_on_sphere(rng, dim);
  double u = uniform_real(rng, 0.0, 1.0);
  return dir * (radius * std::pow(u, 1.0 / dim));
}

} // namespace funnel
