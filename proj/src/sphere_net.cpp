#include "funnel/sphere_net.hpp"

#include "funnel/rng.hpp"

#include <cmath>
#include <numbers>

namespace funnel {

namespace {

constexpr double kPi = std::numbers::pi;

void build_recursive(int m, double sigma, long max_points, std::vector<Vector>& out) {
  if (static_cast<long>(out.size()) > max_points)
    throw CapacityError("sigma net exceeds the point cap of " + std::to_string(max_points));

  if (m == 1) {
    Vector minus(1), plus(1);
    minus[0] = -1.0;
    plus[0] = 1.0;
    out.push_back(minus);
    out.push_back(plus);
    return;
  }
  if (m == 2) {
    double half = std::min(1.0, sigma / 2.0);
    long k = static_cast<long>(std::ceil(kPi / (2.0 * std::asin(half))));
    k = std::max<long>(k, 1);
    if (static_cast<long>(out.size()) + k > max_points)
      throw CapacityError("sigma net exceeds the point cap of " + std::to_string(max_points));
    for (long i = 0; i < k; ++i) {
      double angle = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(k);
      Vector v(2);
      v[0] = std::cos(angle);
      v[1] = std::sin(angle);
      out.push_back(v);
    }
    return;
  }

  // Polar ladder 0 = phi_0 < ... < phi_{L-1} = pi with spacing <= sigma.
  int bands = static_cast<int>(std::ceil(kPi / sigma)) + 1;
  for (int i = 0; i < bands; ++i) {
    double polar = kPi * static_cast<double>(i) / static_cast<double>(bands - 1);
    double axis = std::cos(polar);
    double ring = std::sin(polar);
    if (i == 0 || i == bands - 1) {
      Vector v = Vector::Zero(m);
      v[0] = i == 0 ? 1.0 : -1.0;
      out.push_back(v);
      if (static_cast<long>(out.size()) > max_points)
        throw CapacityError("sigma net exceeds the point cap of " + std::to_string(max_points));
      continue;
    }
    std::vector<Vector> band;
    build_recursive(m - 1, std::min(2.0, sigma / (2.0 * ring)), max_points, band);
    for (const Vector& y : band) {
      Vector v(m);
      v[0] = axis;
      v.tail(m - 1) = ring * y;
      v /= v.norm(); // renormalize against rounding in cos/sin
      out.push_back(v);
      if (static_cast<long>(out.size()) > max_points)
        throw CapacityError("sigma net exceeds the point cap of " + std::to_string(max_points));
    }
  }
}

} // namespace

SigmaNet build_sigma_net(int m, double sigma, long max_points) {
  if (m < 1) throw ValidationError("sigma net: m must be >= 1");
  if (!(sigma > 0)) throw ValidationError("sigma net: sigma must be positive");
  SigmaNet net;
  net.dim = m;
  net.mesh = sigma;
  build_recursive(m, sigma, max_points, net.points);
  return net;
}

CoveringReport covering_check(const SigmaNet& net, long samples, std::uint64_t seed) {
  if (net.points.empty()) throw ValidationError("covering_check: empty net");
  if (samples < 1) throw ValidationError("covering_check: samples must be >= 1");
  Rng rng(seed);
  CoveringReport report;
  report.samples = samples;
  for (long k = 0; k < samples; ++k) {
    Vector s = uniform_on_sphere(rng, net.dim);
    double best = std::numeric_limits<double>::infinity();
    for (const Vector& b : net.points) best = std::min(best, (s - b).norm());
    if (best > report.max_gap) {
      report.max_gap = best;
      report.worst_direction = s;
    }
  }
  report.pass = report.max_gap <= net.mesh;
  return report;
}

} // namespace funnel
