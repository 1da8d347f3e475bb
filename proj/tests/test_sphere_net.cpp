#include "funnel/sphere_net.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace funnel;

TEST_CASE("the 0-sphere net is exactly {-1, +1}") {
  for (double sigma : {0.01, 0.5, 3.0}) {
    SigmaNet net = build_sigma_net(1, sigma);
    REQUIRE(net.size() == 2);
    CHECK(net.points[0][0] == -1.0);
    CHECK(net.points[1][0] == 1.0);
  }
}

TEST_CASE("circle net: sigma = 0.8 gives four points with gap 2 sin(pi/8)") {
  SigmaNet net = build_sigma_net(2, 0.8);
  REQUIRE(net.size() == 4);
  CoveringReport report = covering_check(net, 100000, 5);
  CHECK(report.pass);
  CHECK(report.max_gap <= 0.8);
  CHECK(report.max_gap == doctest::Approx(2.0 * std::sin(std::numbers::pi / 8.0)).epsilon(1e-3));
}

TEST_CASE("sphere nets certify their mesh statistically") {
  for (int m : {1, 2, 3}) {
    for (double sigma : {1.0, 0.5, 0.25}) {
      SigmaNet net = build_sigma_net(m, sigma);
      CoveringReport report = covering_check(net, 100000, 7);
      CAPTURE(m);
      CAPTURE(sigma);
      CHECK(report.pass);
      CHECK(report.max_gap <= sigma);
    }
  }
  // the recursive band construction past the hand-built cases
  SigmaNet deep = build_sigma_net(4, 1.0);
  CHECK(covering_check(deep, 50000, 7).pass);
}

TEST_CASE("an inadequate net fails the covering check") {
  SigmaNet sparse;
  sparse.dim = 2;
  sparse.mesh = 0.5;
  Vector east(2), west(2);
  east << 1.0, 0.0;
  west << -1.0, 0.0;
  sparse.points = {east, west};
  CoveringReport report = covering_check(sparse, 100000, 9);
  CHECK_FALSE(report.pass);
  CHECK(report.max_gap == doctest::Approx(std::sqrt(2.0)).epsilon(1e-3));
}

TEST_CASE("net points are unit vectors") {
  for (int m : {1, 2, 3, 4}) {
    SigmaNet net = build_sigma_net(m, 0.6);
    for (const Vector& b : net.points) CHECK(std::abs(b.norm() - 1.0) <= 1e-12);
  }
}

TEST_CASE("finer meshes never shrink the net") {
  for (int m : {1, 2, 3}) {
    long previous = 0;
    for (double sigma : {2.0, 1.5, 1.0, 0.8, 0.6, 0.5, 0.4, 0.3, 0.25, 0.2, 0.15, 0.1}) {
      SigmaNet net = build_sigma_net(m, sigma);
      CAPTURE(m);
      CAPTURE(sigma);
      CHECK(net.size() >= previous);
      previous = net.size();
    }
  }
}

TEST_CASE("point cap raises a capacity error") {
  CHECK_THROWS_AS(build_sigma_net(3, 0.01, 50), CapacityError);
}

TEST_CASE("construction is deterministic") {
  SigmaNet a = build_sigma_net(3, 0.4);
  SigmaNet b = build_sigma_net(3, 0.4);
  REQUIRE(a.size() == b.size());
  for (int i = 0; i < a.size(); ++i)
    CHECK((a.points[static_cast<std::size_t>(i)] - b.points[static_cast<std::size_t>(i)]).norm() ==
          0.0);
}
