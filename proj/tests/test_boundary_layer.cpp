#include <cmath>

#include "doctest.h"
#include "spinsemi/boundary_layer.hpp"
#include "spinsemi/errors.hpp"
#include "support.hpp"

using namespace spinsemi;
using testing::Rng;

TEST_CASE("boundary-layer endpoints and interior") {
  Rng rng(61);
  for (int i = 0; i < 10; ++i) {
    const auto f = testing::const_field(rng);
    const auto from = testing::angles(rng), to = testing::angles(rng);
    const double t = testing::uni(rng, 0.5, 3);
    const BoundaryLayerPath path(f, from, to, t, {20.0 / t});
    CHECK(std::abs(path.at(0.0).cos_theta - std::cos(from.theta())) < 1e-10);
    CHECK(std::abs(path.at(t).cos_theta - std::cos(to.theta())) < 1e-10);

    const BoundaryLayerPath sharp(f, from, to, t, {1e4 / t});
    const auto mid = sharp.at(0.5 * t), cl = sharp.classical(0.5 * t);
    CHECK(std::abs(mid.cos_theta - cl.cos_theta) < 1e-12);
    CHECK(std::abs(boundary_layer_path(f, from, to, t, {1e4 / t}, 0.5 * t).cos_theta - mid.cos_theta) < 1e-15);
  }
}

TEST_CASE("boundary-layer preconditions") {
  const FieldSpec f = ConstantField{1, 0, 1};
  CHECK_THROWS_AS(BoundaryLayerPath(f, {1.0, 0.0}, {1.0, 0.0}, 1.0, {5.0}), ParameterError);
  CHECK_THROWS_AS(BoundaryLayerPath(f, {1.0, 0.0}, {1.0, 0.0}, 1.0, {-5.0}), ParameterError);
  CHECK_THROWS_AS(BoundaryLayerPath(f, {0.0, 0.0}, {1.0, 0.0}, 1.0, {50.0}), PoleError);
  const BoundaryLayerPath path(f, {1.0, 0.0}, {1.2, 0.5}, 1.0, {50.0});
  CHECK_THROWS_AS(path.at(1.5), OutOfRangeError);
  CHECK_THROWS_AS(euler_lagrange_residual(path, 0.0), OutOfRangeError);
}

TEST_CASE("stationary free path has vanishing residual") {
  const SphereAngles p{1.1, 0.6};
  const double t = 2.0;
  const BoundaryLayerPath path(ConstantField{}, p, p, t, {100.0 / t});
  for (double s = 0.25 * t; s <= 0.75 * t; s += 0.05 * t) {
    const auto r = euler_lagrange_residual(path, s);
    CHECK(std::abs(r.r1) <= 1e-6);
    CHECK(std::abs(r.r2) <= 1e-6);
  }
}

TEST_CASE("residual in the classical region shrinks as nu grows") {
  Rng rng(62);
  for (int i = 0; i < 10; ++i) {
    const auto f = testing::const_field(rng);
    const auto from = testing::angles(rng), to = testing::angles(rng);
    const double t = testing::uni(rng, 0.5, 3);
    double prev = 1e300;
    for (double k : {10.0, 20.0, 40.0, 80.0}) {
      const auto r = euler_lagrange_residual(BoundaryLayerPath(f, from, to, t, {k / t}), 0.5 * t);
      const double mag = std::abs(r.r1) + std::abs(r.r2);
      CHECK(mag <= prev + 1e-8);
      prev = mag;
    }
  }
}
