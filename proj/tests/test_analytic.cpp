#include <cmath>

#include "doctest.h"
#include "spinsemi/analytic.hpp"
#include "spinsemi/errors.hpp"
#include "spinsemi/exact.hpp"
#include "spinsemi/quadrature.hpp"
#include "spinsemi/semiclassical.hpp"
#include "support.hpp"

using namespace spinsemi;
using testing::Rng;

namespace {

const cplx I{0.0, 1.0};

cplx random_c(Rng& rng, double r) { return {testing::uni(rng, -r, r), testing::uni(rng, -r, r)}; }

// Closed forms in tan/arctan form for B = (delta, 0, eps).
cplx tan_path(double delta, double eps, cplx z0, double tau) {
  const double w = std::hypot(delta, eps);
  return -eps / delta - I * (w / delta) * std::tan(w * tau / 2 + std::atan(I * (eps + delta * z0) / w));
}

cplx end_value(double delta, double eps, cplx z0, double t) {
  const double w = std::hypot(delta, eps), c = std::cos(w * t / 2), s = std::sin(w * t / 2);
  return (w * z0 * c + I * (eps * z0 - delta) * s) / (w * c - I * (delta * z0 + eps) * s);
}

}  // namespace

TEST_CASE("Kummer examples") {
  Rng rng(41);
  for (int i = 0; i < 20; ++i) {
    const cplx a = random_c(rng, 3), b = random_c(rng, 3) + 4.0;
    CHECK(kummer_phi({a, b, 0.0}) == cplx(1.0));
  }
  CHECK(std::abs(kummer_phi({1.0, 1.0, 0.5}) - std::exp(0.5)) < 1e-15);
  for (int i = 0; i < 50; ++i) {
    const cplx a = random_c(rng, 3), z = random_c(rng, 3.5);
    if (std::abs(z) > 5) continue;
    CHECK(std::abs(kummer_phi({a, a, z}) - std::exp(z)) < 1e-13 * std::abs(std::exp(z)));
  }
}

TEST_CASE("Kummer closed forms and transformation") {
  Rng rng(42);
  for (int i = 0; i < 50; ++i) {
    const cplx z = random_c(rng, 4);
    CHECK(std::abs(kummer_phi({1.0, 2.0, z}) - (std::exp(z) - 1.0) / z) < 1e-13 * (1 + std::abs(std::exp(z))));
    const cplx b = random_c(rng, 2) + 3.0;
    CHECK(std::abs(kummer_phi({-2.0, b, z}) - (1.0 - 2.0 * z / b + z * z / (b * (b + 1.0)))) < 1e-13 * (1 + std::norm(z)));
  }
  // Phi(a, b, z) = e^z Phi(b - a, b, -z), including |z| = 20 on the imaginary axis.
  for (int i = 0; i < 100; ++i) {
    const cplx a = random_c(rng, 2), b = random_c(rng, 2) + 2.5;
    const cplx z = i % 2 ? cplx(0, testing::uni(rng, -20, 20)) : random_c(rng, 6);
    const cplx lhs = kummer_phi({a, b, z}), rhs = std::exp(z) * kummer_phi({b - a, b, -z});
    CHECK(std::abs(lhs - rhs) <= 1e-10 * std::abs(lhs) + 1e-13);
  }
}

TEST_CASE("Kummer series against direct Pochhammer sums") {
  // Terms from explicit products of rising factorials and factorials.
  Rng rng(43);
  for (int i = 0; i < 20; ++i) {
    const cplx a = random_c(rng, 2), b = random_c(rng, 2) + 3.0, z = random_c(rng, 0.3);
    cplx sum = 0.0;
    for (int n = 0; n <= 20; ++n) {
      cplx an = 1.0, bn = 1.0;
      double fact = 1.0;
      for (int k = 0; k < n; ++k) {
        an *= a + double(k);
        bn *= b + double(k);
        fact *= k + 1;
      }
      sum += an / bn * std::pow(z, n) / fact;
    }
    CHECK(std::abs(kummer_phi({a, b, z}) - sum) < 1e-13 * std::abs(sum));
  }
}

TEST_CASE("Kummer rejects nonpositive integer beta") {
  CHECK_THROWS_AS(kummer_phi({1.0, 0.0, 1.0}), ParameterError);
  CHECK_THROWS_AS(kummer_phi({1.0, -3.0, 1.0}), ParameterError);
  CHECK_THROWS_AS(kummer_phi({NAN, 1.0, 1.0}), ParameterError);
  CHECK_NOTHROW(kummer_phi({1.0, cplx(-3.0, 1e-3), 1.0}));
}

TEST_CASE("constant-field propagator examples") {
  const double eps = 0.8, t = 1.7;
  auto u = constant_field_ab(0.0, eps, t);
  CHECK(std::abs(u.a - std::exp(-0.5 * I * eps * t)) < 1e-15);
  CHECK(std::abs(u.b) < 1e-15);
  u = constant_field_ab(2.0, 0.0, kPi / 2.0);
  CHECK(std::abs(u.a) < 1e-15);
  CHECK(std::abs(u.b + I) < 1e-15);
  u = constant_field_ab(0.6, 0.8, 2 * kPi);
  CHECK(std::abs(u.a + 1.0) < 1e-14);
  CHECK(std::abs(u.b) < 1e-14);
  u = constant_field_ab(0.0, 0.0, 3.0);
  CHECK(u.a == cplx(1.0));
  CHECK(u.b == cplx(0.0));
}

TEST_CASE("constant-field propagator against the ODE") {
  Rng rng(44);
  for (int i = 0; i < 30; ++i) {
    const double d = testing::uni(rng, -3, 3), e = testing::uni(rng, -3, 3), t = testing::uni(rng, 0, 10);
    const auto exact = integrate_ab(ConstantField{d, 0, e}, t), closed = constant_field_ab(d, e, t);
    CHECK(std::abs(exact.a - closed.a) < 1e-10);
    CHECK(std::abs(exact.b - closed.b) < 1e-10);
  }
}

TEST_CASE("constant-field paths") {
  Rng rng(45);
  for (int i = 0; i < 50; ++i) {
    const double d = testing::uni(rng, 0.3, 2) * (i % 2 ? 1 : -1), e = testing::uni(rng, -2, 2);
    const double t = testing::uni(rng, 0.2, 3);
    const cplx z0 = to_stereo(testing::angles(rng)).zeta, et = to_stereo(testing::angles(rng)).eta;
    CHECK(std::abs(constant_field_paths(d, e, z0, et, t, 0.0).zeta - z0) < 1e-14 * (1 + std::abs(z0)));
    CHECK(std::abs(constant_field_paths(d, e, z0, et, t, t).eta - et) < 1e-14 * (1 + std::abs(et)));

    const cplx zt = constant_field_paths(d, e, z0, et, t, t).zeta;
    const cplx e0 = constant_field_paths(d, e, z0, et, t, 0.0).eta;
    CHECK(std::abs(zt - end_value(d, e, z0, t)) < 1e-10 * (1 + std::abs(zt)));
    CHECK(std::abs(e0 - end_value(d, e, et, t)) < 1e-10 * (1 + std::abs(e0)));

    const double s = testing::uni(rng, 0, t);
    const auto p = constant_field_paths(d, e, z0, et, t, s);
    const cplx zt2 = tan_path(d, e, z0, s), et2 = tan_path(d, e, et, t - s);
    if (std::abs(zt2) < 1e3) CHECK(std::abs(p.zeta - zt2) < 1e-9 * (1 + std::abs(zt2)));
    if (std::abs(et2) < 1e3) CHECK(std::abs(p.eta - et2) < 1e-9 * (1 + std::abs(et2)));
  }
}

TEST_CASE("constant-field paths against the Riccati integration") {
  Rng rng(46);
  for (int i = 0; i < 20; ++i) {
    const double d = testing::uni(rng, -3, 3), e = testing::uni(rng, -3, 3), t = testing::uni(rng, 0.1, 4);
    const auto from = testing::angles(rng), to = testing::angles(rng);
    const auto traj = solve_trajectory(ConstantField{d, 0, e}, from, to, t);
    for (double s : {0.0, 0.3 * t, 0.77 * t, t}) {
      const auto closed = constant_field_paths(d, e, to_stereo(from).zeta, to_stereo(to).eta, t, s);
      const auto num = traj.at(s);
      CHECK(std::abs(closed.zeta - num.zeta) < 1e-8 * (1 + std::abs(num.zeta)));
      CHECK(std::abs(closed.eta - num.eta) < 1e-8 * (1 + std::abs(num.eta)));
    }
  }
}

TEST_CASE("constant-field exponent integral") {
  // exp{-(i/2) int [delta (zeta + eta) / 2 + eps] ds} squared against the
  // product of the two bracket factors over omega^2.
  Rng rng(47);
  const auto rule = gauss_legendre(200);
  for (int i = 0; i < 20; ++i) {
    const double d = testing::uni(rng, 0.3, 2), e = testing::uni(rng, -2, 2), t = testing::uni(rng, 0.1, 2);
    const cplx z0 = to_stereo(testing::angles(rng)).zeta, et = to_stereo(testing::angles(rng)).eta;
    const double w = std::hypot(d, e), c = std::cos(w * t / 2), sn = std::sin(w * t / 2);
    cplx integral = 0.0;
    try {
      for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
        const double s = 0.5 * t * (rule.nodes[k] + 1);
        const auto p = constant_field_paths(d, e, z0, et, t, s);
        integral += 0.5 * t * rule.weights[k] * (0.5 * d * (p.zeta + p.eta) + e);
      }
    } catch (const PoleError&) {
      continue;
    }
    const cplx lhs = std::exp(-I * integral);
    const cplx rhs = (w * c - I * (d * z0 + e) * sn) * (w * c - I * (d * et + e) * sn) / (w * w);
    CHECK(std::abs(lhs - rhs) < 1e-8 * (1 + std::abs(rhs)));
  }
}

TEST_CASE("Landau-Zener basis") {
  const auto b0 = lz_basis(1.3, 0.7, 0.0);
  CHECK(b0.A == cplx(1.0));
  CHECK(b0.D == cplx(1.0));
  CHECK(b0.B == cplx(0.0));
  CHECK(b0.C == cplx(0.0));

  // omega = 0: the alpha = 0 series terminates for A; D = Phi(1/2, 1/2, z) = e^z.
  const double g = 0.9, s = 1.4;
  const auto b = lz_basis(0.0, g, s);
  CHECK(b.A == cplx(1.0));
  CHECK(std::abs(b.B) == 0.0);
  CHECK(std::abs(b.C) == 0.0);
  CHECK(std::abs(b.D - std::exp(-0.5 * I * g * g * s * s)) < 1e-14);

  CHECK_THROWS_AS(lz_basis(1.0, 1.0, 11.0), ParameterError);
}

TEST_CASE("Landau-Zener derivative relations") {
  const double h = 1e-5;
  for (double w : {0.2, 0.9, 1.6, 2.3, 3.0})
    for (double g : {0.2, 0.9, 1.6, 2.3, 3.0})
      for (double s : {0.1, 0.6, 1.1, 1.6, 2.1}) {
        if (0.5 * g * g * (s + h) * (s + h) > 20) continue;
        const auto m = lz_basis(w, g, s - h), c = lz_basis(w, g, s), p = lz_basis(w, g, s + h);
        const cplx k = -0.5 * I * w, q = -I * g * g * s;
        CHECK(std::abs((p.A - m.A) / (2 * h) - k * c.C) < 1e-6);
        CHECK(std::abs((p.B - m.B) / (2 * h) - k * c.D) < 1e-6);
        CHECK(std::abs((p.C - m.C) / (2 * h) - (k * c.A + q * c.C)) < 1e-6);
        CHECK(std::abs((p.D - m.D) / (2 * h) - (k * c.B + q * c.D)) < 1e-6);
      }
}

TEST_CASE("Landau-Zener propagator") {
  auto u = lz_ab(1.0, 1.0, 0.0);
  CHECK(u.a == cplx(1.0));
  CHECK(u.b == cplx(0.0));

  u = lz_ab(1.0, 1.0, 2.0);
  const auto ode = integrate_ab(LandauZenerField{1.0, 1.0, 0.0}, 2.0);
  CHECK(std::abs(u.a - ode.a) < 1e-8);
  CHECK(std::abs(u.b - ode.b) < 1e-8);

  for (double w = 0.2; w <= 3.0; w += 0.4)
    for (double g = 0.2; g <= 3.0; g += 0.4)
      for (double t = 0.0; t <= 4.0; t += 0.5) {
        if (0.5 * g * g * t * t > 50) continue;
        CHECK(lz_ab(w, g, t).unitarity_defect() <= 1e-9);
      }

  // gamma = 0 is a constant transverse field.
  u = lz_ab(1.5, 0.0, 2.0);
  const auto cf = constant_field_ab(1.5, 0.0, 2.0);
  CHECK(std::abs(u.a - cf.a) < 1e-15);
  CHECK(std::abs(u.b - cf.b) < 1e-15);
}
