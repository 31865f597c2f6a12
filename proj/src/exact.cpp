#include "spinsemi/exact.hpp"

#include <algorithm>
#include <cmath>

#include "spinsemi/errors.hpp"

namespace spinsemi {

namespace {

const cplx kI{0.0, 1.0};

// Runs one Dopri5 over [t0, t1], restarting at every field breakpoint so no
// step straddles a kink of a tabulated field.
template <std::size_t N, class Rhs>
void integrate_piecewise(const FieldSpec& f, Dopri5<N>& solver, Rhs&& rhs, double t0, double t1,
                         CState<N>& y) {
  double a = t0;
  auto keep_going = [](const DenseStep<N>&, const CState<N>&) { return true; };
  for (double bp : f.breakpoints(t0, t1)) {
    solver.integrate(rhs, a, y, bp, keep_going);
    a = bp;
  }
  solver.integrate(rhs, a, y, t1, keep_going);
}

void check_horizon(double t0, double t1) {
  if (!std::isfinite(t0) || !std::isfinite(t1) || t1 < t0)
    throw ParameterError("propagation interval must be finite with t1 >= t0");
}

}  // namespace

Su2Propagator compose(const Su2Propagator& later, const Su2Propagator& earlier) {
  Su2Propagator u;
  u.a = later.a * earlier.a - later.b * std::conj(earlier.b);
  u.b = later.a * earlier.b + later.b * std::conj(earlier.a);
  u.t = later.t + earlier.t;
  return u;
}

Spinor apply(const Su2Propagator& u, const Spinor& psi) {
  return {u.a * psi.up + u.b * psi.down, -std::conj(u.b) * psi.up + std::conj(u.a) * psi.down};
}

ExactResult integrate_ab_interval(const FieldSpec& f, double t0, double t1, const IntegratorConfig& cfg) {
  check_horizon(t0, t1);
  ExactResult r;
  r.u.t = t1 - t0;
  if (t1 == t0) return r;

  auto rhs = [&f](double t, const CState<2>& y, CState<2>& dy) {
    const FieldSample b = field_at(f, t);
    const cplx g = kI * b.bx + b.by;
    dy[0] = -0.5 * kI * b.bz * y[0] + 0.5 * g * std::conj(y[1]);
    dy[1] = -0.5 * kI * b.bz * y[1] - 0.5 * g * std::conj(y[0]);
  };
  Dopri5<2> solver(cfg, t1 - t0);
  CState<2> y{cplx{1.0, 0.0}, cplx{0.0, 0.0}};
  integrate_piecewise(f, solver, rhs, t0, t1, y);
  r.u.a = y[0];
  r.u.b = y[1];
  r.counters = solver.counters();
  return r;
}

ExactResult integrate_ab_detailed(const FieldSpec& f, double t, const IntegratorConfig& cfg) {
  return integrate_ab_interval(f, 0.0, t, cfg);
}

Su2Propagator integrate_ab(const FieldSpec& f, double t, const IntegratorConfig& cfg) {
  return integrate_ab_interval(f, 0.0, t, cfg).u;
}

cplx matrix_element(const Su2Propagator& u, const SphereAngles& to, const SphereAngles& from) {
  const double c2 = std::cos(0.5 * to.theta()), s2 = std::sin(0.5 * to.theta());
  const double c1 = std::cos(0.5 * from.theta()), s1 = std::sin(0.5 * from.theta());
  const double diff = 0.5 * (to.phi() - from.phi());
  const double sum = 0.5 * (to.phi() + from.phi());
  return u.a * c2 * c1 * std::polar(1.0, diff) + std::conj(u.a) * s2 * s1 * std::polar(1.0, -diff) +
         u.b * c2 * s1 * std::polar(1.0, sum) - std::conj(u.b) * s2 * c1 * std::polar(1.0, -sum);
}

LabelEvolution evolve_label(const Su2Propagator& u, const SphereAngles& p) {
  const SpinorLabel d = decompose_spinor(apply(u, coherent_spinor(p)));
  return {d.label, d.phase, d.degenerate};
}

LabelTrajectory integrate_label(const FieldSpec& f, const SphereAngles& p, double t,
                                const IntegratorConfig& cfg) {
  check_horizon(0.0, t);
  LabelTrajectory r;
  r.label = p;
  r.phi_unwrapped = p.phi();
  if (t == 0.0) return r;

  // State: Bloch vector n, unwrapped azimuth, phase integral (all real).
  auto rhs = [&f](double s, const CState<5>& y, CState<5>& dy) {
    const FieldSample b = field_at(f, s);
    const double nx = y[0].real(), ny = y[1].real(), nz = y[2].real();
    const double dx = b.by * nz - b.bz * ny;
    const double dyy = b.bz * nx - b.bx * nz;
    const double dz = b.bx * ny - b.by * nx;
    const double rho2 = nx * nx + ny * ny;
    double phidot;
    if (rho2 > 1e-24) {
      phidot = (nx * dyy - ny * dx) / rho2;
    } else if (b.bx == 0.0 && b.by == 0.0) {
      phidot = b.bz;
    } else {
      throw DegenerateLabelError("label path passes through a pole; azimuth undefined");
    }
    const double norm = std::sqrt(rho2 + nz * nz);
    const double cos_theta = nz / norm;
    const double h = 0.5 * (b.bx * nx + b.by * ny + b.bz * nz) / norm;
    dy[0] = dx;
    dy[1] = dyy;
    dy[2] = dz;
    dy[3] = phidot;
    dy[4] = 0.5 * cos_theta * phidot - h;
  };

  const double st = std::sin(p.theta());
  CState<5> y{cplx{st * std::cos(p.phi())}, cplx{st * std::sin(p.phi())}, cplx{std::cos(p.theta())},
              cplx{p.phi()}, cplx{0.0}};
  Dopri5<5> solver(cfg, t);
  integrate_piecewise(f, solver, rhs, 0.0, t, y);

  const double nx = y[0].real(), ny = y[1].real(), nz = y[2].real();
  r.phi_unwrapped = y[3].real();
  r.phase = y[4].real();
  r.label = SphereAngles(std::atan2(std::hypot(nx, ny), nz), r.phi_unwrapped);
  r.counters = solver.counters();
  return r;
}

double accumulated_phase(const FieldSpec& f, const SphereAngles& p, double t, const IntegratorConfig& cfg) {
  return integrate_label(f, p, t, cfg).phase;
}

double nonadiabatic_probability(const FieldSpec& f, const Su2Propagator& u, double t0, double t1) {
  auto upper_state = [&f](double t) {
    const FieldSample b = field_at(f, t);
    const double n = b.norm();
    if (n == 0.0) return SphereAngles(0.0, 0.0);
    return SphereAngles(std::acos(std::clamp(b.bz / n, -1.0, 1.0)), std::atan2(b.by, b.bx));
  };
  const double p = std::norm(matrix_element(u, upper_state(t1), upper_state(t0)));
  return std::clamp(1.0 - p, 0.0, 1.0);
}

}  // namespace spinsemi
