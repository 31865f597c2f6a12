// Exact spin-1/2 propagator U(t) = [[a, b], [-b*, a*]] from the linear
// coefficient equations, coherent-state matrix elements and label evolution.

#pragma once

#include "spinsemi/field.hpp"
#include "spinsemi/ode.hpp"
#include "spinsemi/sphere.hpp"

namespace spinsemi {

struct Su2Propagator {
  cplx a{1.0, 0.0};
  cplx b{0.0, 0.0};
  double t = 0.0;

  double unitarity_defect() const { return std::abs(std::norm(a) + std::norm(b) - 1.0); }
};

/// U(later) * U(earlier); elapsed times add.
Su2Propagator compose(const Su2Propagator& later, const Su2Propagator& earlier);

Spinor apply(const Su2Propagator& u, const Spinor& psi);

struct ExactResult {
  Su2Propagator u;
  StepCounters counters;
};

/// Integrates the coefficient ODEs on [0, t] from (a, b) = (1, 0).
Su2Propagator integrate_ab(const FieldSpec& f, double t, const IntegratorConfig& cfg = {});
ExactResult integrate_ab_detailed(const FieldSpec& f, double t, const IntegratorConfig& cfg = {});

/// Same ODEs on [t0, t1]; the result is the propagator from t0 to t1.
ExactResult integrate_ab_interval(const FieldSpec& f, double t0, double t1, const IntegratorConfig& cfg = {});

/// <to|U|from>.
cplx matrix_element(const Su2Propagator& u, const SphereAngles& to, const SphereAngles& from);

struct LabelEvolution {
  SphereAngles label;
  /// Phi with U|p> = e^{i Phi} |label>, label.phi reduced to (-pi, pi].
  double phase = 0.0;
  /// Evolved label within 1e-12 of a pole; label.phi is then 0.
  bool degenerate = false;
};

LabelEvolution evolve_label(const Su2Propagator& u, const SphereAngles& p);

struct LabelTrajectory {
  SphereAngles label;
  /// Continuously followed azimuth at time t (not reduced).
  double phi_unwrapped = 0.0;
  /// int_0^t [cos(theta) phi_dot / 2 - H] ds along the classical label path.
  double phase = 0.0;
  StepCounters counters;
};

/// Integrates the classical label motion (Bloch precession n_dot = B x n) with
/// the phase quadrature. Throws DegenerateLabelError when the path hits a pole
/// with a transverse field.
LabelTrajectory integrate_label(const FieldSpec& f, const SphereAngles& p, double t,
                                const IntegratorConfig& cfg = {});

double accumulated_phase(const FieldSpec& f, const SphereAngles& p, double t,
                         const IntegratorConfig& cfg = {});

/// 1 - |<E+(t1)|U|E+(t0)>|^2 with E+ the upper instantaneous eigenvector of B.S.
double nonadiabatic_probability(const FieldSpec& f, const Su2Propagator& u, double t0, double t1);

}  // namespace spinsemi
