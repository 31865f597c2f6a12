// Semiclassical coherent-state propagator in stereographic variables.
//
// The classical path solves two decoupled Riccati equations: zeta forward
// from zeta(0) = zeta', eta backward from eta(t) = eta''. Near the point at
// infinity each is continued through the linear system whose ratio it is.

#pragma once

#include <vector>

#include "spinsemi/field.hpp"
#include "spinsemi/ode.hpp"
#include "spinsemi/sphere.hpp"

namespace spinsemi {

enum class Branch { zeta, eta };

cplx riccati_rhs(const FieldSample& b, cplx z, Branch which);
cplx riccati_rhs(const FieldSpec& f, cplx z, double t, Branch which);

/// One Riccati solution z(tau) = psi1 / psi0 on [0, horizon] with dense output.
/// For the eta branch tau is the reversed time t - s.
class RatioPath {
 public:
  struct Point {
    cplx z;
    /// Linear lift: (psi0, psi1) with z = psi1 / psi0 and psi0 = e^{2E}, E the
    /// exponent integral accumulated from tau = 0.
    cplx psi0, psi1;
    /// E itself, continued across chart switches.
    cplx exponent;
    /// Extra quadrature (h_integral for the forward zeta path).
    cplx quadrature;
  };

  struct Segment {
    DenseStep<4> step;
    bool projective = false;
    cplx e_entry;    // E at the last switch into the projective chart
    cplx logv_base;  // continued log v at the segment start
    cplx v_base;
  };

  double horizon() const { return horizon_; }
  Point at(double tau) const;
  Point end() const { return at(horizon_); }
  std::size_t segment_count() const { return segs_.size(); }
  int chart_switches() const { return switches_; }
  std::vector<double> step_times() const;

 private:
  friend class RatioSolver;
  Point eval(const Segment& s, double tau) const;

  double horizon_ = 0.0;
  cplx z0_;
  std::vector<Segment> segs_;
  int switches_ = 0;
};

struct TrajectorySample {
  double s = 0.0;
  cplx zeta;
  cplx eta;
};

struct ClassicalTrajectory {
  double horizon = 0.0;
  cplx zeta_start;  // zeta'
  cplx eta_end;     // eta''
  std::vector<TrajectorySample> samples;
  /// int_0^t H(zeta(s), eta'', s) ds.
  cplx h_integral;
  /// -(i/4) int_0^t [Bx (zeta + eta) - i By (zeta - eta) + 2 Bz] ds.
  cplx action_integral;
  StepCounters counters;
  RatioPath forward;
  RatioPath backward;

  StereoPair at(double s) const;
  cplx zeta_end() const;   // zeta(t)
  cplx eta_start() const;  // eta(0)
};

/// Requires from.theta < pi and to.theta < pi.
ClassicalTrajectory solve_trajectory(const FieldSpec& f, const SphereAngles& from, const SphereAngles& to,
                                     double t, const IntegratorConfig& cfg = {});

struct SemiclassicalResult {
  cplx value;
  StepCounters counters;
  /// Number of horizons visited by the action-route branch tracking.
  int branch_grid_points = 0;
  /// Pole endpoints were handled in a rotated frame.
  bool rotated = false;
};

/// exp(-i h_integral) <to|from>.
cplx propagator_endpoint_route(const FieldSpec& f, const SphereAngles& from, const SphereAngles& to, double t,
                               const IntegratorConfig& cfg = {});
SemiclassicalResult propagator_endpoint_route_detailed(const FieldSpec& f, const SphereAngles& from,
                                                       const SphereAngles& to, double t,
                                                       const IntegratorConfig& cfg = {});

/// Prefactor-times-exponential form with branches tracked in the horizon.
/// Requires both polar angles strictly inside (0, pi).
cplx propagator_action_route(const FieldSpec& f, const SphereAngles& from, const SphereAngles& to, double t,
                             const IntegratorConfig& cfg = {});
SemiclassicalResult propagator_action_route_detailed(const FieldSpec& f, const SphereAngles& from,
                                                     const SphereAngles& to, double t,
                                                     const IntegratorConfig& cfg = {});

struct JumpData {
  cplx zeta_bar_start;
  cplx eta_bar_end;
  cplx start_overlap_factor;
  cplx end_overlap_factor;
};

JumpData jump_data(const SphereAngles& from, const SphereAngles& to, const ClassicalTrajectory& traj);

}  // namespace spinsemi
