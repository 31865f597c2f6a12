// Finite-nu (Wiener-regularized) stationary path: classical trajectory plus
// exponential boundary layers of width 1/nu at both ends.

#pragma once

#include <vector>

#include "spinsemi/semiclassical.hpp"

namespace spinsemi {

struct RegularizationConfig {
  double nu = 0.0;
};

/// Complexified angle data of a path point.
struct ComplexAngles {
  cplx cos_theta;
  cplx phi;
};

class BoundaryLayerPath {
 public:
  /// Throws ParameterError unless nu > 0 and nu * t >= 10, PoleError when an
  /// endpoint sits on a pole.
  BoundaryLayerPath(const FieldSpec& f, const SphereAngles& from, const SphereAngles& to, double t,
                    RegularizationConfig reg, const IntegratorConfig& cfg = {});

  ComplexAngles at(double s) const;
  /// Classical path (cos theta_bar, phi_bar) with phi_bar(0) = arg-continued start.
  ComplexAngles classical(double s) const;

  const FieldSpec& field() const { return f_; }
  const ClassicalTrajectory& trajectory() const { return traj_; }
  double horizon() const { return t_; }
  double nu() const { return nu_; }

  /// Path evaluated from explicit classical stereo data at time s, using the
  /// start-layer form when start_layer is set and the end-layer form otherwise.
  ComplexAngles compose(double s, cplx zeta, cplx eta, cplx log_ratio, bool start_layer) const;
  /// Continued log(zeta / eta) along the trajectory.
  cplx log_ratio(double s, cplx zeta, cplx eta) const;

 private:
  FieldSpec f_;
  double t_ = 0.0;
  double nu_ = 0.0;
  double phi1_ = 0.0, phi2_ = 0.0;
  cplx c1_, c2_;        // cos theta', cos theta''
  cplx cbar1_, cbar2_;  // classical endpoint values
  ClassicalTrajectory traj_;
  std::vector<double> grid_s_;
  std::vector<cplx> grid_log_;
};

ComplexAngles boundary_layer_path(const FieldSpec& f, const SphereAngles& from, const SphereAngles& to, double t,
                                  RegularizationConfig reg, double s);

struct ElResidual {
  cplx r1;
  cplx r2;
};

/// Left minus right side of both regularized Euler-Lagrange equations at s,
/// with central differences of step min(1e-4, 0.01 / nu).
ElResidual euler_lagrange_residual(const BoundaryLayerPath& path, double s);

}  // namespace spinsemi
