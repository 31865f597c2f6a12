// Spin-1/2 coherent-state geometry on the unit sphere.
//
// Convention: |theta, phi> = exp(-i phi S_z) exp(-i theta S_y) |up>, i.e. the
// spinor (cos(theta/2) e^{-i phi/2}, sin(theta/2) e^{+i phi/2}). Because of the
// half-angle phases, phi and phi + 2 pi label the same ray with opposite sign.

#pragma once

#include <array>
#include <complex>
#include <numbers>

namespace spinsemi {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;

/// Reduces an angle to (-pi, pi].
double reduce_angle(double phi);

/// Real point (theta, phi) on the unit sphere. theta is clamped to [0, pi] when
/// it lies within 1e-12 of the boundary; phi is stored reduced to (-pi, pi].
class SphereAngles {
 public:
  SphereAngles() = default;
  SphereAngles(double theta, double phi);

  double theta() const { return theta_; }
  double phi() const { return phi_; }

  friend bool operator==(const SphereAngles&, const SphereAngles&) = default;

 private:
  double theta_ = 0.0;
  double phi_ = 0.0;
};

/// Stereographic pair (zeta, eta); eta = conj(zeta) on the real sphere.
struct StereoPair {
  cplx zeta;
  cplx eta;
};

/// Amplitudes of a two-component spinor in the S_z eigenbasis.
struct Spinor {
  cplx up;
  cplx down;
};

struct SpinMatrixElements {
  cplx sx;
  cplx sy;
  cplx sz;
  cplx overlap;
};

Spinor coherent_spinor(const SphereAngles& p);

/// <to|from>.
cplx overlap(const SphereAngles& to, const SphereAngles& from);

StereoPair to_stereo(const SphereAngles& p);
SphereAngles from_stereo(const StereoPair& p);

/// <to|S_i|from> for i = x, y, z together with <to|from>.
SpinMatrixElements spin_matrix_elements(const SphereAngles& to, const SphereAngles& from);

/// Result of writing a spinor as magnitude * e^{i phase} |label>.
struct SpinorLabel {
  SphereAngles label;
  double phase = 0.0;
  double magnitude = 0.0;
  /// theta within 1e-12 of a pole; phi is then set to 0 by convention.
  bool degenerate = false;
};

SpinorLabel decompose_spinor(const Spinor& psi);

using Matrix2c = std::array<std::array<cplx, 2>, 2>;

/// (1/2pi) * integral d(cos theta) d(phi) |Omega><Omega| by Gauss-Legendre in
/// cos(theta) and the periodic trapezoid rule in phi.
Matrix2c identity_resolution_matrix(int n_theta, int n_phi);

/// Largest absolute entry of identity_resolution_matrix(...) - 1.
double identity_resolution_defect(int n_theta, int n_phi);

}  // namespace spinsemi
