#include "spinsemi/sphere.hpp"

#include <cmath>
#include <string>

#include "spinsemi/errors.hpp"
#include "spinsemi/quadrature.hpp"

namespace spinsemi {

namespace {
constexpr double kAngleSlack = 1e-12;
const cplx kI{0.0, 1.0};
}  // namespace

double reduce_angle(double phi) {
  if (!std::isfinite(phi)) throw InputError("angle must be finite");
  double r = std::remainder(phi, 2.0 * kPi);  // [-pi, pi]
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

SphereAngles::SphereAngles(double theta, double phi) {
  if (!std::isfinite(theta) || !std::isfinite(phi))
    throw InputError("sphere angles must be finite");
  if (theta < -kAngleSlack || theta > kPi + kAngleSlack)
    throw InputError("polar angle " + std::to_string(theta) + " outside [0, pi]");
  if (theta < kAngleSlack) theta = 0.0;
  if (theta > kPi - kAngleSlack) theta = kPi;
  theta_ = theta;
  phi_ = reduce_angle(phi);
}

Spinor coherent_spinor(const SphereAngles& p) {
  const double c = std::cos(0.5 * p.theta());
  const double s = std::sin(0.5 * p.theta());
  return {c * std::polar(1.0, -0.5 * p.phi()), s * std::polar(1.0, 0.5 * p.phi())};
}

cplx overlap(const SphereAngles& to, const SphereAngles& from) {
  const double dphi = to.phi() - from.phi();
  return std::cos(0.5 * to.theta()) * std::cos(0.5 * from.theta()) * std::polar(1.0, 0.5 * dphi) +
         std::sin(0.5 * to.theta()) * std::sin(0.5 * from.theta()) * std::polar(1.0, -0.5 * dphi);
}

StereoPair to_stereo(const SphereAngles& p) {
  if (p.theta() >= kPi) throw PoleError("stereographic coordinate diverges at the south pole");
  const double r = std::tan(0.5 * p.theta());
  return {std::polar(r, p.phi()), std::polar(r, -p.phi())};
}

SphereAngles from_stereo(const StereoPair& p) {
  if (std::abs(p.eta - std::conj(p.zeta)) > 1e-12 * (1.0 + std::abs(p.zeta)))
    throw NotRealPointError("stereographic pair is not a real sphere point (eta != conj(zeta))");
  // 2 atan|zeta| equals arccos((1 - zeta eta) / (1 + zeta eta)) but keeps full
  // relative accuracy near the north pole.
  const double theta = 2.0 * std::atan(std::abs(p.zeta));
  const double phi = p.zeta == cplx{} ? 0.0 : std::arg(p.zeta);
  return {theta, phi};
}

SpinMatrixElements spin_matrix_elements(const SphereAngles& to, const SphereAngles& from) {
  const double c2 = std::cos(0.5 * to.theta()), s2 = std::sin(0.5 * to.theta());
  const double c1 = std::cos(0.5 * from.theta()), s1 = std::sin(0.5 * from.theta());
  const double sum = 0.5 * (to.phi() + from.phi());
  const double diff = 0.5 * (to.phi() - from.phi());
  const cplx cross_p = c2 * s1 * std::polar(1.0, sum);
  const cplx cross_m = s2 * c1 * std::polar(1.0, -sum);
  const cplx diag_p = c2 * c1 * std::polar(1.0, diff);
  const cplx diag_m = s2 * s1 * std::polar(1.0, -diff);

  SpinMatrixElements m;
  m.sx = 0.5 * (cross_p + cross_m);
  m.sy = (cross_p - cross_m) / (2.0 * kI);
  m.sz = 0.5 * (diag_p - diag_m);
  m.overlap = diag_p + diag_m;
  return m;
}

SpinorLabel decompose_spinor(const Spinor& psi) {
  SpinorLabel out;
  const double au = std::abs(psi.up), ad = std::abs(psi.down);
  out.magnitude = std::hypot(au, ad);
  if (out.magnitude == 0.0) throw NumericalError("cannot label the zero spinor");
  const double theta = 2.0 * std::atan2(ad, au);
  if (theta < kAngleSlack) {
    out.degenerate = true;
    out.label = SphereAngles(0.0, 0.0);
    out.phase = std::arg(psi.up);
  } else if (theta > kPi - kAngleSlack) {
    out.degenerate = true;
    out.label = SphereAngles(kPi, 0.0);
    out.phase = std::arg(psi.down);
  } else {
    out.label = SphereAngles(theta, std::arg(psi.down) - std::arg(psi.up));
    out.phase = reduce_angle(std::arg(psi.up) + 0.5 * out.label.phi());
  }
  return out;
}

Matrix2c identity_resolution_matrix(int n_theta, int n_phi) {
  if (n_theta < 2 || n_phi < 2) throw ParameterError("quadrature orders must be at least 2");
  const QuadratureRule gl = gauss_legendre(n_theta);
  const double dphi = 2.0 * kPi / n_phi;

  Matrix2c m{};
  for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
    const double x = gl.nodes[i];
    const double theta = std::acos(x);
    for (int k = 0; k < n_phi; ++k) {
      const Spinor v = coherent_spinor(SphereAngles(theta, k * dphi));
      const double w = gl.weights[i] * dphi / (2.0 * kPi);
      m[0][0] += w * v.up * std::conj(v.up);
      m[0][1] += w * v.up * std::conj(v.down);
      m[1][0] += w * v.down * std::conj(v.up);
      m[1][1] += w * v.down * std::conj(v.down);
    }
  }
  return m;
}

double identity_resolution_defect(int n_theta, int n_phi) {
  const Matrix2c m = identity_resolution_matrix(n_theta, n_phi);
  double defect = 0.0;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c)
      defect = std::max(defect, std::abs(m[r][c] - (r == c ? 1.0 : 0.0)));
  return defect;
}

QuadratureRule gauss_legendre(int n) {
  if (n < 1) throw ParameterError("Gauss-Legendre order must be positive");
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      // P_n = p1, P_{n-1} = p0
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

}  // namespace spinsemi
