#include "spinsemi/boundary_layer.hpp"

#include <algorithm>
#include <cmath>

#include "spinsemi/errors.hpp"

namespace spinsemi {

namespace {

const cplx kI{0.0, 1.0};

cplx stereo_cos(cplx zeta, cplx eta) {
  const cplx ze = zeta * eta;
  return (1.0 - ze) / (1.0 + ze);
}

cplx checked_ratio(cplx zeta, cplx eta) {
  if (zeta == 0.0 || eta == 0.0) throw PoleError("classical path touches a pole; azimuth undefined");
  return zeta / eta;
}

}  // namespace

BoundaryLayerPath::BoundaryLayerPath(const FieldSpec& f, const SphereAngles& from, const SphereAngles& to, double t,
                                     RegularizationConfig reg, const IntegratorConfig& cfg)
    : f_(f), t_(t), nu_(reg.nu) {
  if (!(reg.nu > 0.0) || !std::isfinite(reg.nu)) throw ParameterError("nu must be positive");
  if (!(t > 0.0) || reg.nu * t < 10.0) throw ParameterError("boundary layers need nu * t >= 10");
  auto off_pole = [](const SphereAngles& p) { return p.theta() > 0.0 && p.theta() < kPi; };
  if (!off_pole(from) || !off_pole(to)) throw PoleError("boundary-layer logarithms undefined at a pole");

  phi1_ = from.phi();
  phi2_ = to.phi();
  c1_ = std::cos(from.theta());
  c2_ = std::cos(to.theta());
  traj_ = solve_trajectory(f, from, to, t, cfg);
  cbar1_ = stereo_cos(traj_.zeta_start, traj_.eta_start());
  cbar2_ = stereo_cos(traj_.zeta_end(), traj_.eta_end);

  cplx prev_ratio;
  cplx acc;
  for (std::size_t k = 0; k < traj_.samples.size(); ++k) {
    const auto& smp = traj_.samples[k];
    const cplx r = checked_ratio(smp.zeta, smp.eta);
    acc = k == 0 ? std::log(r) : acc + std::log(r / prev_ratio);
    prev_ratio = r;
    grid_s_.push_back(smp.s);
    grid_log_.push_back(acc);
  }
}

cplx BoundaryLayerPath::log_ratio(double s, cplx zeta, cplx eta) const {
  auto it = std::upper_bound(grid_s_.begin(), grid_s_.end(), s);
  const std::size_t k = it == grid_s_.begin() ? 0 : static_cast<std::size_t>(it - grid_s_.begin()) - 1;
  const auto& smp = traj_.samples[k];
  return grid_log_[k] + std::log(checked_ratio(zeta, eta) / checked_ratio(smp.zeta, smp.eta));
}

ComplexAngles BoundaryLayerPath::compose(double s, cplx zeta, cplx eta, cplx log_ratio, bool start_layer) const {
  const cplx cbar = stereo_cos(zeta, eta);
  const cplx phibar = log_ratio / (2.0 * kI);
  ComplexAngles out;
  if (start_layer) {
    const cplx jump = (c1_ - cbar1_) * std::exp(-nu_ * s);
    out.cos_theta = cbar + jump;
    const cplx outer = (1.0 + c1_) / (1.0 - c1_);
    const cplx inner = (1.0 + cbar1_ + jump) / (1.0 - cbar1_ - jump);
    out.phi = phibar - grid_log_.front() / (2.0 * kI) + phi1_ + 0.5 * kI * std::log(outer / inner);
  } else {
    const cplx jump = (c2_ - cbar2_) * std::exp(-nu_ * (t_ - s));
    out.cos_theta = cbar + jump;
    const cplx outer = (1.0 + c2_) / (1.0 - c2_);
    const cplx inner = (1.0 + cbar2_ + jump) / (1.0 - cbar2_ - jump);
    out.phi = phibar - grid_log_.back() / (2.0 * kI) + phi2_ - 0.5 * kI * std::log(outer / inner);
  }
  return out;
}

ComplexAngles BoundaryLayerPath::classical(double s) const {
  const StereoPair p = traj_.at(s);
  return {stereo_cos(p.zeta, p.eta), log_ratio(s, p.zeta, p.eta) / (2.0 * kI)};
}

ComplexAngles BoundaryLayerPath::at(double s) const {
  if (!(s >= 0.0 && s <= t_)) throw OutOfRangeError("boundary-layer time outside [0, t]");
  const StereoPair p = traj_.at(s);
  return compose(s, p.zeta, p.eta, log_ratio(s, p.zeta, p.eta), s <= 0.5 * t_);
}

ComplexAngles boundary_layer_path(const FieldSpec& f, const SphereAngles& from, const SphereAngles& to, double t,
                                  RegularizationConfig reg, double s) {
  return BoundaryLayerPath(f, from, to, t, reg).at(s);
}

ElResidual euler_lagrange_residual(const BoundaryLayerPath& path, double s) {
  const double t = path.horizon();
  const double nu = path.nu();
  const double h = std::min(1e-4, 0.01 / nu);
  if (!(s - h > 0.0 && s + h < t)) throw OutOfRangeError("residual time must lie inside (0, t)");

  // Neighbouring classical points from single fixed steps off one base state;
  // dense-output interpolation noise would swamp the second differences.
  const FieldSpec& f = path.field();
  auto rhs = [&f](double tt, const CState<2>& y, CState<2>& dy) {
    const FieldSample b = field_at(f, tt);
    dy[0] = riccati_rhs(b, y[0], Branch::zeta);
    dy[1] = riccati_rhs(b, y[1], Branch::eta);
  };
  const StereoPair base = path.trajectory().at(s);
  const CState<2> y0{base.zeta, base.eta};
  const CState<2> yp = dopri5_step(rhs, s, y0, h);
  const CState<2> ym = dopri5_step(rhs, s, y0, -h);

  const cplx l0 = path.log_ratio(s, base.zeta, base.eta);
  // All stencil points use the layer form of the centre point.
  const bool start_layer = s <= 0.5 * t;
  auto point = [&](double ss, const CState<2>& y) {
    const cplx l = l0 + std::log(checked_ratio(y[0], y[1]) / checked_ratio(base.zeta, base.eta));
    return path.compose(ss, y[0], y[1], l, start_layer);
  };
  const ComplexAngles pm = point(s - h, ym), p0 = point(s, y0), pp = point(s + h, yp);

  // acos picks theta only up to (theta, phi) -> (-theta, phi + pi); take the
  // representative with tan(theta/2) e^{i phi} on the zeta(s) side.
  const cplx th_principal = std::acos(p0.cos_theta);
  const cplx zeta_rep = std::tan(0.5 * th_principal) * std::exp(kI * p0.phi);
  const double sigma = std::abs(zeta_rep - base.zeta) <= std::abs(zeta_rep + base.zeta) ? 1.0 : -1.0;

  const cplx th_m = sigma * std::acos(pm.cos_theta), th_0 = sigma * th_principal,
             th_p = sigma * std::acos(pp.cos_theta);
  const cplx th_dot = (th_p - th_m) / (2.0 * h);
  const cplx th_ddot = (th_p - 2.0 * th_0 + th_m) / (h * h);
  const cplx ph_dot = (pp.phi - pm.phi) / (2.0 * h);
  const cplx ph_ddot = (pp.phi - 2.0 * p0.phi + pm.phi) / (h * h);

  const cplx c = p0.cos_theta;
  const cplx sn = sigma * std::sqrt(1.0 - c * c);
  const cplx cph = std::cos(p0.phi), sph = std::sin(p0.phi);
  const FieldSample b = field_at(f, s);
  const cplx dh_dtheta = 0.5 * (b.bx * c * cph + b.by * c * sph - b.bz * sn);
  const cplx dh_dphi = 0.5 * sn * (-b.bx * sph + b.by * cph);

  ElResidual r;
  r.r1 = 0.5 * sn * ph_dot + dh_dtheta + kI / (2.0 * nu) * (th_ddot - sn * c * ph_dot * ph_dot);
  r.r2 = 0.5 * sn * th_dot - dh_dphi - kI / (2.0 * nu) * (sn * sn * ph_ddot + 2.0 * sn * c * th_dot * ph_dot);
  return r;
}

}  // namespace spinsemi
