#include "spinsemi/semiclassical.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>

#include "spinsemi/errors.hpp"
#include "spinsemi/exact.hpp"

namespace spinsemi {

namespace {

const cplx kI{0.0, 1.0};

constexpr double kToProjective = 1e3;
constexpr double kToAffine = 1e2;
constexpr int kInitialIntervals = 16;
constexpr int kMaxGridPoints = 1024;

// Field with its kinks on [0, t].
struct FieldView {
  FieldFunction b;
  std::vector<double> breakpoints;
};

FieldView view_of(const FieldSpec& f, double t) { return {field_function(f), f.breakpoints(0.0, t)}; }

// psi_dot = M psi, M = {m00, m01, m10, m11}.
using Mat2 = std::array<cplx, 4>;
using LinearGenerator = std::function<Mat2(double)>;
using PathQuadrature = std::function<cplx(cplx, cplx, double)>;

// -(i/2) B.sigma, the ket generator.
Mat2 forward_generator(const FieldSample& b) {
  return {-0.5 * kI * b.bz, -0.5 * kI * cplx{b.bx, -b.by}, -0.5 * kI * cplx{b.bx, b.by}, 0.5 * kI * b.bz};
}

// Bra generator in reversed time sigma = horizon - s.
Mat2 backward_generator(const FieldSample& b) {
  return {-0.5 * kI * b.bz, -0.5 * kI * cplx{b.bx, b.by}, -0.5 * kI * cplx{b.bx, -b.by}, 0.5 * kI * b.bz};
}

void require_horizon(double t) {
  if (!std::isfinite(t) || t < 0.0) throw ParameterError("horizon t must be finite and nonnegative");
}

}  // namespace

class RatioSolver {
 public:
  static RatioPath solve(const LinearGenerator& gen, std::vector<double> stops, cplx z0, double horizon,
                         const IntegratorConfig& cfg, const PathQuadrature& quad, StepCounters& counters) {
    RatioPath p;
    p.horizon_ = horizon;
    p.z0_ = z0;
    if (horizon == 0.0) return p;

    bool proj = std::abs(z0) > kToProjective;
    cplx e_entry{0.0, 0.0};
    cplx logv{0.0, 0.0};
    CState<4> y = proj ? CState<4>{cplx{1.0, 0.0}, z0, cplx{}, cplx{}} : CState<4>{z0, cplx{}, cplx{}, cplx{}};

    auto rhs = [&](double tau, const CState<4>& s, CState<4>& d) {
      const Mat2 m = gen(tau);
      if (!proj) {
        const cplx z = s[0];
        d[0] = m[2] + (m[3] - m[0]) * z - m[1] * z * z;
        d[1] = 0.0;
        d[2] = 0.5 * (m[0] + m[1] * z);
        d[3] = quad ? quad(1.0, z, tau) : cplx{};
      } else {
        d[0] = m[0] * s[0] + m[1] * s[1];
        d[1] = m[2] * s[0] + m[3] * s[1];
        d[2] = 0.0;
        d[3] = quad ? quad(s[0], s[1], tau) : cplx{};
      }
    };

    Dopri5<4> solver(cfg, horizon);
    std::sort(stops.begin(), stops.end());
    stops.push_back(horizon);
    double tau = 0.0;
    for (double target : stops) {
      while (tau < target) {
        bool switch_chart = false;
        auto observe = [&](const DenseStep<4>& st, const CState<4>& ynew) {
          RatioPath::Segment seg{st, proj, e_entry, logv, proj ? st.rc[0][0] : cplx{}};
          p.segs_.push_back(seg);
          if (proj) {
            logv += std::log(ynew[0] / seg.v_base);
            switch_chart = std::abs(ynew[1]) < kToAffine * std::abs(ynew[0]);
          } else {
            switch_chart = std::abs(ynew[0]) > kToProjective;
          }
          return !switch_chart;
        };
        tau = solver.integrate(rhs, tau, y, target, observe);
        if (switch_chart) {
          if (!proj) {
            e_entry = y[2];
            logv = 0.0;
            y = {cplx{1.0, 0.0}, y[0], cplx{}, y[3]};
          } else {
            y = {y[1] / y[0], cplx{}, e_entry + 0.5 * logv, y[3]};
          }
          proj = !proj;
          ++p.switches_;
        }
      }
    }
    counters += solver.counters();
    return p;
  }
};

RatioPath::Point RatioPath::eval(const Segment& s, double tau) const {
  const CState<4> y = s.step(tau);
  Point pt;
  pt.quadrature = y[3];
  if (!s.projective) {
    pt.z = y[0];
    pt.exponent = y[2];
    pt.psi0 = std::exp(2.0 * pt.exponent);
    pt.psi1 = pt.psi0 * pt.z;
  } else {
    pt.z = y[1] / y[0];
    pt.exponent = s.e_entry + 0.5 * (s.logv_base + std::log(y[0] / s.v_base));
    const cplx scale = std::exp(2.0 * s.e_entry);
    pt.psi0 = scale * y[0];
    pt.psi1 = scale * y[1];
  }
  return pt;
}

RatioPath::Point RatioPath::at(double tau) const {
  if (segs_.empty()) return {z0_, 1.0, z0_, 0.0, 0.0};
  tau = std::clamp(tau, 0.0, horizon_);
  auto it = std::upper_bound(segs_.begin(), segs_.end(), tau,
                             [](double x, const Segment& s) { return x < s.step.t0; });
  if (it != segs_.begin()) --it;
  return eval(*it, tau);
}

std::vector<double> RatioPath::step_times() const {
  std::vector<double> out{0.0};
  for (const auto& s : segs_) out.push_back(s.step.t1());
  if (!segs_.empty()) out.back() = horizon_;
  return out;
}

cplx riccati_rhs(const FieldSample& b, cplx z, Branch which) {
  const cplx z2 = z * z;
  if (which == Branch::zeta)
    return -0.5 * kI * b.bx * (1.0 - z2) + 0.5 * b.by * (1.0 + z2) + kI * b.bz * z;
  return 0.5 * kI * b.bx * (1.0 - z2) + 0.5 * b.by * (1.0 + z2) - kI * b.bz * z;
}

cplx riccati_rhs(const FieldSpec& f, cplx z, double t, Branch which) {
  return riccati_rhs(field_at(f, t), z, which);
}

StereoPair ClassicalTrajectory::at(double s) const {
  return {forward.at(s).z, backward.at(horizon - s).z};
}

cplx ClassicalTrajectory::zeta_end() const { return forward.end().z; }
cplx ClassicalTrajectory::eta_start() const { return backward.end().z; }

namespace {

// H(zeta, eta'') with zeta = u / v, homogeneous of degree zero in (v, u).
PathQuadrature endpoint_hamiltonian(const FieldFunction& field, cplx eta_end) {
  return [field, eta_end](cplx v, cplx u, double s) {
    const FieldSample b = field(s);
    const cplx den = v + eta_end * u;
    if (std::abs(den) < 1e-14 * (std::abs(v) + std::abs(eta_end * u)))
      throw PoleError("1 + zeta(s) eta'' vanishes along the classical path");
    return 0.5 * (b.bx * (u + eta_end * v) - kI * b.by * (u - eta_end * v) + b.bz * (v - eta_end * u)) / den;
  };
}

RatioPath forward_path(const FieldView& fv, cplx zeta0, double t, const IntegratorConfig& cfg,
                       const PathQuadrature& quad, StepCounters& counters) {
  const FieldFunction& field = fv.b;
  return RatioSolver::solve([&field](double s) { return forward_generator(field(s)); }, fv.breakpoints, zeta0,
                            t, cfg, quad, counters);
}

RatioPath backward_path(const FieldView& fv, cplx eta_end, double t, const IntegratorConfig& cfg,
                        StepCounters& counters) {
  const FieldFunction& field = fv.b;
  std::vector<double> stops;
  for (double bp : fv.breakpoints)
    if (bp < t) stops.push_back(t - bp);
  return RatioSolver::solve([&field, t](double sigma) { return backward_generator(field(t - sigma)); }, stops,
                            eta_end, t, cfg, {}, counters);
}

SemiclassicalResult endpoint_core(const FieldView& fv, const SphereAngles& from, const SphereAngles& to, double t,
                                  const IntegratorConfig& cfg) {
  SemiclassicalResult r;
  const cplx ov = overlap(to, from);
  if (t == 0.0) {
    r.value = ov;
    return r;
  }
  const cplx zeta0 = to_stereo(from).zeta;
  const cplx eta_end = to_stereo(to).eta;
  const RatioPath path = forward_path(fv, zeta0, t, cfg, endpoint_hamiltonian(fv.b, eta_end), r.counters);
  r.value = std::exp(-kI * path.end().quadrature) * ov;
  return r;
}

struct FrameRotation {
  std::array<double, 3> axis;
  double angle;
};

Su2Propagator su2_rotation(const FrameRotation& rot) {
  const double c = std::cos(0.5 * rot.angle), s = std::sin(0.5 * rot.angle);
  const auto& n = rot.axis;
  Su2Propagator u;
  u.a = cplx{c, -s * n[2]};
  u.b = cplx{-s * n[1], -s * n[0]};
  return u;
}

// SO(3) image of su2_rotation: R (B.S) R^dagger = (M B).S.
std::array<std::array<double, 3>, 3> so3_rotation(const FrameRotation& rot) {
  const double c = std::cos(rot.angle), s = std::sin(rot.angle);
  const auto& n = rot.axis;
  std::array<std::array<double, 3>, 3> m{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m[i][j] = (i == j ? c : 0.0) + (1.0 - c) * n[i] * n[j];
  m[0][1] -= s * n[2];
  m[0][2] += s * n[1];
  m[1][0] += s * n[2];
  m[1][2] -= s * n[0];
  m[2][0] -= s * n[1];
  m[2][1] += s * n[0];
  return m;
}

}  // namespace

ClassicalTrajectory solve_trajectory(const FieldSpec& f, const SphereAngles& from, const SphereAngles& to,
                                     double t, const IntegratorConfig& cfg) {
  require_horizon(t);
  cfg.validate();
  if (from.theta() >= kPi || to.theta() >= kPi)
    throw PoleError("solve_trajectory needs finite zeta' and eta'' (polar angles below pi)");
  const FieldView fv = view_of(f, t);

  ClassicalTrajectory tr;
  tr.horizon = t;
  tr.zeta_start = to_stereo(from).zeta;
  tr.eta_end = to_stereo(to).eta;
  tr.forward = forward_path(fv, tr.zeta_start, t, cfg, endpoint_hamiltonian(fv.b, tr.eta_end), tr.counters);
  tr.backward = backward_path(fv, tr.eta_end, t, cfg, tr.counters);
  tr.h_integral = tr.forward.end().quadrature;
  tr.action_integral = tr.forward.end().exponent + tr.backward.end().exponent;

  std::vector<double> times = tr.forward.step_times();
  for (double sigma : tr.backward.step_times()) times.push_back(t - sigma);
  times.push_back(0.0);
  times.push_back(t);
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  for (double s : times) {
    const StereoPair p = tr.at(s);
    tr.samples.push_back({s, p.zeta, p.eta});
  }
  return tr;
}

SemiclassicalResult propagator_endpoint_route_detailed(const FieldSpec& f, const SphereAngles& from,
                                                       const SphereAngles& to, double t,
                                                       const IntegratorConfig& cfg) {
  require_horizon(t);
  cfg.validate();
  const FieldView fv = view_of(f, t);
  if (from.theta() < kPi && to.theta() < kPi) return endpoint_core(fv, from, to, t, cfg);

  // A label sits on the south pole: solve the rotated problem instead.
  static const FrameRotation kFrames[] = {
      {{0.0, 1.0, 0.0}, kPi}, {{0.0, 1.0, 0.0}, 0.5 * kPi}, {{1.0, 0.0, 0.0}, 0.5 * kPi}};
  for (const auto& rot : kFrames) {
    const Su2Propagator r = su2_rotation(rot);
    const SpinorLabel rf = decompose_spinor(apply(r, coherent_spinor(from)));
    const SpinorLabel rt = decompose_spinor(apply(r, coherent_spinor(to)));
    if (rf.label.theta() >= kPi || rt.label.theta() >= kPi) continue;
    const auto m = so3_rotation(rot);
    FieldView rotated{[m, field = fv.b](double s) {
                        const FieldSample b = field(s);
                        return FieldSample{m[0][0] * b.bx + m[0][1] * b.by + m[0][2] * b.bz,
                                           m[1][0] * b.bx + m[1][1] * b.by + m[1][2] * b.bz,
                                           m[2][0] * b.bx + m[2][1] * b.by + m[2][2] * b.bz};
                      },
                      fv.breakpoints};
    SemiclassicalResult res = endpoint_core(rotated, rf.label, rt.label, t, cfg);
    res.value *= std::polar(1.0, rf.phase - rt.phase);
    res.rotated = true;
    return res;
  }
  throw PoleError("no frame rotation moves both labels off the south pole");
}

cplx propagator_endpoint_route(const FieldSpec& f, const SphereAngles& from, const SphereAngles& to, double t,
                               const IntegratorConfig& cfg) {
  return propagator_endpoint_route_detailed(f, from, to, t, cfg).value;
}

SemiclassicalResult propagator_action_route_detailed(const FieldSpec& f, const SphereAngles& from,
                                                     const SphereAngles& to, double t,
                                                     const IntegratorConfig& cfg) {
  require_horizon(t);
  cfg.validate();
  auto interior = [](const SphereAngles& p) { return p.theta() > 0.0 && p.theta() < kPi; };
  if (!interior(from) || !interior(to))
    throw ParameterError("action route needs both polar angles strictly inside (0, pi)");

  SemiclassicalResult r;
  const cplx ov = overlap(to, from);
  r.branch_grid_points = 1;
  if (t == 0.0) {
    r.value = ov;
    return r;
  }

  const StereoPair s1 = to_stereo(from), s2 = to_stereo(to);
  const cplx zeta1 = s1.zeta, eta1 = s1.eta, zeta2 = s2.zeta, eta2 = s2.eta;
  const double norm = std::sqrt(((1.0 + zeta1 * eta1) * (1.0 + zeta2 * eta2)).real());

  // Anchor at horizon 0: fix the fourth root so the value equals the overlap.
  const cplx r0 = 1.0 + zeta1 * eta2;
  cplx quarter = std::pow(zeta2 * eta1 / (zeta1 * eta2), 0.25);
  {
    cplx best = quarter;
    double best_err = std::abs(r0 * quarter / norm - ov);
    cplx rot = quarter;
    for (int k = 1; k < 4; ++k) {
      rot *= kI;
      const double err = std::abs(r0 * rot / norm - ov);
      if (err < best_err) {
        best_err = err;
        best = rot;
      }
    }
    quarter = best;
  }

  const FieldView fv = view_of(f, t);
  const RatioPath fwd = forward_path(fv, zeta1, t, cfg, {}, r.counters);
  IntegratorConfig grid_cfg = cfg;
  grid_cfg.rel_tol = std::max(cfg.rel_tol, 1e-9);

  // sqrt of (1 + zeta' eta(0)) (1 + zeta(tau) eta'') e^{2E} up to sign.
  auto root_candidate = [&](double tau) {
    const RatioPath::Point pf = fwd.at(tau);
    FieldView sub{fv.b, {}};
    for (double bp : fv.breakpoints)
      if (bp < tau) sub.breakpoints.push_back(bp);
    const RatioPath bwd = backward_path(sub, eta2, tau, tau == t ? cfg : grid_cfg, r.counters);
    const RatioPath::Point pb = bwd.end();
    return std::sqrt((pf.psi0 + eta2 * pf.psi1) * (pb.psi0 + zeta1 * pb.psi1));
  };

  std::vector<double> pending;
  for (int j = kInitialIntervals; j >= 1; --j) pending.push_back(t * j / kInitialIntervals);
  double tau_prev = 0.0, tau_pp = 0.0;
  cplx root_prev = r0, root_pp = r0;
  bool have_pp = false;
  while (!pending.empty()) {
    const double tau = pending.back();
    const cplx c = root_candidate(tau);
    ++r.branch_grid_points;
    // Linear extrapolation keeps the sign right where the root passes near zero.
    const cplx predicted =
        have_pp ? root_prev + (root_prev - root_pp) * ((tau - tau_prev) / (tau_prev - tau_pp)) : root_prev;
    const double dp = std::abs(c - predicted), dm = std::abs(c + predicted);
    const double ratio = std::abs(root_prev) > 0.0 ? std::abs(c) / std::abs(root_prev) : 1.0;
    // The prediction must sit close to one sign relative to |c| itself; a
    // coarse step near a small root can otherwise overshoot through zero.
    const bool ambiguous = std::min(dp, dm) > 0.25 * std::abs(c);
    if (ambiguous || ratio < 0.5 || ratio > 2.0) {
      if (r.branch_grid_points >= kMaxGridPoints || tau - tau_prev < 1e-12 * t)
        throw BranchTrackingError("branch tracking needs more than 1024 horizons");
      pending.push_back(0.5 * (tau_prev + tau));
      continue;
    }
    root_pp = root_prev;
    tau_pp = tau_prev;
    have_pp = true;
    root_prev = dp <= dm ? c : -c;
    tau_prev = tau;
    pending.pop_back();
  }
  r.value = root_prev * quarter / norm;
  return r;
}

cplx propagator_action_route(const FieldSpec& f, const SphereAngles& from, const SphereAngles& to, double t,
                             const IntegratorConfig& cfg) {
  return propagator_action_route_detailed(f, from, to, t, cfg).value;
}

JumpData jump_data(const SphereAngles& from, const SphereAngles& to, const ClassicalTrajectory& traj) {
  if (from.theta() >= kPi || to.theta() >= kPi)
    throw PoleError("overlap factors need finite stereographic coordinates");
  const cplx zeta1 = traj.zeta_start, eta2 = traj.eta_end;
  const cplx eta1 = to_stereo(from).eta, zeta2 = to_stereo(to).zeta;
  const cplx eta0 = traj.eta_start(), zeta_t = traj.zeta_end();
  if (eta1 == 0.0 || eta0 == 0.0 || zeta2 == 0.0 || zeta_t == 0.0)
    throw PoleError("overlap factors need nonzero stereographic coordinates");
  JumpData j;
  j.zeta_bar_start = zeta1;
  j.eta_bar_end = eta2;
  j.start_overlap_factor =
      std::sqrt(1.0 + zeta1 * eta0) / std::sqrt(1.0 + zeta1 * eta1) * std::exp(0.25 * (std::log(eta1) - std::log(eta0)));
  j.end_overlap_factor = std::sqrt(1.0 + zeta_t * eta2) / std::sqrt(1.0 + zeta2 * eta2) *
                         std::exp(0.25 * (std::log(zeta2) - std::log(zeta_t)));
  return j;
}

}  // namespace spinsemi
