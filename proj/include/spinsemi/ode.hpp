// Adaptive Dormand-Prince 5(4) integrator for small complex ODE systems.
//
// The stepper follows the structure of Hairer & Wanner's DOPRI5: FSAL stages,
// an RMS error norm over the real and imaginary parts, PI step-size control
// and the fourth-order continuous extension for dense output.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <string>

#include "spinsemi/errors.hpp"

namespace spinsemi {

struct IntegratorConfig {
  double rel_tol = 1e-12;
  double abs_tol = 1e-14;
  /// Largest allowed step; 0 selects 1e-2 of the integration horizon.
  double max_step = 0.0;
  long max_steps = 10'000'000;

  void validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0) || !(max_step >= 0.0) || max_steps <= 0)
      throw ParameterError("integrator tolerances and limits must be positive");
  }
};

struct StepCounters {
  long accepted = 0;
  long rejected = 0;
  long rhs_evals = 0;

  StepCounters& operator+=(const StepCounters& o) {
    accepted += o.accepted;
    rejected += o.rejected;
    rhs_evals += o.rhs_evals;
    return *this;
  }
};

template <std::size_t N>
using CState = std::array<std::complex<double>, N>;

namespace dp {
inline constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
inline constexpr double a21 = 1.0 / 5.0;
inline constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
inline constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
inline constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                        a54 = -212.0 / 729.0;
inline constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                        a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
inline constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                        a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
inline constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                        e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
inline constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                        d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                        d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;
}  // namespace dp

/// Continuous extension of one accepted step, valid on [t0, t0 + h].
template <std::size_t N>
struct DenseStep {
  double t0 = 0.0;
  double h = 0.0;
  std::array<CState<N>, 5> rc{};

  double t1() const { return t0 + h; }

  CState<N> operator()(double t) const {
    const double th = h > 0.0 ? (t - t0) / h : 0.0;
    const double th1 = 1.0 - th;
    CState<N> y;
    for (std::size_t i = 0; i < N; ++i)
      y[i] = rc[0][i] + th * (rc[1][i] + th1 * (rc[2][i] + th * (rc[3][i] + th1 * rc[4][i])));
    return y;
  }
};

namespace detail {

template <std::size_t N>
inline void axpy(CState<N>& out, const CState<N>& y, double h,
                 std::initializer_list<std::pair<double, const CState<N>*>> terms) {
  for (std::size_t i = 0; i < N; ++i) {
    std::complex<double> acc{0.0, 0.0};
    for (const auto& [c, k] : terms) acc += c * (*k)[i];
    out[i] = y[i] + h * acc;
  }
}

template <std::size_t N>
struct Stages {
  CState<N> k1, k2, k3, k4, k5, k6, k7, y1, ytmp;
};

// Stages 2..7 of one Dormand-Prince step; k1 must hold f(t, y) on entry.
template <std::size_t N, class Rhs>
void dp_stages(Rhs& f, double t, const CState<N>& y, double h, Stages<N>& s) {
  axpy<N>(s.ytmp, y, h, {{dp::a21, &s.k1}});
  f(t + dp::c2 * h, s.ytmp, s.k2);
  axpy<N>(s.ytmp, y, h, {{dp::a31, &s.k1}, {dp::a32, &s.k2}});
  f(t + dp::c3 * h, s.ytmp, s.k3);
  axpy<N>(s.ytmp, y, h, {{dp::a41, &s.k1}, {dp::a42, &s.k2}, {dp::a43, &s.k3}});
  f(t + dp::c4 * h, s.ytmp, s.k4);
  axpy<N>(s.ytmp, y, h, {{dp::a51, &s.k1}, {dp::a52, &s.k2}, {dp::a53, &s.k3}, {dp::a54, &s.k4}});
  f(t + dp::c5 * h, s.ytmp, s.k5);
  axpy<N>(s.ytmp, y, h,
          {{dp::a61, &s.k1}, {dp::a62, &s.k2}, {dp::a63, &s.k3}, {dp::a64, &s.k4}, {dp::a65, &s.k5}});
  f(t + h, s.ytmp, s.k6);
  axpy<N>(s.y1, y, h,
          {{dp::a71, &s.k1}, {dp::a73, &s.k3}, {dp::a74, &s.k4}, {dp::a75, &s.k5}, {dp::a76, &s.k6}});
  f(t + h, s.y1, s.k7);
}

}  // namespace detail

/// One fixed Dormand-Prince step of size h (no error control). h may be negative.
template <std::size_t N, class Rhs>
CState<N> dopri5_step(Rhs&& f, double t, const CState<N>& y, double h) {
  detail::Stages<N> s;
  f(t, y, s.k1);
  detail::dp_stages<N>(f, t, y, h, s);
  return s.y1;
}

template <std::size_t N>
class Dopri5 {
 public:
  using State = CState<N>;

  Dopri5(const IntegratorConfig& cfg, double horizon) : cfg_(cfg) {
    cfg_.validate();
    hmax_ = cfg_.max_step > 0.0 ? cfg_.max_step : 1e-2 * std::abs(horizon);
    if (!(hmax_ > 0.0)) hmax_ = std::numeric_limits<double>::infinity();
  }

  const StepCounters& counters() const { return counters_; }

  /// Integrates y from t0 to t1 > t0. After every accepted step the observer is
  /// called as observe(const DenseStep<N>&, const State& y_new); returning false
  /// stops the integration early. Returns the time reached.
  template <class Rhs, class Observer>
  double integrate(Rhs&& f, double t0, State& y, double t1, Observer&& observe) {
    double t = t0;
    if (!(t1 > t0)) return t;
    auto rhs = [&](double tt, const State& yy, State& dy) {
      f(tt, yy, dy);
      ++counters_.rhs_evals;
    };
    detail::Stages<N> s;
    rhs(t, y, s.k1);
    // The step estimate looks at the whole horizon, not a possibly tiny first
    // interval between breakpoints.
    const double span = std::isfinite(hmax_) ? std::max(t1 - t0, 100.0 * hmax_) : t1 - t0;
    double h = h_ > 0.0 ? std::min(h_, hmax_) : initial_step(rhs, t, y, s.k1, span);
    bool last_rejected = false;

    while (t < t1) {
      if (counters_.accepted + counters_.rejected >= cfg_.max_steps)
        throw StepLimitError("integrator exceeded " + std::to_string(cfg_.max_steps) + " steps");
      bool last = false;
      const double h_full = h;
      if (t + 1.01 * h >= t1) {
        h = t1 - t;
        last = true;
      }
      // A short final step onto t1 is legitimate (e.g. a breakpoint rounding
      // next to the horizon); only adaptive shrinkage can underflow.
      if (!last && h <= 1e-14 * std::max(1.0, std::abs(t)))
        throw NumericalError("integrator step size underflow at t = " + std::to_string(t));

      detail::dp_stages<N>(rhs, t, y, h, s);
      const double err = error_norm(y, s, h);

      const double fac11 = std::pow(err, kExpo1);
      double fac = fac11 / std::pow(facold_, kBeta);
      fac = std::clamp(fac / kSafe, 1.0 / kFacMax, 1.0 / kFacMin);
      double hnew = h / fac;

      if (err <= 1.0) {
        facold_ = std::max(err, 1e-4);
        ++counters_.accepted;
        DenseStep<N> step = dense(t, y, s, h);
        t = last ? t1 : t + h;
        y = s.y1;
        s.k1 = s.k7;
        if (last_rejected) hnew = std::min(hnew, h);
        last_rejected = false;
        h_ = std::min(last ? std::max(hnew, h_full) : hnew, hmax_);
        h = h_;
        if (!observe(step, y)) return t;
      } else {
        ++counters_.rejected;
        hnew = h / std::min(1.0 / kFacMin, fac11 / kSafe);
        last_rejected = true;
        h = hnew;
      }
    }
    return t;
  }

 private:
  static constexpr double kSafe = 0.9;
  static constexpr double kBeta = 0.04;
  static constexpr double kExpo1 = 0.2 - kBeta * 0.75;
  static constexpr double kFacMin = 0.2;  // largest growth factor is 1/kFacMin
  static constexpr double kFacMax = 10.0;

  double scaled_norm(const State& v, const State& ref) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sr = cfg_.abs_tol + cfg_.rel_tol * std::abs(ref[i].real());
      const double si = cfg_.abs_tol + cfg_.rel_tol * std::abs(ref[i].imag());
      sum += (v[i].real() / sr) * (v[i].real() / sr) + (v[i].imag() / si) * (v[i].imag() / si);
    }
    return std::sqrt(sum / (2.0 * N));
  }

  double error_norm(const State& y, const detail::Stages<N>& s, double h) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const std::complex<double> e =
          h * (dp::e1 * s.k1[i] + dp::e3 * s.k3[i] + dp::e4 * s.k4[i] + dp::e5 * s.k5[i] +
               dp::e6 * s.k6[i] + dp::e7 * s.k7[i]);
      const double sr =
          cfg_.abs_tol + cfg_.rel_tol * std::max(std::abs(y[i].real()), std::abs(s.y1[i].real()));
      const double si =
          cfg_.abs_tol + cfg_.rel_tol * std::max(std::abs(y[i].imag()), std::abs(s.y1[i].imag()));
      sum += (e.real() / sr) * (e.real() / sr) + (e.imag() / si) * (e.imag() / si);
    }
    return std::sqrt(sum / (2.0 * N));
  }

  template <class Rhs>
  double initial_step(Rhs& rhs, double t, const State& y, const State& f0, double span) {
    const double d0 = scaled_norm(y, y);
    const double d1 = scaled_norm(f0, y);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min({h0, hmax_, span});
    State y1, f1;
    for (std::size_t i = 0; i < N; ++i) y1[i] = y[i] + h0 * f0[i];
    rhs(t + h0, y1, f1);
    State df;
    for (std::size_t i = 0; i < N; ++i) df[i] = f1[i] - f0[i];
    const double d2 = scaled_norm(df, y) / h0;
    const double dmax = std::max(d1, d2);
    const double h1 = dmax <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dmax, 0.2);
    return std::min({100.0 * h0, h1, hmax_, span});
  }

  static DenseStep<N> dense(double t, const State& y, const detail::Stages<N>& s, double h) {
    DenseStep<N> d;
    d.t0 = t;
    d.h = h;
    for (std::size_t i = 0; i < N; ++i) {
      const std::complex<double> ydiff = s.y1[i] - y[i];
      const std::complex<double> bspl = h * s.k1[i] - ydiff;
      d.rc[0][i] = y[i];
      d.rc[1][i] = ydiff;
      d.rc[2][i] = bspl;
      d.rc[3][i] = ydiff - h * s.k7[i] - bspl;
      d.rc[4][i] = h * (dp::d1 * s.k1[i] + dp::d3 * s.k3[i] + dp::d4 * s.k4[i] +
                        dp::d5 * s.k5[i] + dp::d6 * s.k6[i] + dp::d7 * s.k7[i]);
    }
    return d;
  }

  IntegratorConfig cfg_;
  double hmax_ = 0.0;
  double h_ = 0.0;
  double facold_ = 1e-4;
  StepCounters counters_;
};

}  // namespace spinsemi
