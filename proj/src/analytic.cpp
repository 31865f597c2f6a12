#include "spinsemi/analytic.hpp"

#include <cmath>

#include "spinsemi/errors.hpp"

namespace spinsemi {

namespace {

const cplx kI{0.0, 1.0};

// Double-double numbers (unevaluated sums hi + lo) after Dekker / Bailey.
struct DD {
  double hi = 0.0;
  double lo = 0.0;
};

inline DD quick_two_sum(double a, double b) {
  const double s = a + b;
  return {s, b - (s - a)};
}

inline DD two_sum(double a, double b) {
  const double s = a + b;
  const double bb = s - a;
  return {s, (a - (s - bb)) + (b - bb)};
}

inline DD two_prod(double a, double b) {
  const double p = a * b;
  return {p, std::fma(a, b, -p)};
}

inline DD operator+(DD a, DD b) {
  DD s = two_sum(a.hi, b.hi);
  const DD t = two_sum(a.lo, b.lo);
  s.lo += t.hi;
  s = quick_two_sum(s.hi, s.lo);
  s.lo += t.lo;
  return quick_two_sum(s.hi, s.lo);
}

inline DD operator-(DD a) { return {-a.hi, -a.lo}; }
inline DD operator-(DD a, DD b) { return a + (-b); }

inline DD operator*(DD a, DD b) {
  DD p = two_prod(a.hi, b.hi);
  p.lo += a.hi * b.lo + a.lo * b.hi;
  return quick_two_sum(p.hi, p.lo);
}

inline DD operator*(DD a, double b) {
  DD p = two_prod(a.hi, b);
  p.lo += a.lo * b;
  return quick_two_sum(p.hi, p.lo);
}

inline DD operator/(DD a, DD b) {
  const double q1 = a.hi / b.hi;
  DD r = a - b * q1;
  const double q2 = r.hi / b.hi;
  r = r - b * q2;
  const double q3 = r.hi / b.hi;
  return quick_two_sum(q1, q2) + DD{q3, 0.0};
}

struct CDD {
  DD re, im;
};

inline CDD operator+(const CDD& a, const CDD& b) { return {a.re + b.re, a.im + b.im}; }

inline CDD operator*(const CDD& a, const CDD& b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}

inline CDD operator/(const CDD& a, const CDD& b) {
  const DD den = b.re * b.re + b.im * b.im;
  const CDD num = a * CDD{b.re, -b.im};
  return {num.re / den, num.im / den};
}

inline CDD lift(cplx z) { return {{z.real(), 0.0}, {z.imag(), 0.0}}; }

// x + n with n a small integer, exact in double-double.
inline CDD shift(const cplx& x, double n) { return {two_sum(x.real(), n), {x.imag(), 0.0}}; }

bool nonpositive_integer(const cplx& b) {
  return b.imag() == 0.0 && b.real() <= 0.0 && b.real() == std::floor(b.real());
}

constexpr int kMaxTerms = 10000;

}  // namespace

cplx kummer_phi(const KummerParams& p) {
  if (!std::isfinite(p.alpha.real()) || !std::isfinite(p.alpha.imag()) || !std::isfinite(p.beta.real()) ||
      !std::isfinite(p.beta.imag()) || !std::isfinite(p.z.real()) || !std::isfinite(p.z.imag()))
    throw ParameterError("Kummer parameters must be finite");
  if (nonpositive_integer(p.beta)) throw ParameterError("Kummer beta must not be a nonpositive integer");

  const CDD z = lift(p.z);
  const double peak = std::abs(p.z) + std::abs(p.alpha);
  CDD term{{1.0, 0.0}, {0.0, 0.0}};
  CDD sum = term;
  for (int n = 0; n < kMaxTerms; ++n) {
    const CDD num = shift(p.alpha, n) * z;
    const CDD den = shift(p.beta, n) * CDD{{n + 1.0, 0.0}, {0.0, 0.0}};
    term = (term * num) / den;
    sum = sum + term;
    const double tmag = std::hypot(term.re.hi, term.im.hi);
    if (tmag == 0.0) return {sum.re.hi + sum.re.lo, sum.im.hi + sum.im.lo};
    const double smag = std::hypot(sum.re.hi, sum.im.hi);
    if (n + 1 > peak && tmag <= 1e-16 * smag) return {sum.re.hi + sum.re.lo, sum.im.hi + sum.im.lo};
  }
  throw ConvergenceError("Kummer series did not converge within 10000 terms");
}

Su2Propagator constant_field_ab(double delta, double eps, double t) {
  const double omega = std::hypot(delta, eps);
  const double half = 0.5 * omega * t;
  // S = sin(omega t / 2) / omega with the omega -> 0 limit t / 2.
  const double S = std::abs(half) < 1e-8 ? 0.5 * t * (1.0 - half * half / 6.0) : std::sin(half) / omega;
  Su2Propagator u;
  u.a = cplx{std::cos(half), -eps * S};
  u.b = cplx{0.0, -delta * S};
  u.t = t;
  return u;
}

StereoPair constant_field_paths(double delta, double eps, cplx zeta0, cplx eta_t, double t, double s) {
  const double omega = std::hypot(delta, eps);
  // Moebius form of the tan/arctan solution; finite through delta = 0.
  auto evolve = [&](cplx z0, double dt) {
    const double half = 0.5 * omega * dt;
    const double S = std::abs(half) < 1e-8 ? 0.5 * dt * (1.0 - half * half / 6.0) : std::sin(half) / omega;
    const double c = std::cos(half);
    const cplx num = z0 * c + kI * (eps * z0 - delta) * S;
    const cplx den = c - kI * (delta * z0 + eps) * S;
    if (std::abs(den) <= 1e-14 * (std::abs(num) + std::abs(den)))
      throw PoleError("constant-field path passes through infinity");
    return num / den;
  };
  return {evolve(zeta0, s), evolve(eta_t, t - s)};
}

LzBasis lz_basis(double omega, double gamma, double s) {
  if (!std::isfinite(omega) || !std::isfinite(gamma) || !std::isfinite(s))
    throw ParameterError("Landau-Zener parameters must be finite");
  const double g2 = gamma * gamma;
  if (0.5 * g2 * s * s > 50.0) throw ParameterError("gamma^2 s^2 / 2 exceeds the supported range 50");
  if (g2 == 0.0) {
    const double c = std::cos(0.5 * omega * s), sn = std::sin(0.5 * omega * s);
    return {c, -kI * sn, -kI * sn, c};
  }
  const cplx alpha = -kI * (omega * omega / (8.0 * g2));
  const cplx z = -0.5 * kI * g2 * s * s;
  const cplx pre = -0.5 * kI * omega * s;
  LzBasis r;
  r.A = kummer_phi({alpha, 0.5, z});
  r.B = pre * kummer_phi({alpha + 0.5, 1.5, z});
  r.C = pre * kummer_phi({alpha + 1.0, 1.5, z});
  r.D = kummer_phi({alpha + 0.5, 0.5, z});
  return r;
}

Su2Propagator lz_ab(double omega, double gamma, double t) {
  if (gamma == 0.0) return constant_field_ab(omega, 0.0, t);
  const LzBasis basis = lz_basis(omega, gamma, t);
  const cplx phase = std::polar(1.0, 0.25 * gamma * gamma * t * t);
  Su2Propagator u;
  u.a = phase * basis.A;
  u.b = phase * basis.B;
  u.t = t;
  return u;
}

}  // namespace spinsemi
