// Closed-form benchmark propagators: constant field and the Landau-Zener sweep
// (through Kummer's confluent hypergeometric function).

#pragma once

#include "spinsemi/exact.hpp"
#include "spinsemi/sphere.hpp"

namespace spinsemi {

struct KummerParams {
  cplx alpha;
  cplx beta;
  cplx z;
};

/// Phi(alpha, beta, z) = sum_n (alpha)_n / (beta)_n z^n / n!, summed in
/// double-double arithmetic. Intended for |z| <= 50.
cplx kummer_phi(const KummerParams& p);

/// U(t) for B = (delta, 0, eps).
Su2Propagator constant_field_ab(double delta, double eps, double t);

/// Classical stereographic paths for B = (delta, 0, eps) with zeta(0) = zeta0
/// and eta(t) = eta_t, evaluated at time s.
StereoPair constant_field_paths(double delta, double eps, cplx zeta0, cplx eta_t, double t, double s);

struct LzBasis {
  cplx A, B, C, D;
};

/// Throws ParameterError when gamma^2 s^2 / 2 > 50.
LzBasis lz_basis(double omega, double gamma, double s);

/// U(t) for B = (omega, 0, -gamma^2 t).
Su2Propagator lz_ab(double omega, double gamma, double t);

}  // namespace spinsemi
