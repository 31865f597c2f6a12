// Time-dependent magnetic field models B(t) and the classical spin
// Hamiltonian H = <Omega|B.S|Omega> in angle and stereographic coordinates.

#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "spinsemi/sphere.hpp"

namespace spinsemi {

struct FieldSample {
  double bx = 0.0;
  double by = 0.0;
  double bz = 0.0;

  double norm() const;
};

struct ConstantField {
  double bx = 0.0, by = 0.0, bz = 0.0;
};

/// B(t) = (omega, 0, -gamma^2 (t + t_offset)).
struct LandauZenerField {
  double omega = 0.0;
  double gamma = 0.0;
  double t_offset = 0.0;
};

struct TableKnot {
  double t = 0.0;
  FieldSample b;
};

/// Piecewise-linear interpolation between strictly increasing knots.
struct TabulatedField {
  std::vector<TableKnot> knots;
};

struct FourierTerm {
  double omega = 0.0;
  double cos_amp = 0.0;
  double sin_amp = 0.0;
};

/// Each component is sum_k cos_amp cos(omega t) + sin_amp sin(omega t).
struct FourierField {
  std::vector<FourierTerm> x, y, z;
};

class FieldSpec {
 public:
  using Variant = std::variant<ConstantField, LandauZenerField, TabulatedField, FourierField>;

  FieldSpec() = default;
  FieldSpec(ConstantField f);
  FieldSpec(LandauZenerField f);
  FieldSpec(TabulatedField f);  // throws ParameterError on bad tables
  FieldSpec(FourierField f);

  const Variant& variant() const { return v_; }

  /// Times in (t0, t1) where B(t) is not smooth (table knots).
  std::vector<double> breakpoints(double t0, double t1) const;

  /// Canonical textual form, e.g. "const:1,0,2" or "table:<n knots>".
  std::string describe() const;

 private:
  Variant v_;
};

FieldSample field_at(const FieldSpec& f, double t);

using FieldFunction = std::function<FieldSample(double)>;

FieldFunction field_function(const FieldSpec& f);

/// Parses the field mini-language: const:bx,by,bz | lz:omega,gamma[,t_offset] |
/// table:<csv path> | fourier:<csv path>.
FieldSpec parse_field_spec(std::string_view text);

/// CSV with header t,bx,by,bz.
TabulatedField read_table_csv(const std::string& path);
/// CSV with header component,omega,cos_amp,sin_amp.
FourierField read_fourier_csv(const std::string& path);

/// Strict decimal parse of a whole token; throws ParseError.
double parse_real(std::string_view token);

double hamiltonian_angles(const FieldSample& b, const SphereAngles& p);
double hamiltonian_angles(const FieldSpec& f, const SphereAngles& p, double t);

/// Throws PoleError when |1 + zeta eta| < 1e-14 (1 + |zeta eta|).
cplx hamiltonian_stereo(const FieldSample& b, const StereoPair& p);
cplx hamiltonian_stereo(const FieldSpec& f, const StereoPair& p, double t);

}  // namespace spinsemi
