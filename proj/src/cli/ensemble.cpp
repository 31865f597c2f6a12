#include "cli/ensemble.hpp"

#include <cmath>

#include "spinsemi/errors.hpp"
#include "spinsemi/exact.hpp"
#include "spinsemi/semiclassical.hpp"

namespace spinsemi::cli {

namespace {

double uniform(std::mt19937_64& rng, double lo, double hi) { return lo + (hi - lo) * unit_uniform(rng); }

// Uniform in the ball |B| <= kFieldBound by rejection from the cube.
FieldSample ball_sample(std::mt19937_64& rng) {
  for (;;) {
    FieldSample b{uniform(rng, -kFieldBound, kFieldBound), uniform(rng, -kFieldBound, kFieldBound),
                  uniform(rng, -kFieldBound, kFieldBound)};
    if (b.norm() <= kFieldBound) return b;
  }
}

std::vector<FourierTerm> harmonics(std::mt19937_64& rng) {
  std::vector<FourierTerm> terms(3);
  for (auto& k : terms) {
    k.omega = uniform(rng, 0.5, 3.0);
    k.cos_amp = uniform(rng, -2.0, 2.0);
    k.sin_amp = uniform(rng, -2.0, 2.0);
  }
  return terms;
}

SphereAngles endpoint(std::mt19937_64& rng) {
  const double theta = uniform(rng, 0.1 * kPi, 0.9 * kPi);
  const double phi = kPi - 2.0 * kPi * unit_uniform(rng);  // (-pi, pi]
  return {theta, phi};
}

}  // namespace

double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

Family parse_family(const std::string& name) {
  if (name == "const") return Family::constant;
  if (name == "fourier") return Family::fourier;
  if (name == "table-random") return Family::table_random;
  if (name == "lz") return Family::lz;
  throw ParseError("unknown field family '" + name + "' (const, fourier, table-random, lz)");
}

std::string family_name(Family f) {
  switch (f) {
    case Family::constant:
      return "const";
    case Family::fourier:
      return "fourier";
    case Family::table_random:
      return "table-random";
    case Family::lz:
      return "lz";
  }
  return "?";
}

double max_field_norm(const FieldSpec& f, double t, int grid) {
  double m = 0.0;
  for (int i = 0; i < grid; ++i) m = std::max(m, field_at(f, t * i / (grid - 1)).norm());
  return m;
}

EnsembleCase sample_case(Family family, std::mt19937_64& rng) {
  EnsembleCase c;
  c.t = kMaxHorizon * (1.0 - unit_uniform(rng));  // (0, 5]
  switch (family) {
    case Family::constant: {
      const FieldSample b = ball_sample(rng);
      c.field = ConstantField{b.bx, b.by, b.bz};
      break;
    }
    case Family::fourier: {
      FourierField f{harmonics(rng), harmonics(rng), harmonics(rng)};
      const double peak = max_field_norm(f, c.t);
      if (peak > kFieldBound) {
        const double scale = 0.99 * kFieldBound / peak;
        for (auto* comp : {&f.x, &f.y, &f.z})
          for (auto& k : *comp) {
            k.cos_amp *= scale;
            k.sin_amp *= scale;
          }
      }
      c.field = std::move(f);
      break;
    }
    case Family::table_random: {
      const int knots = std::max(2, static_cast<int>(std::ceil(c.t / 0.25 - 1e-12)) + 1);
      TabulatedField tab;
      for (int i = 0; i < knots; ++i)
        tab.knots.push_back({i == knots - 1 ? c.t : c.t * i / (knots - 1), ball_sample(rng)});
      c.field = std::move(tab);
      break;
    }
    case Family::lz: {
      const double omega = uniform(rng, 0.2, 3.0);
      const double gamma = uniform(rng, 0.2, 2.0);
      c.field = LandauZenerField{omega, gamma, -c.t * unit_uniform(rng)};
      break;
    }
  }
  c.from = endpoint(rng);
  c.to = endpoint(rng);
  return c;
}

std::vector<EnsembleCase> make_ensemble(Family family, int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<EnsembleCase> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) out.push_back(sample_case(family, rng));
  return out;
}

CaseOutcome evaluate_case(const EnsembleCase& c, const IntegratorConfig& cfg) {
  CaseOutcome o;
  try {
    const ExactResult ex = integrate_ab_detailed(c.field, c.t, cfg);
    const SemiclassicalResult sc = propagator_endpoint_route_detailed(c.field, c.from, c.to, c.t, cfg);
    o.exact = matrix_element(ex.u, c.to, c.from);
    o.semiclassical = sc.value;
    o.error = std::abs(o.exact - o.semiclassical);
    o.unitarity_defect = ex.u.unitarity_defect();
    o.steps = ex.counters.accepted + sc.counters.accepted;
  } catch (const Error& e) {
    o.failed = true;
    o.failure = e.what();
  }
  return o;
}

}  // namespace spinsemi::cli
