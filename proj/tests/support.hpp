#pragma once

#include <cmath>
#include <complex>
#include <random>

#include "spinsemi/field.hpp"
#include "spinsemi/sphere.hpp"

namespace testing {

using spinsemi::cplx;
using Rng = std::mt19937_64;

inline double uni(Rng& r, double lo, double hi) {
  return lo + (hi - lo) * (static_cast<double>(r() >> 11) * 0x1.0p-53);
}

inline spinsemi::SphereAngles angles(Rng& r, double lo = 0.1 * spinsemi::kPi, double hi = 0.9 * spinsemi::kPi) {
  return {uni(r, lo, hi), uni(r, -spinsemi::kPi, spinsemi::kPi)};
}

inline spinsemi::ConstantField const_field(Rng& r, double bound = 5.0) {
  for (;;) {
    spinsemi::ConstantField f{uni(r, -bound, bound), uni(r, -bound, bound), uni(r, -bound, bound)};
    if (std::hypot(f.bx, f.by, f.bz) <= bound) return f;
  }
}

inline spinsemi::FourierField fourier_field(Rng& r) {
  auto comp = [&r] {
    std::vector<spinsemi::FourierTerm> v;
    for (int k = 0; k < 2; ++k) v.push_back({uni(r, 0.5, 3.0), uni(r, -1.0, 1.0), uni(r, -1.0, 1.0)});
    return v;
  };
  return {comp(), comp(), comp()};
}

inline double wrap(double x) { return std::remainder(x, 2.0 * spinsemi::kPi); }

}  // namespace testing
