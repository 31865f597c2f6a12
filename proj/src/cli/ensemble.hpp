// Randomized verification ensembles: field, horizon and endpoint sampling.

#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "spinsemi/field.hpp"
#include "spinsemi/ode.hpp"

namespace spinsemi::cli {

enum class Family { constant, fourier, table_random, lz };

Family parse_family(const std::string& name);
std::string family_name(Family f);

inline constexpr double kFieldBound = 5.0;
inline constexpr double kMaxHorizon = 5.0;

struct EnsembleCase {
  FieldSpec field;
  double t = 0.0;
  SphereAngles from;
  SphereAngles to;
};

/// Uniform in [0, 1) from the top 53 bits; platform independent unlike
/// std::uniform_real_distribution.
double unit_uniform(std::mt19937_64& rng);

EnsembleCase sample_case(Family family, std::mt19937_64& rng);
std::vector<EnsembleCase> make_ensemble(Family family, int n, std::uint64_t seed);

/// Largest |B(s)| over a uniform grid of [0, t].
double max_field_norm(const FieldSpec& f, double t, int grid = 2001);

struct CaseOutcome {
  cplx exact;
  cplx semiclassical;
  double error = 0.0;
  double unitarity_defect = 0.0;
  long steps = 0;
  bool failed = false;
  std::string failure;
};

/// Endpoint-route value against the exact matrix element for one case.
CaseOutcome evaluate_case(const EnsembleCase& c, const IntegratorConfig& cfg);

/// Runs fn(i) for i in [0, n) on up to `threads` workers; results stay indexed.
template <class Fn>
void parallel_for(int n, int threads, Fn&& fn) {
  threads = std::max(1, std::min(threads, n));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  for (int w = 0; w < threads; ++w)
    pool.emplace_back([&, w] {
      for (int i = w; i < n; i += threads) fn(i);
    });
  for (auto& th : pool) th.join();
}

}  // namespace spinsemi::cli
