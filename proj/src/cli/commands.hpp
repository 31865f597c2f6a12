#pragma once

#include <ostream>
#include <string>

#include "spinsemi/ode.hpp"
#include "spinsemi/sphere.hpp"

namespace spinsemi::cli {

/// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFailed = 1;
inline constexpr int kExitInput = 2;
inline constexpr int kExitNumerical = 3;

/// "theta,phi" in radians.
SphereAngles parse_angles(const std::string& text);

/// Defaults with rel_tol taken from SPINSEMI_TOL when set.
IntegratorConfig default_config();

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace spinsemi::cli
