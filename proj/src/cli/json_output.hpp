#pragma once

#include <string>

#include "json.hpp"

namespace spinsemi::cli {

using Json = nlohmann::ordered_json;

/// %.17g; non-finite values have no JSON spelling and are written as null.
std::string format_real(double x);

/// Two-space indented JSON with every floating-point number at 17 significant
/// digits. Key order is insertion order.
std::string render_json(const Json& j);

}  // namespace spinsemi::cli
