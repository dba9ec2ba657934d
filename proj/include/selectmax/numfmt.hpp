#pragma once

#include <string>

namespace selectmax {

/// Shortest decimal string that parses back to the identical double
/// ("inf"/"-inf"/"nan" for non-finite values).
std::string format_double(double v);

}  // namespace selectmax
