#pragma once

#include <string>

namespace pinning {

// Shortest decimal form that parses back to the same double.
std::string format_double(double x);

}  // namespace pinning
