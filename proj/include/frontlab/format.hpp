#pragma once

#include <string>

namespace frontlab {

/// Shortest text that reads back to the same double.
std::string fmt_double(double x);
std::string fmt_int(long long x);

}  // namespace frontlab
