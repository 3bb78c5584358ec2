#pragma once

#include <string>

namespace aocsi {

/// Shortest decimal representation that parses back to the identical
/// double (std::to_chars round-trip form).
std::string format_double(double value);

} // namespace aocsi
