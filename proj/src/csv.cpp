#include "aocsi/csv.hpp"

#include <charconv>

namespace aocsi {

std::string format_double(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

} // namespace aocsi
