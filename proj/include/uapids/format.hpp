#pragma once

#include <optional>
#include <string>

namespace uapids {

// Shortest round-trip decimal form; identical on every run and thread count.
std::string format_double(double v);

// Empty string for an undefined value.
std::string format_optional(const std::optional<double>& v);

}  // namespace uapids
