#pragma once

#include <numbers>

namespace qcs {

inline constexpr double pi = std::numbers::pi;
inline constexpr double euler_gamma = std::numbers::egamma;

} // namespace qcs
