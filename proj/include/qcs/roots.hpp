#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "qcs/errors.hpp"

namespace qcs {

struct Bracket {
    double lo;
    double hi;
};

struct BisectResult {
    double root;
    double f_root;
    int iterations;
    bool converged;
};

/**
 * @brief Bisection on [lo, hi] where f(lo) and f(hi) have opposite signs.
 *
 * Stops once hi - lo <= abs_tol + rel_tol * |mid|. When both ends are
 * positive the interval is halved geometrically, which keeps the relative
 * resolution uniform over many decades.
 */
template <class F>
BisectResult bisect(F&& f, double lo, double hi, double rel_tol, double abs_tol = 0.0,
                    int max_iter = 400)
{
    double f_lo = f(lo);
    double f_hi = f(hi);
    if (f_lo == 0.0) {
        return {lo, 0.0, 0, true};
    }
    if (f_hi == 0.0) {
        return {hi, 0.0, 0, true};
    }
    if (std::signbit(f_lo) == std::signbit(f_hi)) {
        throw NoRootError("bisect: interval does not bracket a sign change");
    }
    const bool geometric = lo > 0.0 && hi > 0.0;
    int it = 0;
    for (; it < max_iter; ++it) {
        const double mid = geometric ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
        if (hi - lo <= abs_tol + rel_tol * std::abs(mid) || mid <= lo || mid >= hi) {
            break;
        }
        const double f_mid = f(mid);
        if (f_mid == 0.0) {
            return {mid, 0.0, it + 1, true};
        }
        if (std::signbit(f_mid) == std::signbit(f_lo)) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
            f_hi = f_mid;
        }
    }
    // Report the end with the smaller residual.
    const bool take_lo = std::abs(f_lo) <= std::abs(f_hi);
    const double mid = take_lo ? lo : hi;
    return {mid, take_lo ? f_lo : f_hi, it, it < max_iter};
}

/// Logarithmically spaced points lo .. hi inclusive.
inline std::vector<double> log_grid(double lo, double hi, std::size_t points)
{
    detail::require_domain(lo > 0.0 && hi > lo && points >= 2, "log_grid: need 0 < lo < hi, points >= 2");
    std::vector<double> out(points);
    const double llo = std::log(lo);
    const double step = (std::log(hi) - llo) / static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i) {
        out[i] = std::exp(llo + step * static_cast<double>(i));
    }
    out.front() = lo;
    out.back() = hi;
    return out;
}

/**
 * @brief Brackets of sign changes of f sampled on the given increasing grid.
 *
 * Non-finite samples are skipped; a bracket then spans from the last finite
 * sample to the next one.
 */
template <class F>
std::vector<Bracket> scan_sign_changes(F&& f, const std::vector<double>& grid)
{
    std::vector<Bracket> out;
    std::optional<std::pair<double, double>> last;
    for (double x : grid) {
        const double fx = f(x);
        if (!std::isfinite(fx)) {
            continue;
        }
        if (last && std::signbit(fx) != std::signbit(last->second)) {
            out.push_back({last->first, x});
        }
        last = {x, fx};
    }
    return out;
}

} // namespace qcs
