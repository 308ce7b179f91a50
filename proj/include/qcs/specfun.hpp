#pragma once

/**
 * @brief Modified Bessel functions of the second kind K_m(x) for integer
 * order and real positive argument.
 *
 * K_0 and K_1 come from the ascending series for x <= 2 and from Temme's
 * continued fraction (the Steed form of CF2) for x > 2; the latter yields
 * e^x K directly, so the scaled functions never overflow. Higher orders are
 * obtained by forward recurrence K_{m+1} = K_{m-1} + (2m/x) K_m, which is
 * stable for K.
 */

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>

#include "qcs/constants.hpp"
#include "qcs/errors.hpp"

namespace qcs {
namespace detail {

inline constexpr double bessel_series_split = 2.0;

/// Unscaled (K_0, K_1) from the ascending series, valid for 0 < x <= 2.
inline std::pair<double, double> bessel_k01_series(double x)
{
    const double y = 0.25 * x * x;
    const double log_half = std::log(0.5 * x);

    // K_0: -(ln(x/2) + gamma) I_0 + sum_{k>=1} H_k y^k / (k!)^2
    // K_1: 1/x + ln(x/2) I_1 - (x/4) sum_{k>=0} (psi(k+1) + psi(k+2)) y^k / (k!(k+1)!)
    double term0 = 1.0;  // y^k / (k!)^2
    double term1 = 1.0;  // y^k / (k! (k+1)!)
    double i0 = 1.0;
    double i1_sum = 1.0;
    double harmonic = 0.0;
    double k0_tail = 0.0;
    double psi_k1 = -euler_gamma;       // psi(k+1)
    double psi_k2 = 1.0 - euler_gamma;  // psi(k+2)
    double k1_tail = psi_k1 + psi_k2;

    constexpr double eps = 1e-17;
    for (int k = 1; k < 60; ++k) {
        const double dk = k;
        term0 *= y / (dk * dk);
        term1 *= y / (dk * (dk + 1.0));
        harmonic += 1.0 / dk;
        psi_k1 += 1.0 / dk;
        psi_k2 += 1.0 / (dk + 1.0);

        i0 += term0;
        i1_sum += term1;
        k0_tail += harmonic * term0;
        k1_tail += (psi_k1 + psi_k2) * term1;
        if (term0 < eps * i0 && term1 < eps * i1_sum) {
            break;
        }
    }
    const double i1 = 0.5 * x * i1_sum;
    const double k0 = -(log_half + euler_gamma) * i0 + k0_tail;
    const double k1 = 1.0 / x + log_half * i1 - 0.25 * x * k1_tail;
    return {k0, k1};
}

/// Scaled (e^x K_0, e^x K_1) by Temme's continued fraction, valid for x >= 2.
inline std::pair<double, double> bessel_k01_scaled_cf(double x)
{
    constexpr double eps = 1e-16;
    constexpr int max_iter = 100000;

    double b = 2.0 * (1.0 + x);
    double d = 1.0 / b;
    double h = d;
    double delh = d;
    double q1 = 0.0;
    double q2 = 1.0;
    const double a1 = 0.25;
    double q = a1;
    double c = a1;
    double a = -a1;
    double s = 1.0 + q * delh;
    for (int i = 1; i < max_iter; ++i) {
        a -= 2.0 * i;
        c = -a * c / (i + 1.0);
        const double qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        const double dels = q * delh;
        s += dels;
        if (std::abs(dels / s) < eps) {
            break;
        }
    }
    h *= a1;
    const double k0 = std::sqrt(pi / (2.0 * x)) / s;
    const double k1 = k0 * (x + 0.5 - h) / x;
    return {k0, k1};
}

inline std::pair<double, double> bessel_k01(double x, bool scaled)
{
    if (x <= bessel_series_split) {
        auto [k0, k1] = bessel_k01_series(x);
        if (scaled) {
            const double e = std::exp(x);
            k0 *= e;
            k1 *= e;
        }
        return {k0, k1};
    }
    auto [k0, k1] = bessel_k01_scaled_cf(x);
    if (!scaled) {
        const double e = std::exp(-x);
        k0 *= e;
        k1 *= e;
    }
    return {k0, k1};
}

template <std::size_t N>
std::array<double, N> bessel_k_table(double x, bool scaled)
{
    static_assert(N >= 1);
    require_domain(x > 0.0, "bessel_k: argument must be positive");
    std::array<double, N> out{};
    const auto [k0, k1] = bessel_k01(x, scaled);
    out[0] = k0;
    if constexpr (N > 1) {
        out[1] = k1;
        for (std::size_t m = 1; m + 1 < N; ++m) {
            out[m + 1] = out[m - 1] + (2.0 * static_cast<double>(m) / x) * out[m];
        }
    }
    return out;
}

inline double bessel_k_impl(int order, double x, bool scaled)
{
    require_domain(order >= 0, "bessel_k: order must be non-negative");
    require_domain(x > 0.0, "bessel_k: argument must be positive");
    const auto [k0, k1] = bessel_k01(x, scaled);
    if (order == 0) {
        return k0;
    }
    double prev = k0;
    double cur = k1;
    for (int m = 1; m < order; ++m) {
        const double next = prev + (2.0 * m / x) * cur;
        prev = cur;
        cur = next;
    }
    return cur;
}

} // namespace detail

/// K_order(x) for x > 0. Underflows gracefully to zero for very large x.
inline double bessel_k(int order, double x)
{
    return detail::bessel_k_impl(order, x, false);
}

/// e^x K_order(x) for x > 0; finite for arbitrarily large x.
inline double bessel_k_scaled(int order, double x)
{
    return detail::bessel_k_impl(order, x, true);
}

/// K_0 .. K_{N-1} at a single argument, sharing one K_0/K_1 evaluation.
template <std::size_t N>
std::array<double, N> bessel_k_orders(double x)
{
    return detail::bessel_k_table<N>(x, false);
}

template <std::size_t N>
std::array<double, N> bessel_k_orders_scaled(double x)
{
    return detail::bessel_k_table<N>(x, true);
}

} // namespace qcs
