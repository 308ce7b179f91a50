#pragma once

/**
 * @brief Two-dimensional heavy-light effective-range scattering.
 *
 * Units: hbar = mu = r1 = 1. Lengths in r1, the p-wave parameter a1 in r1^2,
 * energies in hbar^2 / (mu r1^2). On the imaginary momentum axis k = i kappa
 * the combination cot(delta_m) - i is real: the i pi/2 from ln(i kappa) cancels
 * the -i exactly, so only the real remainder is ever computed.
 */

#include <cmath>
#include <limits>
#include <string>

#include "qcs/constants.hpp"
#include "qcs/errors.hpp"
#include "qcs/roots.hpp"

namespace qcs {

/// Smallest r0 compatible with the bound r1 <= (1/2) e^gamma r0 at r1 = 1.
inline const double min_potential_range = 2.0 * std::exp(-euler_gamma);

struct ModelParams {
    double alpha = 0.1;    ///< light / heavy mass ratio m/M
    double beta = 6.0;     ///< M/mu = (1 + 2 alpha) / (2 alpha)
    double inv_a1 = 0.0;   ///< 1/a1; exactly 0 on resonance
    double a0 = 1.0;       ///< s-wave scattering length
    double r0 = 2.0;       ///< potential range
    double theta0 = 0.0;   ///< short-range WKB phase

    static double beta_from_alpha(double alpha) { return (1.0 + 2.0 * alpha) / (2.0 * alpha); }
    static double alpha_from_beta(double beta) { return 1.0 / (2.0 * beta - 2.0); }

    /// Parameters with alpha and beta consistent to machine precision.
    static ModelParams from_alpha(double alpha, double inv_a1 = 0.0, double a0 = 1.0, double r0 = 2.0,
                                  double theta0 = 0.0)
    {
        ModelParams p;
        p.alpha = alpha;
        p.beta = beta_from_alpha(alpha);
        p.inv_a1 = inv_a1;
        p.a0 = a0;
        p.r0 = r0;
        p.theta0 = theta0;
        p.validate();
        return p;
    }

    /// Parameters specified through beta = M/mu (requires beta > 1).
    static ModelParams from_beta(double beta, double inv_a1 = 0.0, double a0 = 1.0, double r0 = 2.0,
                                 double theta0 = 0.0)
    {
        detail::require_domain(beta > 1.0, "ModelParams: beta = M/mu must exceed 1 for a positive light mass");
        ModelParams p = from_alpha(alpha_from_beta(beta), inv_a1, a0, r0, theta0);
        p.beta = beta;
        return p;
    }

    bool on_resonance() const { return inv_a1 == 0.0; }
    double a1() const { return on_resonance() ? std::numeric_limits<double>::infinity() : 1.0 / inv_a1; }

    void validate() const
    {
        using detail::require_domain;
        require_domain(std::isfinite(alpha) && alpha > 0.0, "ModelParams: alpha must be positive");
        require_domain(std::isfinite(beta) && beta > 0.5, "ModelParams: beta must exceed 1/2");
        require_domain(std::abs(beta - beta_from_alpha(alpha)) <= 1e-12 * beta,
                       "ModelParams: beta inconsistent with alpha");
        require_domain(std::isfinite(inv_a1) && inv_a1 >= 0.0, "ModelParams: 1/a1 must be non-negative");
        require_domain(std::isfinite(a0) && a0 > 0.0, "ModelParams: a0 must be positive");
        require_domain(std::isfinite(r0) && r0 >= min_potential_range * (1.0 - 1e-12),
                       "ModelParams: r0 violates r1 <= (1/2) e^gamma r0");
        require_domain(std::isfinite(theta0) && std::abs(theta0) <= pi, "ModelParams: theta0 outside [-pi, pi]");
    }
};

struct PWaveBoundState {
    double kappa1;
    double epsilon1;
};

/// cot(delta_0(i kappa)) - i = (2/pi) [gamma + ln(kappa a0 / 2)].
inline double inv_t0(double kappa, const ModelParams& p)
{
    detail::require_domain(kappa > 0.0, "inv_t0: kappa must be positive");
    return (2.0 / pi) * (euler_gamma + std::log(0.5 * kappa * p.a0));
}

/// cot(delta_1(i kappa)) - i = (2/pi) [1/(a1 kappa^2) + ln kappa].
inline double inv_t1(double kappa, const ModelParams& p)
{
    detail::require_domain(kappa > 0.0, "inv_t1: kappa must be positive");
    return (2.0 / pi) * (p.inv_a1 / (kappa * kappa) + std::log(kappa));
}

/// Inverse T-matrix for channel m in {0, +-1}.
inline double inv_t(int m, double kappa, const ModelParams& p)
{
    if (m == 0) {
        return inv_t0(kappa, p);
    }
    detail::require_domain(m == 1 || m == -1, "t_matrix: only channels m = 0, +-1 are modelled");
    return inv_t1(kappa, p);
}

/// T_m(i kappa) = -(1/pi) / (cot delta_m - i), real on the imaginary axis.
inline double t_matrix(int m, double kappa, const ModelParams& p)
{
    const double g = inv_t(m, kappa, p);
    if (std::abs(g) < 1e-14) {
        throw PoleError("t_matrix: kappa sits on a pole of T_" + std::to_string(m));
    }
    return -(1.0 / pi) / g;
}

/**
 * @brief The p-wave bound-state pole kappa1 of T_1.
 *
 * 1/(a1 k^2) + ln k has its minimum at k^2 = 2/a1 and is positive at both
 * k -> 0 and k = 1, so there are two zeros when a1 > 2e. The larger one sits
 * at k ~ r1^-1, outside the range of the effective-range expansion; the
 * physical pole is the smaller one, bracketed by (1e-12, sqrt(2/a1)).
 */
inline PWaveBoundState p_wave_pole(const ModelParams& p)
{
    if (p.on_resonance()) {
        throw NoRootError("p_wave_pole: no bound state at exact resonance (1/a1 = 0)");
    }
    const double k_min = std::sqrt(2.0 * p.inv_a1);
    auto f = [&](double k) { return p.inv_a1 / (k * k) + std::log(k); };
    if (k_min >= 1.0 || f(k_min) >= 0.0) {
        throw NoRootError("p_wave_pole: T_1 has no pole for a1 <= 2e");
    }
    double lo = 1e-12;
    while (f(lo) <= 0.0) {
        lo *= 1e-3;
    }
    const BisectResult r = bisect(f, lo, k_min, 1e-15, 1e-300);
    const double kappa = r.root;
    return {kappa, -0.5 * kappa * kappa};
}

/// Closed-form leading-log binding energy -1/(a1 ln(a1/2)).
inline double p_wave_energy_closed_form(const ModelParams& p)
{
    if (p.on_resonance()) {
        return 0.0;
    }
    const double a1 = 1.0 / p.inv_a1;
    detail::require_domain(a1 > 2.0, "p_wave_energy_closed_form: requires a1 > 2");
    return -1.0 / (a1 * std::log(0.5 * a1));
}

} // namespace qcs
