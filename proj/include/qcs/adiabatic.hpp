#pragma once

/**
 * @brief Light-particle binding curves xi(rho) at fixed heavy-pair separation.
 *
 * Everything takes rho = R / r1. The closed-form small-xi asymptotics for the
 * two branches are written in terms of the rescaled separation
 * rho_s = exp(1/2 - gamma) rho; that rescaling happens inside xi1_asympt and
 * xi2_asympt only and never leaks into the public signatures.
 *
 * The branch equations inherit a second, unphysical zero of 1/T_1 at
 * kappa ~ 1/r1 from the effective-range form. Its images appear as roots
 * hugging xi ~ 1 at every rho, so root scans stop at RootScanOptions::xi_max
 * (0.5 by default), well below it.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string_view>
#include <vector>

#include "qcs/constants.hpp"
#include "qcs/errors.hpp"
#include "qcs/roots.hpp"
#include "qcs/specfun.hpp"
#include "qcs/twobody.hpp"

namespace qcs {

enum class Branch { I, II };
enum class Sign { plus, minus };

inline constexpr double sign_value(Sign s) { return s == Sign::plus ? 1.0 : -1.0; }

/// inv_a1 / xi^2 + ln xi, i.e. (pi/2) times the p-wave inverse T-matrix.
inline double p_wave_term(double xi, const ModelParams& p)
{
    return p.inv_a1 / (xi * xi) + std::log(xi);
}

/// ln(xi e^gamma a0 / 2), i.e. (pi/2) times the s-wave inverse T-matrix.
inline double s_wave_term(double xi, const ModelParams& p)
{
    return std::log(0.5 * xi * p.a0) + euler_gamma;
}

/// K_0(z) - K_2(z) -+ (inv_a1 / xi^2 + ln xi), z = xi rho.
inline double branch1_residual(double xi, double rho, Sign sign, const ModelParams& p)
{
    detail::require_domain(xi > 0.0 && rho > 0.0, "branch1_residual: xi and rho must be positive");
    const auto k = bessel_k_orders<3>(xi * rho);
    return k[0] - k[2] - sign_value(sign) * p_wave_term(xi, p);
}

/// [K_2 + K_0 +- (inv_a1/xi^2 + ln xi)] [K_0 -+ ln(xi e^gamma a0/2)] - 2 K_1^2.
inline double branch2_residual(double xi, double rho, Sign sign, const ModelParams& p)
{
    detail::require_domain(xi > 0.0 && rho > 0.0, "branch2_residual: xi and rho must be positive");
    const auto k = bessel_k_orders<3>(xi * rho);
    const double s = sign_value(sign);
    return (k[2] + k[0] + s * p_wave_term(xi, p)) * (k[0] - s * s_wave_term(xi, p)) - 2.0 * k[1] * k[1];
}

inline double branch_residual(Branch b, double xi, double rho, Sign sign, const ModelParams& p)
{
    return b == Branch::I ? branch1_residual(xi, rho, sign, p) : branch2_residual(xi, rho, sign, p);
}

/// Sum of the magnitudes of the terms in the residual; rounding noise is ~eps times this.
inline double branch_residual_scale(Branch b, double xi, double rho, const ModelParams& p)
{
    const auto k = bessel_k_orders<3>(xi * rho);
    const double pw = std::abs(p.inv_a1 / (xi * xi)) + std::abs(std::log(xi));
    if (b == Branch::I) {
        return k[0] + k[2] + pw;
    }
    return (k[2] + k[0] + pw) * (k[0] + std::abs(s_wave_term(xi, p))) + 2.0 * k[1] * k[1];
}

struct BranchRoot {
    double rho = 0.0;
    double xi = 0.0;
    Branch branch = Branch::I;
    Sign sign = Sign::plus;
    bool converged = false;
    double residual = 0.0;
};

struct RootScanOptions {
    double xi_min = 1e-12;
    double xi_max = 0.5;
    std::size_t points = 2000;
    double residual_tol = 1e-10;
};

/// Scan a log grid in xi for sign changes of f, then bisect each bracket.
template <class F>
std::vector<std::pair<double, BisectResult>> scan_and_bisect(F&& f, const RootScanOptions& opt)
{
    return scan_and_bisect(f, opt, f);
}

/// As above, with brackets taken from a separate scan function (NaN = no sign information).
template <class F, class S>
std::vector<std::pair<double, BisectResult>> scan_and_bisect(F&& f, const RootScanOptions& opt, S&& scan)
{
    detail::require_domain(opt.points >= 400, "root scan: at least 400 grid points required");
    const auto grid = log_grid(opt.xi_min, opt.xi_max, opt.points);
    std::vector<std::pair<double, BisectResult>> out;
    for (const Bracket& br : scan_sign_changes(scan, grid)) {
        BisectResult r = bisect(f, br.lo, br.hi, 1e-15);
        out.emplace_back(r.root, r);
    }
    return out;
}

/// All roots xi in (xi_min, xi_max) of the chosen branch equation at rho.
inline std::vector<BranchRoot> solve_branch(Branch b, Sign sign, double rho, const ModelParams& p,
                                            const RootScanOptions& opt = {})
{
    detail::require_domain(rho > 0.0, "solve_branch: rho must be positive");
    auto f = [&](double xi) { return branch_residual(b, xi, rho, sign, p); };
    // Points where the residual is lost in cancellation carry no sign information.
    auto f_scan = [&](double xi) {
        const double v = f(xi);
        return std::abs(v) <= 1e-12 * branch_residual_scale(b, xi, rho, p)
                   ? std::numeric_limits<double>::quiet_NaN()
                   : v;
    };
    std::vector<BranchRoot> roots;
    for (const auto& [xi, r] : scan_and_bisect(f, opt, f_scan)) {
        BranchRoot root;
        root.rho = rho;
        root.xi = xi;
        root.branch = b;
        root.sign = sign;
        root.residual = f(xi);
        root.converged = r.converged && std::abs(root.residual) < opt.residual_tol;
        roots.push_back(root);
    }
    return roots;
}

namespace detail {

inline double scaled_separation(double rho)
{
    return std::exp(0.5 - euler_gamma) * rho;
}

} // namespace detail

/// Small-xi asymptotic root of branch I (plus sign, exact resonance).
inline double xi1_asympt(double rho)
{
    detail::require_domain(rho > 0.0, "xi1_asympt: rho must be positive");
    const double rs = detail::scaled_separation(rho);
    const double arg = rs * std::log(rs);
    detail::require_domain(arg > 1.0, "xi1_asympt: needs rho_s ln rho_s > 1");
    return std::sqrt(2.0 * std::exp(1.0 - 2.0 * euler_gamma) / (rs * rs * std::log(arg)));
}

/// Small-xi asymptotic root of branch II (plus sign, exact resonance).
inline double xi2_asympt(double rho)
{
    detail::require_domain(rho > 0.0, "xi2_asympt: rho must be positive");
    const double rs = detail::scaled_separation(rho);
    const double denom = std::log(rs) + 2.0 * euler_gamma + 1.0 - std::log(2.0);
    detail::require_domain(denom > 0.0, "xi2_asympt: needs ln rho_s + 2 gamma + 1 - ln 2 > 0");
    return std::sqrt(2.0 * std::exp(1.0 - 2.0 * euler_gamma) / (rs * rs * denom));
}

/// Inner edge of the validity region of v_I0_asympt: ln rho - gamma + 1/2 = 1.
inline const double v_I0_min_rho = std::exp(0.5 + euler_gamma);
/// Inner edge of v_II0_asympt: ln(rho/2) + gamma + 3/2 = 0.
inline const double v_II0_min_rho = 2.0 * std::exp(-euler_gamma - 1.5);

inline double v_I0_asympt(double rho)
{
    detail::require_domain(rho > 0.0, "v_I0_asympt: rho must be positive");
    const double l = std::log(rho) - euler_gamma + 0.5;
    detail::require_domain(l > 1.0, "v_I0_asympt: needs ln rho - gamma + 1/2 > 1");
    return -1.0 / (rho * rho * (l + std::log(l)));
}

inline double v_II0_asympt(double rho)
{
    detail::require_domain(rho > 0.0, "v_II0_asympt: rho must be positive");
    const double d = std::log(0.5 * rho) + euler_gamma + 1.5;
    detail::require_domain(d > 0.0, "v_II0_asympt: needs ln(rho/2) + gamma + 3/2 > 0");
    return -1.0 / (rho * rho * d);
}

/// Common large-rho form -1 / (rho^2 ln rho).
inline double v_asympt(double rho)
{
    detail::require_domain(rho > 1.0, "v_asympt: needs rho > 1");
    return -1.0 / (rho * rho * std::log(rho));
}

struct RangeScale {
    double numeric;      ///< 1 / kappa1 from the T_1 pole
    double closed_form;  ///< sqrt((a1/2) ln(a1/2))
};

/// Range R1 = hbar / sqrt(2 mu |eps1|) of the off-resonance binding curves.
inline RangeScale range_r1_scale(const ModelParams& p)
{
    if (p.on_resonance()) {
        throw ResonanceError("range_r1_scale: R1 is infinite at exact resonance");
    }
    const double a1 = p.a1();
    detail::require_domain(a1 > 2.0, "range_r1_scale: requires a1 > 2");
    const PWaveBoundState pole = p_wave_pole(p);
    return {1.0 / std::sqrt(2.0 * std::abs(pole.epsilon1)), std::sqrt(0.5 * a1 * std::log(0.5 * a1))};
}

// ---------------------------------------------------------------------------
// Tabulated curves

enum class PotentialKind {
    branch_I_plus,
    branch_I_minus,
    branch_II_plus,
    branch_II_minus,
    asympt_I0,
    asympt_II0,
    asympt_V,
};

inline constexpr std::array<PotentialKind, 7> all_potential_kinds = {
    PotentialKind::branch_I_plus,  PotentialKind::branch_I_minus, PotentialKind::branch_II_plus,
    PotentialKind::branch_II_minus, PotentialKind::asympt_I0,     PotentialKind::asympt_II0,
    PotentialKind::asympt_V,
};

inline constexpr std::string_view to_string(PotentialKind k)
{
    switch (k) {
    case PotentialKind::branch_I_plus: return "branch_I_plus";
    case PotentialKind::branch_I_minus: return "branch_I_minus";
    case PotentialKind::branch_II_plus: return "branch_II_plus";
    case PotentialKind::branch_II_minus: return "branch_II_minus";
    case PotentialKind::asympt_I0: return "asympt_I0";
    case PotentialKind::asympt_II0: return "asympt_II0";
    case PotentialKind::asympt_V: return "asympt_V";
    }
    return "unknown";
}

inline std::optional<PotentialKind> potential_kind_from_string(std::string_view s)
{
    for (PotentialKind k : all_potential_kinds) {
        if (to_string(k) == s) {
            return k;
        }
    }
    return std::nullopt;
}

inline constexpr bool is_branch_kind(PotentialKind k)
{
    return k == PotentialKind::branch_I_plus || k == PotentialKind::branch_I_minus ||
           k == PotentialKind::branch_II_plus || k == PotentialKind::branch_II_minus;
}

/// Outcome of evaluating one potential kind at one separation.
struct PotentialPoint {
    std::optional<double> v;  ///< empty: no root in the window, or outside validity
    bool converged = true;
    double residual = 0.0;
};

/**
 * @brief Evaluate a potential kind at rho.
 *
 * For branch kinds the deepest root (largest xi) inside the scan window is
 * taken as the light-particle level of that symmetry sector.
 */
inline PotentialPoint evaluate_potential(PotentialKind kind, double rho, const ModelParams& p,
                                         const RootScanOptions& opt = {})
{
    PotentialPoint out;
    auto from_branch = [&](Branch b, Sign s) {
        const auto roots = solve_branch(b, s, rho, p, opt);
        if (roots.empty()) {
            return;
        }
        const BranchRoot& r = roots.back();
        out.v = -0.5 * r.xi * r.xi;
        out.converged = r.converged;
        out.residual = r.residual;
    };
    try {
        switch (kind) {
        case PotentialKind::branch_I_plus: from_branch(Branch::I, Sign::plus); break;
        case PotentialKind::branch_I_minus: from_branch(Branch::I, Sign::minus); break;
        case PotentialKind::branch_II_plus: from_branch(Branch::II, Sign::plus); break;
        case PotentialKind::branch_II_minus: from_branch(Branch::II, Sign::minus); break;
        case PotentialKind::asympt_I0: out.v = v_I0_asympt(rho); break;
        case PotentialKind::asympt_II0: out.v = v_II0_asympt(rho); break;
        case PotentialKind::asympt_V: out.v = v_asympt(rho); break;
        }
    } catch (const DomainError&) {
        out.v.reset();
    }
    return out;
}

struct PotentialSample {
    double rho;
    double v;
};

/// Tabulated effective potential v(rho) of one kind; immutable once built.
struct PotentialCurve {
    std::vector<PotentialSample> samples;
    PotentialKind kind = PotentialKind::asympt_V;
    ModelParams params_snapshot;
};

/// Default tabulation range: [1, 10 R1] off resonance, [1, 1e8] on resonance.
inline std::pair<double, double> default_tabulation_range(const ModelParams& p, double resonance_cap = 1e8)
{
    if (p.on_resonance()) {
        return {1.0, resonance_cap};
    }
    return {1.0, 10.0 * range_r1_scale(p).numeric};
}

/// Number of grid points for a log-uniform grid with the given density per decade.
inline std::size_t points_for_density(double lo, double hi, double per_decade)
{
    const double decades = std::log10(hi / lo);
    return std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(decades * per_decade)) + 1);
}

/// Tabulate one potential kind; points with no root are skipped.
inline PotentialCurve tabulate_potential(PotentialKind kind, const ModelParams& p, const std::vector<double>& rho_grid,
                                         const RootScanOptions& opt = {})
{
    PotentialCurve curve;
    curve.kind = kind;
    curve.params_snapshot = p;
    for (double rho : rho_grid) {
        const PotentialPoint pt = evaluate_potential(kind, rho, p, opt);
        if (pt.v) {
            curve.samples.push_back({rho, *pt.v});
        }
    }
    return curve;
}

inline PotentialCurve tabulate_potential(PotentialKind kind, const ModelParams& p, double per_decade = 256.0,
                                         const RootScanOptions& opt = {})
{
    const auto [lo, hi] = default_tabulation_range(p);
    return tabulate_potential(kind, p, log_grid(lo, hi, points_for_density(lo, hi, per_decade)), opt);
}

} // namespace qcs
