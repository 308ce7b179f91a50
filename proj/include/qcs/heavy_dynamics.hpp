#pragma once

/**
 * @brief Bound states of the heavy pair in an effective potential v(rho).
 *
 * The radial equation chi'' + chi'/rho + beta (E - v) chi = 0 is solved in
 * x = ln(rho), where it reads chi_xx + beta rho^2 (E - v) chi = 0 with no
 * first-derivative term. This is the same problem as the Langer form for
 * u = chi sqrt(rho); solutions are reported as u.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "qcs/adiabatic.hpp"
#include "qcs/constants.hpp"
#include "qcs/errors.hpp"
#include "qcs/potential.hpp"
#include "qcs/roots.hpp"
#include "qcs/twobody.hpp"

namespace qcs {

enum class SpectrumMethod { wkb_closed, wkb_quadrature, numerov };

inline constexpr std::string_view to_string(SpectrumMethod m)
{
    switch (m) {
    case SpectrumMethod::wkb_closed: return "wkb_closed";
    case SpectrumMethod::wkb_quadrature: return "wkb_quadrature";
    case SpectrumMethod::numerov: return "numerov";
    }
    return "unknown";
}

struct BoundLevel {
    int n;
    double energy;
    double outer_turning_point;
};

/// Least-squares fit of ln(n^2 |E_n|) = ln(E0) - slope * n^2.
struct SpectrumFit {
    double e0;
    double slope;
    double r_squared;
};

struct BoundSpectrum {
    SpectrumMethod method = SpectrumMethod::numerov;
    std::vector<BoundLevel> levels;
    std::optional<SpectrumFit> fit;
};

struct RadialSolution {
    std::vector<double> grid;      ///< rho, uniform in ln(rho)
    std::vector<double> u_values;  ///< chi * sqrt(rho)
    int node_count = 0;
    double energy = 0.0;
};

inline SpectrumFit fit_spectrum_model(const std::vector<BoundLevel>& levels)
{
    if (levels.size() < 4) {
        throw InsufficientLevels("fit_spectrum_model: need at least 4 levels, got " +
                                 std::to_string(levels.size()));
    }
    const auto count = static_cast<double>(levels.size());
    double sx = 0.0;
    double sy = 0.0;
    for (const BoundLevel& l : levels) {
        detail::require_domain(l.energy < 0.0, "fit_spectrum_model: energies must be negative");
        const double n2 = static_cast<double>(l.n) * l.n;
        sx += n2;
        sy += std::log(n2 * std::abs(l.energy));
    }
    const double mx = sx / count;
    const double my = sy / count;
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (const BoundLevel& l : levels) {
        const double n2 = static_cast<double>(l.n) * l.n;
        const double dx = n2 - mx;
        const double dy = std::log(n2 * std::abs(l.energy)) - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    detail::require_domain(sxx > 0.0, "fit_spectrum_model: levels must have distinct n");
    const double b = sxy / sxx;
    const double a = my - b * mx;
    const double r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return {std::exp(a), -b, r2};
}

inline SpectrumFit fit_spectrum_model(const BoundSpectrum& s) { return fit_spectrum_model(s.levels); }

/// Estimated number of three-body bound states, (1/pi) sqrt(2 beta ln(a1/2)).
inline double n0_estimate(const ModelParams& p)
{
    if (p.on_resonance()) {
        return std::numeric_limits<double>::infinity();
    }
    const double a1 = p.a1();
    detail::require_domain(a1 >= 2.0, "n0_estimate: requires a1 >= 2");
    return std::sqrt(2.0 * p.beta * std::log(0.5 * a1)) / pi;
}

// ---------------------------------------------------------------------------
// WKB

/// Outermost radius beyond r_from where v crosses E from below.
template <RadialPotential P>
double outer_turning_point(const P& v, double energy, double r_from)
{
    if (!(v(r_from) < energy)) {
        throw NoTurningPoint("outer_turning_point: classically forbidden at the starting radius");
    }
    double lo = r_from;
    double hi = r_from;
    constexpr double r_limit = 1e150;
    do {
        lo = hi;
        hi *= 2.0;
        if (hi > r_limit) {
            throw NoTurningPoint("outer_turning_point: v stays below E out to 1e150");
        }
    } while (v(hi) < energy);
    auto f = [&](double r) { return v(r) - energy; };
    return bisect(f, lo, hi, 1e-15).root;
}

/// Classical action integral of sqrt(beta (E - v)) over [a, b], evaluated in ln(R).
template <RadialPotential P>
double wkb_action(const P& v, double beta, double energy, double a, double b)
{
    detail::require_domain(a > 0.0 && b >= a, "wkb_action: need 0 < a <= b");
    if (b == a) {
        return 0.0;
    }
    auto integrand = [&](double x) {
        const double r = std::exp(x);
        const double k2 = energy - v(r);
        return k2 > 0.0 ? std::sqrt(beta * k2) * r : 0.0;
    };
    const double xa = std::log(a);
    const double xb = std::log(b);
    if (xb - xa <= 1e-12 * (1.0 + std::abs(xa))) {
        return integrand(0.5 * (xa + xb)) * (xb - xa);
    }
    // The two-argument form keeps Boost from asserting on abscissae that round onto an endpoint.
    auto with_complement = [&](double x, double) { return integrand(x); };
    boost::math::quadrature::tanh_sinh<double> quad;
    return quad.integrate(with_complement, xa, xb, 1e-10);
}

/**
 * @brief Accumulated phase between r_lower and the outer turning point.
 *
 * Returns theta when v(r_lower) == E (empty interval).
 */
template <RadialPotential P>
double wkb_phase_quadrature(double energy, double r_lower, const P& v, double beta, double theta)
{
    detail::require_domain(beta > 0.0 && r_lower > 0.0, "wkb_phase_quadrature: need beta > 0, r_lower > 0");
    const double v_lower = v(r_lower);
    if (v_lower == energy) {
        return theta;
    }
    if (v_lower > energy) {
        throw NoTurningPoint("wkb_phase_quadrature: v(r_lower) > E");
    }
    const double r_e = outer_turning_point(v, energy, r_lower);
    return wkb_action(v, beta, energy, r_lower, r_e) + theta;
}

/// Phase of the 1/(R^2 ln R) tail: 2 sqrt(beta) [sqrt(ln R_E) - sqrt(ln R)] + theta0.
inline double wkb_phase_closed(double r, double r_e, double beta, double theta0)
{
    detail::require_domain(r > 1.0, "wkb_phase_closed: needs R > 1");
    detail::require_domain(r_e >= r, "wkb_phase_closed: needs R_E >= R");
    detail::require_domain(beta > 0.0, "wkb_phase_closed: needs beta > 0");
    return 2.0 * std::sqrt(beta) * (std::sqrt(std::log(r_e)) - std::sqrt(std::log(r))) + theta0;
}

/// R_n solving 2 sqrt(beta ln R_n) + theta0 = pi n.
inline double wkb_closed_turning_point(int n, double beta, double theta0)
{
    const double phase = pi * n - theta0;
    detail::require_domain(n >= 1 && phase >= 0.0, "wkb_closed_turning_point: needs pi n >= theta0");
    return std::exp(phase * phase / (4.0 * beta));
}

/**
 * @brief Levels from phi(r_lower, R_n) + theta0 = pi n with E_n = v(R_n).
 *
 * Assumes v increases monotonically on (r_lower, r_valid]; R_n is located by
 * geometric bisection.
 */
template <RadialPotential P>
BoundSpectrum wkb_spectrum_quadrature(const P& v, double beta, double theta0, int n_min, int n_max, double r_lower,
                                      double r_valid)
{
    detail::require_domain(n_min >= 1 && n_max >= n_min, "wkb_spectrum: need n_max >= n_min >= 1");
    detail::require_domain(r_valid > r_lower, "wkb_spectrum: empty validity range");
    BoundSpectrum out;
    out.method = SpectrumMethod::wkb_quadrature;
    auto mismatch = [&](double r_n, int n) {
        return wkb_action(v, beta, v(r_n), r_lower, r_n) + theta0 - pi * n;
    };
    // Start just outside the wall so that the integrand is defined.
    const double r_start = r_lower * (1.0 + 1e-12);
    for (int n = n_min; n <= n_max; ++n) {
        auto f = [&](double r) { return mismatch(r, n); };
        if (f(r_valid) < 0.0) {
            throw LevelNotSupported("wkb_spectrum: level n = " + std::to_string(n) +
                                    " lies beyond the validity range of the potential");
        }
        const double r_n = bisect(f, r_start, r_valid, 1e-12).root;
        out.levels.push_back({n, v(r_n), r_n});
    }
    if (out.levels.size() >= 4) {
        out.fit = fit_spectrum_model(out.levels);
    }
    return out;
}

struct WkbOptions {
    double per_decade = 128.0;  ///< tabulation density for branch kinds
    RootScanOptions scan;
};

/**
 * @brief WKB spectrum for one potential kind.
 *
 * asympt_V uses the closed chain R_n = exp((pi n - theta0)^2 / (4 beta)); other
 * kinds use the phase quadrature. Off resonance a level with R_n > R1 is not
 * supported by the potential.
 */
inline BoundSpectrum wkb_spectrum(const ModelParams& p, int n_min, int n_max, PotentialKind kind,
                                  const WkbOptions& opt = {})
{
    detail::require_domain(n_min >= 1 && n_max >= n_min, "wkb_spectrum: need n_max >= n_min >= 1");
    const double r_valid =
        p.on_resonance() ? std::numeric_limits<double>::infinity() : range_r1_scale(p).numeric;

    if (kind == PotentialKind::asympt_V) {
        BoundSpectrum out;
        out.method = SpectrumMethod::wkb_closed;
        for (int n = n_min; n <= n_max; ++n) {
            const double r_n = wkb_closed_turning_point(n, p.beta, p.theta0);
            if (r_n > r_valid) {
                throw LevelNotSupported("wkb_spectrum: R_" + std::to_string(n) + " exceeds R1");
            }
            if (r_n <= 1.0) {
                throw LevelNotSupported("wkb_spectrum: R_" + std::to_string(n) + " inside r1");
            }
            out.levels.push_back({n, v_asympt(r_n), r_n});
        }
        if (out.levels.size() >= 4) {
            out.fit = fit_spectrum_model(out.levels);
        }
        return out;
    }

    if (!is_branch_kind(kind)) {
        const AsymptoticPotential v{kind};
        const double r_top = std::isfinite(r_valid) ? r_valid : 1e150;
        return wkb_spectrum_quadrature(v, p.beta, p.theta0, n_min, n_max, std::max(1.0, v.inner_limit()), r_top);
    }

    const PotentialCurve curve = tabulate_potential(kind, p, opt.per_decade, opt.scan);
    const TabulatedPotential v(curve);
    const double r_top = std::min(r_valid, v.outer_limit());
    return wkb_spectrum_quadrature(v, p.beta, p.theta0, n_min, n_max, std::max(1.0, v.inner_limit()), r_top);
}

// ---------------------------------------------------------------------------
// Numerov

struct NumerovOptions {
    double rho_min = 0.5;                  ///< inner wall; raised to the potential's inner limit
    double rho_max = 1e7;
    std::size_t points = 40000;
    double forbidden_action_cutoff = 40.0;  ///< stop once the solution has decayed by e^cutoff
    double energy_rel_tol = 1e-10;
};

namespace detail {

/// Potential sampled once on a uniform ln(rho) grid, reusable across energies.
class NumerovGrid {
public:
    template <RadialPotential P>
    NumerovGrid(const P& v, double beta, double rho_min, double rho_max, std::size_t points)
    {
        require_domain(beta > 0.0, "numerov: beta must be positive");
        const double wall = std::max(rho_min, qcs::inner_limit(v));
        require_domain(wall >= 0.1, "numerov: inner wall must be at rho >= 0.1");
        require_domain(rho_max > wall, "numerov: rho_max must exceed the inner wall");
        require_domain(points >= 16, "numerov: need at least 16 grid points");
        x0_ = std::log(wall);
        h_ = (std::log(rho_max) - x0_) / static_cast<double>(points - 1);
        rho_.resize(points);
        w_.resize(points);
        v_.resize(points);
        for (std::size_t i = 0; i < points; ++i) {
            const double x = x0_ + h_ * static_cast<double>(i);
            rho_[i] = std::exp(x);
            w_[i] = beta * rho_[i] * rho_[i];
            v_[i] = i == 0 ? 0.0 : v(rho_[i]);
        }
        rho_.front() = wall;
        rho_.back() = rho_max;
        // Coefficient of a 1/(x - x_wall) singularity of g at the wall.
        const double eps = 1e-8;
        singular_ = -beta * std::exp(2.0 * x0_) * v(std::exp(x0_ + eps)) * eps;
        threshold_ = qcs::threshold(v);
        v_min_ = *std::min_element(v_.begin() + 1, v_.end());
    }

    std::size_t size() const { return rho_.size(); }
    double step() const { return h_; }
    double rho(std::size_t i) const { return rho_[i]; }
    double v_min() const { return v_min_; }
    double threshold() const { return threshold_; }

    /**
     * @brief Outward integration at energy E with chi(wall) = 0, chi'(wall) = 1.
     *
     * Returns the node count; fills chi when a buffer is given. Integration
     * stops early once the solution has been decaying for longer than
     * cutoff e-folds, since beyond that Numerov amplifies the growing mode.
     */
    int integrate(double energy, double cutoff, std::vector<double>* chi_out = nullptr) const
    {
        const double h = h_;
        const double h2 = h * h;
        const std::size_t n = rho_.size();
        constexpr double max_phase_step = (2.0 * pi / 8.0) * (2.0 * pi / 8.0);

        auto g_at = [&](std::size_t i) { return w_[i] * (energy - v_[i]); };

        const double c = singular_;
        const double g1 = g_at(1);
        const double g_reg = g1 - c / h;
        const double chi0 = 0.0;
        const double chi1 = h - 0.5 * c * h2 + (c * c / 12.0 - g_reg / 6.0) * h2 * h;

        double y_prev = h2 * c / 12.0;
        double chi = chi1;
        double g = g1;
        double y = (1.0 + h2 * g / 12.0) * chi;

        if (chi_out) {
            chi_out->assign(1, chi0);
            chi_out->push_back(chi1);
        }
        int nodes = 0;
        double last_sign = chi1;
        double action = 0.0;

        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (g > 0.0) {
                if (g * h2 > max_phase_step && i > 1) {
                    throw GridTooCoarse("numerov: local wavelength shorter than 8 steps at rho = " +
                                        std::to_string(rho_[i]));
                }
                action = 0.0;
            } else {
                action += h * std::sqrt(-g);
                if (action > cutoff) {
                    break;
                }
            }
            const double y_next = 2.0 * y - y_prev - h2 * g * chi;
            const double g_next = g_at(i + 1);
            const double chi_next = y_next / (1.0 + h2 * g_next / 12.0);

            y_prev = y;
            y = y_next;
            chi = chi_next;
            g = g_next;

            if (chi != 0.0) {
                if (last_sign != 0.0 && std::signbit(chi) != std::signbit(last_sign)) {
                    ++nodes;
                }
                last_sign = chi;
            }
            if (chi_out) {
                chi_out->push_back(chi);
            }
            if (std::abs(y) > 1e250) {
                constexpr double s = 1e-250;
                y *= s;
                y_prev *= s;
                chi *= s;
                last_sign *= s;
                if (chi_out) {
                    for (double& val : *chi_out) {
                        val *= s;
                    }
                }
            }
        }
        return nodes;
    }

private:
    std::vector<double> rho_;
    std::vector<double> w_;
    std::vector<double> v_;
    double x0_ = 0.0;
    double h_ = 0.0;
    double singular_ = 0.0;
    double threshold_ = 0.0;
    double v_min_ = 0.0;
};

inline std::size_t scaled_points(const NumerovOptions& opt, double rho_lo, double rho_hi)
{
    const double density = static_cast<double>(opt.points) / std::log(opt.rho_max / opt.rho_min);
    return std::max<std::size_t>(2000, static_cast<std::size_t>(std::ceil(density * std::log(rho_hi / rho_lo))));
}

} // namespace detail

template <RadialPotential P>
RadialSolution numerov_integrate(const P& v, double beta, double energy, double rho_min, double rho_max,
                                 std::size_t points, double cutoff = NumerovOptions{}.forbidden_action_cutoff)
{
    detail::require_domain(std::isfinite(energy) && energy <= 0.0, "numerov_integrate: needs E <= 0");
    const detail::NumerovGrid grid(v, beta, rho_min, rho_max, points);
    std::vector<double> chi;
    RadialSolution out;
    out.energy = energy;
    out.node_count = grid.integrate(energy, cutoff, &chi);
    out.grid.resize(chi.size());
    out.u_values.resize(chi.size());
    for (std::size_t i = 0; i < chi.size(); ++i) {
        out.grid[i] = grid.rho(i);
        out.u_values[i] = chi[i] * std::sqrt(out.grid[i]);
    }
    return out;
}

/**
 * @brief Lowest n_max levels by node-count bisection.
 *
 * Level n has n - 1 nodes. Returns fewer levels when the grid holds fewer.
 */
template <RadialPotential P>
BoundSpectrum numerov_spectrum(const P& v, double beta, int n_max, const NumerovOptions& opt = {})
{
    detail::require_domain(n_max >= 1, "numerov_spectrum: n_max must be at least 1");
    const detail::NumerovGrid grid(v, beta, opt.rho_min, opt.rho_max, opt.points);
    const double thr = grid.threshold();
    BoundSpectrum out;
    out.method = SpectrumMethod::numerov;
    if (!(grid.v_min() < thr)) {
        return out;
    }
    // Work with the binding depth d = thr - E > 0; node count falls as d grows.
    const double d_deep = 1.01 * (thr - grid.v_min());
    const double d_shallow = 1e-30 * d_deep;
    auto nodes_at = [&](double d) { return grid.integrate(thr - d, opt.forbidden_action_cutoff); };
    const int available = nodes_at(d_shallow);
    const int levels = std::min(n_max, available);

    for (int n = 1; n <= levels; ++n) {
        double lo = d_shallow;  // nodes >= n
        double hi = d_deep;     // nodes < n
        while (hi - lo > opt.energy_rel_tol * lo) {
            const double mid = std::sqrt(lo * hi);
            if (mid <= lo || mid >= hi) {
                break;
            }
            if (nodes_at(mid) >= n) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        const double energy = thr - std::sqrt(lo * hi);
        double r_turn = std::numeric_limits<double>::quiet_NaN();
        try {
            r_turn = outer_turning_point(v, energy, grid.rho(1));
        } catch (const NoTurningPoint&) {
        }
        out.levels.push_back({n, energy, r_turn});
    }
    if (out.levels.size() >= 4) {
        out.fit = fit_spectrum_model(out.levels);
    }
    return out;
}

/**
 * @brief Number of bound states at zero energy.
 *
 * With a finite outer_limit() the potential vanishes beyond it, chi is linear
 * in ln(rho) there, and one more node lies outside when chi and chi' have
 * opposite signs at the edge. Otherwise nodes are counted out to opt.rho_max.
 */
template <RadialPotential P>
int zero_energy_node_count(const P& v, double beta, const NumerovOptions& opt = {})
{
    const double edge = outer_limit(v);
    if (!std::isfinite(edge)) {
        const detail::NumerovGrid grid(v, beta, opt.rho_min, opt.rho_max, opt.points);
        return grid.integrate(0.0, std::numeric_limits<double>::infinity());
    }
    const double wall = std::max(opt.rho_min, inner_limit(v));
    detail::require_domain(edge > wall, "zero_energy_node_count: cutoff inside the inner wall");
    const double rho_hi = edge * 1.01;
    const detail::NumerovGrid grid(v, beta, opt.rho_min, rho_hi, detail::scaled_points(opt, wall, rho_hi));
    std::vector<double> chi;
    int nodes = grid.integrate(0.0, std::numeric_limits<double>::infinity(), &chi);
    const double last = chi[chi.size() - 1];
    const double slope = last - chi[chi.size() - 2];
    if (last * slope < 0.0) {
        ++nodes;
    }
    return nodes;
}

} // namespace qcs
