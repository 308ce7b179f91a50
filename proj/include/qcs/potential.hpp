#pragma once

/**
 * @brief Radial potentials for the heavy-pair problem.
 *
 * A potential is any callable double(double rho). Optional members refine how
 * solvers treat it:
 *   inner_limit()  separation below which the formula is not defined; solvers
 *                  put a hard wall at max(rho_min, inner_limit()).
 *   outer_limit()  edge of the validity region (R1 for a truncated curve).
 *   threshold()    value approached as rho -> infinity (0 unless overridden).
 */

#include <cmath>
#include <concepts>
#include <limits>
#include <memory>
#include <vector>

// pchip.hpp in Boost 1.74 calls isnan unqualified.
#include <math.h>
#include <boost/math/interpolators/pchip.hpp>

#include "qcs/adiabatic.hpp"
#include "qcs/errors.hpp"

namespace qcs {

template <class P>
concept RadialPotential = requires(const P& v, double rho) {
    { v(rho) } -> std::convertible_to<double>;
};

template <RadialPotential P>
double inner_limit(const P& v)
{
    if constexpr (requires { { v.inner_limit() } -> std::convertible_to<double>; }) {
        return v.inner_limit();
    } else {
        return 0.0;
    }
}

template <RadialPotential P>
double outer_limit(const P& v)
{
    if constexpr (requires { { v.outer_limit() } -> std::convertible_to<double>; }) {
        return v.outer_limit();
    } else {
        return std::numeric_limits<double>::infinity();
    }
}

template <RadialPotential P>
double threshold(const P& v)
{
    if constexpr (requires { { v.threshold() } -> std::convertible_to<double>; }) {
        return v.threshold();
    } else {
        return 0.0;
    }
}

/**
 * @brief One of the closed-form long-range potentials.
 *
 * Inside inner_limit() the formula has no meaning and the adapter returns 0;
 * for asympt_V the 1/ln(rho) singularity at rho = 1 is the Coulomb centre of
 * the log-coordinate problem and cannot be crossed by a regular solution.
 */
struct AsymptoticPotential {
    PotentialKind kind = PotentialKind::asympt_V;

    double operator()(double rho) const
    {
        if (rho <= inner_limit()) {
            return 0.0;
        }
        try {
            switch (kind) {
            case PotentialKind::asympt_I0: return v_I0_asympt(rho);
            case PotentialKind::asympt_II0: return v_II0_asympt(rho);
            default: return v_asympt(rho);
            }
        } catch (const DomainError&) {
            // Rounding can put rho a hair inside the edge.
            return 0.0;
        }
    }

    double inner_limit() const
    {
        switch (kind) {
        case PotentialKind::asympt_I0: return v_I0_min_rho;
        case PotentialKind::asympt_II0: return v_II0_min_rho;
        default: return 1.0;
        }
    }
};

/// base(rho) for rho <= cutoff, zero beyond.
template <RadialPotential P>
struct Truncated {
    P base;
    double cutoff;

    double operator()(double rho) const { return rho <= cutoff ? base(rho) : 0.0; }
    double inner_limit() const { return qcs::inner_limit(base); }
    double outer_limit() const { return cutoff; }
    double threshold() const { return 0.0; }
};

template <RadialPotential P>
Truncated<P> truncate(P base, double cutoff)
{
    return Truncated<P>{std::move(base), cutoff};
}

/// Monotone cubic interpolation of a PotentialCurve in ln(rho).
class TabulatedPotential {
public:
    explicit TabulatedPotential(const PotentialCurve& curve)
    {
        if (curve.samples.size() < 4) {
            throw DomainError("TabulatedPotential: need at least 4 samples");
        }
        std::vector<double> x;
        std::vector<double> y;
        x.reserve(curve.samples.size());
        y.reserve(curve.samples.size());
        for (const PotentialSample& s : curve.samples) {
            x.push_back(std::log(s.rho));
            y.push_back(s.v);
        }
        rho_front_ = curve.samples.front().rho;
        rho_back_ = curve.samples.back().rho;
        v_back_ = curve.samples.back().v;
        interp_ = std::make_shared<Interp>(std::move(x), std::move(y));
    }

    double operator()(double rho) const
    {
        if (rho >= rho_back_) {
            return v_back_;
        }
        if (rho <= rho_front_) {
            return (*interp_)(std::log(rho_front_));
        }
        return (*interp_)(std::log(rho));
    }

    double inner_limit() const { return rho_front_; }
    double outer_limit() const { return rho_back_; }
    double threshold() const { return v_back_; }

private:
    using Interp = boost::math::interpolators::pchip<std::vector<double>>;
    std::shared_ptr<Interp> interp_;
    double rho_front_ = 0.0;
    double rho_back_ = 0.0;
    double v_back_ = 0.0;
};

} // namespace qcs
