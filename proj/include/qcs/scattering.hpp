#pragma once

/**
 * @brief Low-energy atom-molecule scattering off resonance.
 *
 * The molecule is the p-wave bound state of energy eps1; the atom-molecule
 * scattering length A0 follows from matching the zero-energy solution of the
 * heavy-pair problem at R1.
 */

#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "qcs/adiabatic.hpp"
#include "qcs/constants.hpp"
#include "qcs/errors.hpp"
#include "qcs/heavy_dynamics.hpp"
#include "qcs/twobody.hpp"

namespace qcs {

struct Resonance {
    int n;
    double a1;             ///< N0(a1) = n + 1/2 exactly
    double a1_asymptotic;  ///< exp((pi^2 / (2 beta)) n^2), order of magnitude only
};

struct CrossSectionSample {
    double k;
    double sigma0;
};

struct ScanRow {
    double a1;
    double n0;
    std::optional<double> a_molecule;  ///< empty at a pole or where R1 is undefined
    bool is_pole;                      ///< a half-integer of N0 lies in (previous a1, a1]
};

struct ScatteringObservables {
    std::vector<ScanRow> rows;
    std::vector<Resonance> resonances;
    std::vector<CrossSectionSample> sigma_samples;
};

/// Cross-section formula is derived for k r1 << 1.
inline constexpr double cross_section_validity_k = 0.1;

inline bool cross_section_in_validity(double k) { return k <= cross_section_validity_k; }

/// sigma0 = (pi^2 / k) / [pi^2/4 + ln^2(k A0 e^gamma / 2)].
inline double cross_section(double k, double a_molecule)
{
    detail::require_domain(k > 0.0 && a_molecule > 0.0, "cross_section: needs k > 0 and A0 > 0");
    const double l = std::log(0.5 * k * a_molecule * std::exp(euler_gamma));
    return (pi * pi / k) / (0.25 * pi * pi + l * l);
}

/// Channel momentum from the total energy: k^2 / beta = E - eps1.
inline double channel_momentum(double energy, const ModelParams& p)
{
    const double eps1 = p_wave_pole(p).epsilon1;
    detail::require_domain(energy > eps1, "channel_momentum: energy below the atom-molecule threshold");
    return std::sqrt(p.beta * (energy - eps1));
}

/**
 * @brief A0 = R1 exp(-pi N0 tan(pi N0) / (2 beta)).
 *
 * Diverges where N0 is a half-integer, which is where a new three-body state
 * appears. The matching radius is fixed at R1, so absolute values carry an
 * O(1) convention factor; pole positions do not.
 */
inline double atom_molecule_length(const ModelParams& p)
{
    if (p.on_resonance()) {
        throw ResonanceError("atom_molecule_length: undefined at exact resonance");
    }
    const double n0 = n0_estimate(p);
    const double c = std::cos(pi * n0);
    if (std::abs(c) < 1e-14) {
        throw PoleError("atom_molecule_length: N0 is a half-integer, A0 diverges");
    }
    const double r1 = range_r1_scale(p).numeric;
    return r1 * std::exp(-pi * n0 * std::tan(pi * n0) / (2.0 * p.beta));
}

/// a1 where N0 = n + 1/2, together with the leading large-n form.
inline std::vector<Resonance> resonance_positions(const ModelParams& p, const std::vector<int>& n_list)
{
    std::vector<Resonance> out;
    out.reserve(n_list.size());
    const double c = pi * pi / (2.0 * p.beta);
    for (int n : n_list) {
        detail::require_domain(n >= 1, "resonance_positions: n must be at least 1");
        const double h = n + 0.5;
        out.push_back({n, 2.0 * std::exp(c * h * h), std::exp(c * n * n)});
    }
    return out;
}

/**
 * @brief N0 and A0 over an increasing a1 grid.
 *
 * A row is flagged as a pole when a half-integer of N0 falls between it and
 * the previous grid point; the exact positions are listed in resonances.
 */
inline ScatteringObservables resonance_scan(const ModelParams& base, const std::vector<double>& a1_grid)
{
    for (std::size_t i = 1; i < a1_grid.size(); ++i) {
        detail::require_domain(a1_grid[i] > a1_grid[i - 1], "resonance_scan: a1 grid must be increasing");
    }
    ScatteringObservables out;
    auto half_index = [](double n0) { return static_cast<long>(std::floor(n0 - 0.5)); };
    std::optional<long> prev_index;
    for (double a1 : a1_grid) {
        detail::require_domain(a1 >= 2.0, "resonance_scan: a1 must be at least 2");
        ModelParams p = base;
        p.inv_a1 = 1.0 / a1;
        ScanRow row{a1, n0_estimate(p), std::nullopt, false};
        const long idx = half_index(row.n0);
        if (prev_index && idx > *prev_index) {
            row.is_pole = true;
            for (long n = *prev_index + 1; n <= idx; ++n) {
                out.resonances.push_back(resonance_positions(p, {static_cast<int>(n)}).front());
            }
        }
        prev_index = idx;
        try {
            row.a_molecule = atom_molecule_length(p);
        } catch (const PoleError&) {
            row.is_pole = true;
        } catch (const NoRootError&) {
            // No molecule for a1 <= 2e.
        }
        out.rows.push_back(row);
    }
    return out;
}

} // namespace qcs
