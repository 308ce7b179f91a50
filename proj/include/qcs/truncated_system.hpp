#pragma once

/**
 * @brief Determinant of the coupled two-centre system for the light-particle
 * coefficients C_m^(+-), truncated at |m| <= m_max.
 *
 * On the imaginary axis H^(1)_n(i x) = (2/pi) (-i)^(n+1) K_|n|(x), and each
 * coupling i pi T_m H_{m-m'} equals 2 T_m (-i)^(m-m') K_|m-m'|. Substituting
 * c_m = (-i)^-m C_m^+, d_m = (-i)^-m C_m^- removes every phase exactly and
 * leaves the real system
 *
 *   c_m + 2 T_m sum_n K_|m-n| d_n = 0
 *   d_m + 2 T_m sum_n (-1)^(m-n) K_|m-n| c_n = 0,
 *
 * whose determinant equals that of the original complex system. Rows with
 * |m| <= 1 are multiplied by 1/(2 T_m) = -(pi/2)(cot delta_m - i), which removes the
 * T-matrix poles; higher partial waves keep the unscaled form.
 *
 * Exchange of the two centres leaves the subspaces d_n = s (-1)^n c_{-n},
 * s = +-1, invariant ("symmetric" and "antisymmetric" sectors), and inside
 * each sector c_{-n} = p c_n (reflection parity p) is invariant as well. For
 * m_max = 1 the odd block is the branch-I residual with sign s and the even
 * block the branch-II residual with sign s.
 */

#include <array>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <string_view>
#include <vector>

#include "qcs/adiabatic.hpp"
#include "qcs/constants.hpp"
#include "qcs/errors.hpp"
#include "qcs/roots.hpp"
#include "qcs/specfun.hpp"
#include "qcs/twobody.hpp"

namespace qcs {

inline constexpr int max_partial_wave = 6;

/// H^(1)_m(i x) = magnitude * (-i)^quarter_turns, magnitude = (2/pi) K_|m|(x).
struct HankelImag {
    double magnitude;
    int quarter_turns;  ///< in [0, 4)

    std::complex<double> value() const
    {
        static constexpr std::array<std::complex<double>, 4> phase = {
            std::complex<double>{1.0, 0.0}, {0.0, -1.0}, {-1.0, 0.0}, {0.0, 1.0}};
        return magnitude * phase[static_cast<std::size_t>(quarter_turns)];
    }
};

inline HankelImag hankel_imag_as_k(int m, double x)
{
    detail::require_domain(x > 0.0, "hankel_imag_as_k: argument must be positive");
    const int turns = ((m + 1) % 4 + 4) % 4;
    return {(2.0 / pi) * bessel_k(std::abs(m), x), turns};
}

/**
 * @brief T_m(i kappa) for the non-resonant partial waves |m| >= 2.
 *
 * Hard-disk background of radius r0: tan(delta_m) ~ -pi (k r0/2)^(2m) / (m!(m-1)!),
 * continued to k = i kappa.
 */
inline double t_matrix_background(int m, double kappa, double r0)
{
    const int am = std::abs(m);
    detail::require_domain(am >= 2, "t_matrix_background: only |m| >= 2");
    detail::require_domain(kappa > 0.0, "t_matrix_background: kappa must be positive");
    double fact = 1.0;  // m! (m-1)!
    for (int j = 2; j <= am; ++j) {
        fact *= j;
    }
    for (int j = 2; j <= am - 1; ++j) {
        fact *= j;
    }
    const double t = std::pow(0.5 * kappa * r0, 2 * am) / fact;
    return (am % 2 == 0) ? t : -t;
}

enum class Sector { symmetric, antisymmetric, full };
enum class Reflection { any, even, odd };

inline constexpr std::string_view to_string(Sector s)
{
    switch (s) {
    case Sector::symmetric: return "symmetric";
    case Sector::antisymmetric: return "antisymmetric";
    case Sector::full: return "full";
    }
    return "unknown";
}

inline constexpr std::string_view to_string(Reflection r)
{
    switch (r) {
    case Reflection::any: return "any";
    case Reflection::even: return "even";
    case Reflection::odd: return "odd";
    }
    return "unknown";
}

/// Branch equation reproduced by a (sector, reflection) block at m_max = 1.
inline constexpr Sign sector_sign(Sector s) { return s == Sector::antisymmetric ? Sign::minus : Sign::plus; }
inline constexpr Branch reflection_branch(Reflection r) { return r == Reflection::odd ? Branch::I : Branch::II; }

/// sign * mantissa * 2^exponent, with mantissa in [0.5, 1) or zero.
struct Determinant {
    int sign = 1;
    double mantissa = 1.0;
    long exponent = 0;

    double value() const { return sign * std::ldexp(mantissa, static_cast<int>(exponent)); }
    double log_abs() const { return std::log(mantissa) + static_cast<double>(exponent) * std::log(2.0); }
    bool is_zero() const { return mantissa == 0.0; }

    void multiply(double x)
    {
        if (x == 0.0) {
            mantissa = 0.0;
            sign = 1;
            exponent = 0;
            return;
        }
        if (x < 0.0) {
            sign = -sign;
            x = -x;
        }
        int ex = 0;
        const double fx = std::frexp(x, &ex);
        int ep = 0;
        mantissa = std::frexp(mantissa * fx, &ep);
        exponent += ex + ep;
    }
};

namespace detail {

struct DenseMatrix {
    std::size_t n = 0;
    std::size_t cols = 0;
    std::vector<double> a;

    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t c) : n(rows), cols(c), a(rows * c, 0.0) {}
    double& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
};

/// LU with partial pivoting after row equilibration; exponent tracked separately.
inline Determinant lu_determinant(DenseMatrix m)
{
    const std::size_t n = m.n;
    Determinant det;
    for (std::size_t i = 0; i < n; ++i) {
        double row_max = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            row_max = std::max(row_max, std::abs(m(i, j)));
        }
        if (row_max == 0.0) {
            det.multiply(0.0);
            return det;
        }
        int e = 0;
        std::frexp(row_max, &e);
        for (std::size_t j = 0; j < n; ++j) {
            m(i, j) = std::ldexp(m(i, j), -e);
        }
        det.exponent += e;
    }
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i) {
            if (std::abs(m(i, k)) > std::abs(m(piv, k))) {
                piv = i;
            }
        }
        if (m(piv, k) == 0.0) {
            det.multiply(0.0);
            return det;
        }
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(m(k, j), m(piv, j));
            }
            det.sign = -det.sign;
        }
        const double pivot = m(k, k);
        det.multiply(pivot);
        for (std::size_t i = k + 1; i < n; ++i) {
            const double l = m(i, k) / pivot;
            if (l == 0.0) {
                continue;
            }
            for (std::size_t j = k + 1; j < n; ++j) {
                m(i, j) -= l * m(k, j);
            }
        }
    }
    return det;
}

} // namespace detail

/**
 * @brief Full real system in the variables (c_-M..c_M, d_-M..d_M).
 *
 * Row i < N is the first equation for m = i - M, row N + i the second.
 */
inline detail::DenseMatrix assemble_real_system(double xi, double rho, const ModelParams& p, int m_max)
{
    detail::require_domain(xi > 0.0 && rho > 0.0, "build_determinant: xi and rho must be positive");
    detail::require_domain(m_max >= 1 && m_max <= max_partial_wave, "build_determinant: m_max must be in [1, 6]");
    const std::size_t n = static_cast<std::size_t>(2 * m_max + 1);
    const auto k = bessel_k_orders<2 * max_partial_wave + 1>(xi * rho);
    detail::DenseMatrix f(2 * n, 2 * n);
    for (int m = -m_max; m <= m_max; ++m) {
        const std::size_t i = static_cast<std::size_t>(m + m_max);
        // diagonal weight and coupling weight of the row
        double diag = 1.0;
        double coup = 0.0;
        if (std::abs(m) <= 1) {
            diag = -(pi / 2.0) * inv_t(m, xi, p);
            coup = 1.0;
        } else {
            diag = 1.0;
            coup = 2.0 * t_matrix_background(m, xi, p.r0);
        }
        f(i, i) = diag;
        f(n + i, n + i) = diag;
        for (int mp = -m_max; mp <= m_max; ++mp) {
            const std::size_t j = static_cast<std::size_t>(mp + m_max);
            const double kk = k[static_cast<std::size_t>(std::abs(m - mp))];
            const double parity = ((m - mp) % 2 == 0) ? 1.0 : -1.0;
            f(i, n + j) += coup * kk;
            f(n + i, j) += coup * parity * kk;
        }
    }
    return f;
}

/// Orthonormal basis (columns) of the requested (sector, reflection) subspace.
inline detail::DenseMatrix sector_basis(int m_max, Sector sector, Reflection refl)
{
    const std::size_t n = static_cast<std::size_t>(2 * m_max + 1);
    std::vector<std::vector<double>> cols;
    auto push = [&](double s, int k, double parity) {
        // c = (e_k + parity e_-k) [/sqrt2], d_m = s (-1)^m c_-m
        std::vector<double> v(2 * n, 0.0);
        auto add = [&](int idx, double w) {
            const std::size_t ci = static_cast<std::size_t>(idx + m_max);
            v[ci] += w;
            const double sgn = (std::abs(idx) % 2 == 0) ? 1.0 : -1.0;
            v[n + static_cast<std::size_t>(-idx + m_max)] += s * sgn * w;
        };
        if (k == 0) {
            add(0, 1.0);
        } else {
            add(k, 1.0);
            add(-k, parity);
        }
        double norm = 0.0;
        for (double x : v) {
            norm += x * x;
        }
        norm = std::sqrt(norm);
        for (double& x : v) {
            x /= norm;
        }
        cols.push_back(std::move(v));
    };
    std::vector<double> signs;
    if (sector != Sector::antisymmetric) {
        signs.push_back(1.0);
    }
    if (sector != Sector::symmetric) {
        signs.push_back(-1.0);
    }
    for (double s : signs) {
        if (refl == Reflection::any) {
            for (int k = -m_max; k <= m_max; ++k) {
                // plain exchange basis: c = e_k
                std::vector<double> v(2 * n, 0.0);
                v[static_cast<std::size_t>(k + m_max)] = 1.0 / std::sqrt(2.0);
                const double sgn = (std::abs(k) % 2 == 0) ? 1.0 : -1.0;
                v[n + static_cast<std::size_t>(-k + m_max)] = s * sgn / std::sqrt(2.0);
                cols.push_back(std::move(v));
            }
        } else {
            const double parity = refl == Reflection::even ? 1.0 : -1.0;
            if (refl == Reflection::even) {
                push(s, 0, parity);
            }
            for (int k = 1; k <= m_max; ++k) {
                push(s, k, parity);
            }
        }
    }
    detail::DenseMatrix q(2 * n, cols.size());
    for (std::size_t c = 0; c < cols.size(); ++c) {
        for (std::size_t r = 0; r < 2 * n; ++r) {
            q(r, c) = cols[c][r];
        }
    }
    return q;
}

/// Projection left^T F right.
inline detail::DenseMatrix project(const detail::DenseMatrix& f, const detail::DenseMatrix& left,
                                   const detail::DenseMatrix& right)
{
    detail::DenseMatrix fr(f.n, right.cols);
    for (std::size_t i = 0; i < f.n; ++i) {
        for (std::size_t j = 0; j < right.cols; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < f.cols; ++k) {
                s += f(i, k) * right(k, j);
            }
            fr(i, j) = s;
        }
    }
    detail::DenseMatrix out(left.cols, right.cols);
    for (std::size_t i = 0; i < left.cols; ++i) {
        for (std::size_t j = 0; j < right.cols; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < left.n; ++k) {
                s += left(k, i) * fr(k, j);
            }
            out(i, j) = s;
        }
    }
    return out;
}

/// Determinant of the chosen block of the truncated system at (xi, rho).
inline Determinant build_determinant(double xi, double rho, const ModelParams& p, int m_max, Sector sector,
                                     Reflection refl = Reflection::any)
{
    const detail::DenseMatrix f = assemble_real_system(xi, rho, p, m_max);
    if (sector == Sector::full && refl == Reflection::any) {
        return detail::lu_determinant(f);
    }
    const detail::DenseMatrix q = sector_basis(m_max, sector, refl);
    return detail::lu_determinant(project(f, q, q));
}

/// Frobenius norm of the coupling between the two exchange sectors (zero by symmetry).
inline double sector_coupling_norm(double xi, double rho, const ModelParams& p, int m_max)
{
    const detail::DenseMatrix f = assemble_real_system(xi, rho, p, m_max);
    const detail::DenseMatrix qs = sector_basis(m_max, Sector::symmetric, Reflection::any);
    const detail::DenseMatrix qa = sector_basis(m_max, Sector::antisymmetric, Reflection::any);
    double s = 0.0;
    for (const auto& blk : {project(f, qa, qs), project(f, qs, qa)}) {
        for (double x : blk.a) {
            s += x * x;
        }
    }
    return std::sqrt(s);
}

struct DeterminantGrid {
    double rho = 0.0;
    int m_max = 1;
    Sector sector = Sector::full;
    Reflection reflection = Reflection::any;
    std::vector<std::pair<double, Determinant>> xi_samples;
};

inline DeterminantGrid sample_determinant(double rho, const ModelParams& p, int m_max, Sector sector,
                                          const std::vector<double>& xi_grid, Reflection refl = Reflection::any)
{
    DeterminantGrid g{rho, m_max, sector, refl, {}};
    for (double xi : xi_grid) {
        g.xi_samples.emplace_back(xi, build_determinant(xi, rho, p, m_max, sector, refl));
    }
    return g;
}

struct DetRoot {
    double rho = 0.0;
    double xi = 0.0;
    Sector sector = Sector::full;
    Reflection reflection = Reflection::any;
    int m_max = 1;
    bool converged = false;
};

/// Zeros of the block determinant in xi, same scan-and-bisect contract as solve_branch.
inline std::vector<DetRoot> find_det_roots(double rho, const ModelParams& p, int m_max, Sector sector,
                                           Reflection refl = Reflection::any, const RootScanOptions& opt = {})
{
    auto f = [&](double xi) {
        const Determinant d = build_determinant(xi, rho, p, m_max, sector, refl);
        return d.is_zero() ? 0.0 : static_cast<double>(d.sign);
    };
    std::vector<DetRoot> out;
    for (const auto& [xi, r] : scan_and_bisect(f, opt)) {
        out.push_back({rho, xi, sector, refl, m_max, r.converged});
    }
    return out;
}

} // namespace qcs
