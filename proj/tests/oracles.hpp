#pragma once

// Reference implementations used only by the tests. None of them share code
// with the library.

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

namespace oracle {

using cld = std::complex<long double>;

inline constexpr long double pi_l = 3.141592653589793238462643383279502884L;
inline constexpr long double gamma_l = 0.577215664901532860606512090082402431L;

/// K_m(x) = int_0^inf exp(-x cosh t) cosh(m t) dt by the trapezoid rule.
/// For this analytic, rapidly decaying integrand the rule converges
/// exponentially in 1/h. With scaled = true returns e^x K_m(x).
inline long double bessel_k_quadrature(int m, long double x, bool scaled = false, long double h = 0.02L)
{
    const long double shift = scaled ? x : 0.0L;
    // stop once the integrand is below e^-60 relative to the peak
    const long double t_max = std::acosh(1.0L + (60.0L + 2.0L * std::abs(m) * 40.0L) / x) + 1.0L;
    long double sum = 0.5L * std::exp(-x + shift);
    for (long double t = h; t <= t_max; t += h) {
        sum += std::exp(-x * std::cosh(t) + shift) * std::cosh(m * t);
    }
    return sum * h;
}

/// Large-x asymptotic series of e^x K_nu(x) (Abramowitz & Stegun 9.7.2).
inline long double bessel_k_scaled_asymptotic(int nu, long double x, int terms = 12)
{
    const long double mu = 4.0L * nu * nu;
    long double term = 1.0L;
    long double sum = 1.0L;
    for (int k = 1; k < terms; ++k) {
        term *= (mu - (2.0L * k - 1.0L) * (2.0L * k - 1.0L)) / (k * 8.0L * x);
        sum += term;
    }
    return std::sqrt(pi_l / (2.0L * x)) * sum;
}

inline long double digamma_int(int n)  // psi(n) for n >= 1
{
    long double s = -gamma_l;
    for (int k = 1; k < n; ++k) {
        s += 1.0L / k;
    }
    return s;
}

/// J_n(z) from the ascending series, n >= 0.
inline cld bessel_j_series(int n, cld z)
{
    const cld q = -z * z / 4.0L;
    cld term = std::pow(z / 2.0L, n);
    for (int k = 1; k <= n; ++k) {
        term /= static_cast<long double>(k);
    }
    cld sum = term;
    for (int k = 1; k < 200; ++k) {
        term *= q / static_cast<long double>(k * (n + k));
        sum += term;
        if (std::abs(term) < 1e-24L * std::abs(sum)) {
            break;
        }
    }
    return sum;
}

/// Y_n(z) from the ascending series with the principal logarithm, n >= 0.
inline cld bessel_y_series(int n, cld z)
{
    const cld half = z / 2.0L;
    cld finite = 0.0L;
    for (int k = 0; k < n; ++k) {
        long double c = 1.0L;
        for (int j = 1; j <= n - k - 1; ++j) {
            c *= j;
        }
        for (int j = 1; j <= k; ++j) {
            c /= j;
        }
        finite += c * std::pow(half, 2 * k - n);
    }
    const cld q = -z * z / 4.0L;
    cld term = std::pow(half, n);
    for (int k = 1; k <= n; ++k) {
        term /= static_cast<long double>(k);
    }
    cld tail = 0.0L;
    for (int k = 0; k < 200; ++k) {
        if (k > 0) {
            term *= q / static_cast<long double>(k * (n + k));
        }
        const cld add = (digamma_int(k + 1) + digamma_int(n + k + 1)) * term;
        tail += add;
        if (k > 4 && std::abs(add) < 1e-24L * std::abs(tail)) {
            break;
        }
    }
    return -finite / pi_l + (2.0L / pi_l) * std::log(half) * bessel_j_series(n, z) - tail / pi_l;
}

/// H^(1)_n(z) = J_n + i Y_n for any integer n.
inline cld hankel1(int n, cld z)
{
    const int an = std::abs(n);
    const cld h = bessel_j_series(an, z) + cld(0.0L, 1.0L) * bessel_y_series(an, z);
    return (n < 0 && an % 2 == 1) ? -h : h;
}

/// cot(delta_m(k)) - i at complex momentum k from the effective-range forms.
inline cld cot_delta_minus_i(int m, cld k, long double inv_a1, long double a0)
{
    const cld i(0.0L, 1.0L);
    if (m == 0) {
        return (2.0L / pi_l) * (gamma_l + std::log(k * a0 / 2.0L)) - i;
    }
    return (2.0L / pi_l) * (-inv_a1 / (k * k) + std::log(k)) - i;
}

inline cld det_complex(std::vector<std::vector<cld>> a)
{
    const std::size_t n = a.size();
    cld det = 1.0L;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        for (std::size_t r = c + 1; r < n; ++r) {
            if (std::abs(a[r][c]) > std::abs(a[p][c])) {
                p = r;
            }
        }
        if (std::abs(a[p][c]) == 0.0L) {
            return 0.0L;
        }
        if (p != c) {
            std::swap(a[p], a[c]);
            det = -det;
        }
        det *= a[c][c];
        for (std::size_t r = c + 1; r < n; ++r) {
            const cld l = a[r][c] / a[c][c];
            for (std::size_t j = c; j < n; ++j) {
                a[r][j] -= l * a[c][j];
            }
        }
    }
    return det;
}

/**
 * Determinant of the original complex system
 *   C+_m + i pi T_m sum H_{m-m'}(i kappa R) C-_{m'} = 0
 *   C-_m + i pi T_m sum H_{m'-m}(i kappa R) C+_{m'} = 0
 * with |m| <= 1 and T_m = -(1/pi) / (cot delta_m - i).
 */
inline cld full_system_det(long double kappa, long double rho, long double inv_a1, long double a0)
{
    const int mm = 1;
    const int n = 2 * mm + 1;
    const cld i(0.0L, 1.0L);
    const cld k = i * kappa;
    std::vector<std::vector<cld>> a(2 * n, std::vector<cld>(2 * n, 0.0L));
    for (int m = -mm; m <= mm; ++m) {
        const cld t = -(1.0L / pi_l) / cot_delta_minus_i(m, k, inv_a1, a0);
        const auto r = static_cast<std::size_t>(m + mm);
        a[r][r] = 1.0L;
        a[n + r][n + r] = 1.0L;
        for (int mp = -mm; mp <= mm; ++mp) {
            const auto c = static_cast<std::size_t>(mp + mm);
            a[r][n + c] = i * pi_l * t * hankel1(m - mp, i * kappa * rho);
            a[n + r][c] = i * pi_l * t * hankel1(mp - m, i * kappa * rho);
        }
    }
    return det_complex(a);
}

/// Product of the row factors 1/(2 T_m) the library applies to |m| <= 1 rows.
inline cld row_scaling(long double kappa, long double inv_a1, long double a0)
{
    const cld k(0.0L, kappa);
    cld s = 1.0L;
    for (int m = -1; m <= 1; ++m) {
        const cld t = -(1.0L / pi_l) / cot_delta_minus_i(m, k, inv_a1, a0);
        s *= 1.0L / (4.0L * t * t);
    }
    return s;
}

/**
 * Bound-state condition for v = -V0 on (rho_wall, 1), 0 beyond, with chi(rho_wall) = 0,
 * in the radial equation chi'' + chi'/rho + beta (E - v) chi = 0.
 * Returns log-derivative mismatch at rho = 1; zero at an eigenvalue.
 */
inline double square_well_mismatch(double energy, double v0, double beta, double rho_wall)
{
    const double q = std::sqrt(beta * (energy + v0));
    const double kappa = std::sqrt(-beta * energy);
    const double j0w = std::cyl_bessel_j(0.0, q * rho_wall);
    const double y0w = std::cyl_neumann(0.0, q * rho_wall);
    const double inner = std::cyl_bessel_j(0.0, q) * y0w - std::cyl_neumann(0.0, q) * j0w;
    const double inner_d = q * (-std::cyl_bessel_j(1.0, q) * y0w + std::cyl_neumann(1.0, q) * j0w);
    const double outer = std::cyl_bessel_k(0.0, kappa);
    const double outer_d = -kappa * std::cyl_bessel_k(1.0, kappa);
    return inner_d * outer - outer_d * inner;
}

/// Plain bisection for oracle root finding.
inline double bisect(const std::function<double(double)>& f, double lo, double hi, int iters = 200)
{
    double flo = f(lo);
    for (int i = 0; i < iters; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace oracle
