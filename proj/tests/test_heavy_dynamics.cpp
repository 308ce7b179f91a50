#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "qcs/heavy_dynamics.hpp"

namespace {

using qcs::AsymptoticPotential;
using qcs::BoundLevel;
using qcs::ModelParams;
using qcs::NumerovOptions;
using qcs::PotentialKind;

constexpr double pi = 3.141592653589793;

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

std::vector<BoundLevel> tail(const qcs::BoundSpectrum& s, int n_from)
{
    std::vector<BoundLevel> out;
    for (const BoundLevel& l : s.levels) {
        if (l.n >= n_from) {
            out.push_back(l);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// spectrum model and level-count estimate

TEST(SpectrumFit, RecoversExactModel)
{
    const double beta = 20.0;
    const double e0 = 3.0;
    std::vector<BoundLevel> levels;
    for (int n = 3; n <= 9; ++n) {
        const double n2 = static_cast<double>(n * n);
        levels.push_back({n, -e0 / n2 * std::exp(-(pi * pi / (2.0 * beta)) * n2), 0.0});
    }
    const qcs::SpectrumFit f = qcs::fit_spectrum_model(levels);
    EXPECT_NEAR(f.slope, pi * pi / 40.0, 1e-12);
    EXPECT_NEAR(f.slope, 0.2467, 1e-4);
    EXPECT_NEAR(f.e0, 3.0, 1e-11);
    EXPECT_NEAR(f.r_squared, 1.0, 1e-12);
}

TEST(SpectrumFit, NeedsFourLevels)
{
    std::vector<BoundLevel> levels = {{1, -1.0, 0.0}, {2, -0.1, 0.0}, {3, -0.01, 0.0}};
    EXPECT_THROW(qcs::fit_spectrum_model(levels), qcs::InsufficientLevels);
}

TEST(LevelCount, Estimate)
{
    const ModelParams p = ModelParams::from_beta(10.0, 1e-6);
    EXPECT_NEAR(qcs::n0_estimate(p), 5.156, 1e-3);
    EXPECT_NEAR(qcs::n0_estimate(p), std::sqrt(20.0 * std::log(5e5)) / pi, 1e-14);
    const ModelParams q = ModelParams::from_beta(40.0, 1e-6);
    EXPECT_NEAR(qcs::n0_estimate(q) / qcs::n0_estimate(p), 2.0, 1e-12);
    EXPECT_EQ(qcs::n0_estimate(ModelParams::from_beta(10.0, 0.5)), 0.0);
    EXPECT_TRUE(std::isinf(qcs::n0_estimate(ModelParams::from_beta(10.0))));
    EXPECT_THROW(qcs::n0_estimate(ModelParams::from_beta(10.0, 1.0)), qcs::DomainError);
    // direct evaluation at a1 = 1e3 gives 3.549
    EXPECT_NEAR(qcs::n0_estimate(ModelParams::from_beta(10.0, 1e-3)), 3.549, 1e-3);
}

// ---------------------------------------------------------------------------
// WKB

TEST(WkbClosed, PhaseValues)
{
    EXPECT_DOUBLE_EQ(qcs::wkb_phase_closed(7.0, 7.0, 20.0, 0.3), 0.3);
    EXPECT_NEAR(qcs::wkb_phase_closed(1.0 + 1e-15, std::exp(1.0), 20.0, 0.0), 2.0 * std::sqrt(20.0), 1e-6);
    EXPECT_NEAR(2.0 * std::sqrt(20.0), 8.944, 1e-3);
    EXPECT_THROW(qcs::wkb_phase_closed(1.0, 5.0, 20.0, 0.0), qcs::DomainError);
    EXPECT_THROW(qcs::wkb_phase_closed(5.0, 4.0, 20.0, 0.0), qcs::DomainError);
}

TEST(WkbClosed, QuantizationInversion)
{
    for (int n = 1; n <= 8; ++n) {
        const double r = qcs::wkb_closed_turning_point(n, 20.0, 0.0);
        EXPECT_NEAR(r, std::exp(pi * pi * n * n / 80.0), 1e-12 * r);
        EXPECT_NEAR(qcs::wkb_phase_closed(1.0 + 1e-15, r, 20.0, 0.0), pi * n, 1e-6);
    }
}

TEST(WkbSpectrum, ClosedChainLevels)
{
    const qcs::BoundSpectrum s = qcs::wkb_spectrum(ModelParams::from_beta(20.0), 4, 8, PotentialKind::asympt_V);
    EXPECT_EQ(s.method, qcs::SpectrumMethod::wkb_closed);
    ASSERT_EQ(s.levels.size(), 5u);
    EXPECT_NEAR(s.levels[0].outer_turning_point, 7.199, 1e-3);
    EXPECT_NEAR(s.levels[0].energy, -9.78e-3, 1e-5);
    ASSERT_TRUE(s.fit.has_value());
    EXPECT_NEAR(s.fit->slope, pi * pi / 40.0, 1e-10);
    EXPECT_NEAR(s.fit->e0, 4.0 * 20.0 / (pi * pi), 1e-9);
    // Gaussian-cut-off Coulomb series: E_n n^2 exp(pi^2 n^2 / (2 beta)) is constant
    for (const BoundLevel& l : s.levels) {
        const double n2 = static_cast<double>(l.n * l.n);
        EXPECT_NEAR(l.energy * n2 * std::exp(pi * pi * n2 / 40.0), -80.0 / (pi * pi), 1e-10);
    }
}

TEST(WkbSpectrum, LevelsBeyondRangeUnsupported)
{
    const ModelParams p = ModelParams::from_beta(10.0, 1e-6);
    EXPECT_NO_THROW(qcs::wkb_spectrum(p, 1, 5, PotentialKind::asympt_V));
    EXPECT_THROW(qcs::wkb_spectrum(p, 1, 6, PotentialKind::asympt_V), qcs::LevelNotSupported);
    EXPECT_THROW(qcs::wkb_spectrum(p, 3, 2, PotentialKind::asympt_V), qcs::DomainError);
}

TEST(WkbSpectrum, QuadratureOnTabulatedCurve)
{
    qcs::WkbOptions opt;
    opt.per_decade = 64.0;
    const qcs::BoundSpectrum s = qcs::wkb_spectrum(ModelParams::from_beta(20.0), 2, 5, PotentialKind::branch_I_plus, opt);
    EXPECT_EQ(s.method, qcs::SpectrumMethod::wkb_quadrature);
    ASSERT_EQ(s.levels.size(), 4u);
    for (std::size_t i = 1; i < s.levels.size(); ++i) {
        EXPECT_GT(s.levels[i].energy, s.levels[i - 1].energy);
        EXPECT_GT(s.levels[i].outer_turning_point, s.levels[i - 1].outer_turning_point);
    }
}

TEST(WkbQuadrature, EmptyIntervalGivesPhaseOffset)
{
    const AsymptoticPotential v;
    EXPECT_EQ(qcs::wkb_phase_quadrature(v(30.0), 30.0, v, 20.0, 0.7), 0.7);
    EXPECT_THROW(qcs::wkb_phase_quadrature(v(30.0), 40.0, v, 20.0, 0.7), qcs::NoTurningPoint);
    EXPECT_THROW(qcs::wkb_phase_quadrature(0.0, 2.0, v, 20.0, 0.0), qcs::NoTurningPoint);
}

TEST(WkbQuadrature, ScalesWithSqrtBeta)
{
    const AsymptoticPotential v;
    const double e = v(500.0);
    const double a = qcs::wkb_phase_quadrature(e, 3.0, v, 5.0, 0.0);
    const double b = qcs::wkb_phase_quadrature(e, 3.0, v, 20.0, 0.0);
    EXPECT_NEAR(b / a, 2.0, 1e-9);
}

// Near threshold the phase follows the closed form up to the energy term
// sqrt(beta) (ln 2 - 1) / sqrt(ln R_E), which vanishes only logarithmically.
TEST(WkbQuadrature, ApproachesClosedForm)
{
    const AsymptoticPotential v;
    const double beta = 20.0;
    const double r = 2.0;
    const double r_e = 1e6;
    const double quad = qcs::wkb_phase_quadrature(v(r_e), r, v, beta, 0.0);
    const double closed = qcs::wkb_phase_closed(r, r_e, beta, 0.0);
    EXPECT_LT(rel(quad, closed), 0.02);
    const double corrected = closed + std::sqrt(beta) * (std::log(2.0) - 1.0) / std::sqrt(std::log(r_e));
    EXPECT_LT(rel(quad, corrected), 2e-3);
}

TEST(WkbQuadrature, PhaseIsAdditive)
{
    const AsymptoticPotential v;
    const double e = v(1e4);
    const double a = qcs::wkb_action(v, 20.0, e, 1.5, 40.0);
    const double b = qcs::wkb_action(v, 20.0, e, 40.0, 1e4);
    const double c = qcs::wkb_action(v, 20.0, e, 1.5, 1e4);
    EXPECT_NEAR(a + b, c, 1e-8);
}

TEST(WkbQuadrature, TurningPointConsistency)
{
    const AsymptoticPotential v;
    for (double e : {-1.0, -1e-3, -1e-8, -1e-14}) {
        const double r = qcs::outer_turning_point(v, e, 1.0 + 1e-9);
        EXPECT_LT(rel(v(r), e), 1e-10) << e;
    }
}

// ---------------------------------------------------------------------------
// Numerov

TEST(Numerov, FreeMotionHasNoNodes)
{
    auto zero = [](double) { return 0.0; };
    const qcs::RadialSolution s = qcs::numerov_integrate(zero, 10.0, -0.5, 0.1, 100.0, 5000);
    EXPECT_EQ(s.node_count, 0);
    EXPECT_EQ(s.grid.size(), s.u_values.size());
    EXPECT_EQ(s.u_values.front(), 0.0);
}

TEST(Numerov, NodeCountMatchesStoredSolution)
{
    const AsymptoticPotential v;
    for (double e : {-1.0, -1e-3, -1e-6}) {
        const qcs::RadialSolution s = qcs::numerov_integrate(v, 20.0, e, 0.5, 1e6, 30000);
        int changes = 0;
        double last = 0.0;
        for (std::size_t i = 1; i < s.u_values.size(); ++i) {
            const double u = s.u_values[i];
            if (u != 0.0) {
                if (last != 0.0 && (u < 0.0) != (last < 0.0)) {
                    ++changes;
                }
                last = u;
            }
        }
        EXPECT_EQ(s.node_count, changes);
        EXPECT_GT(s.node_count, 0);
    }
}

TEST(Numerov, RejectsCoarseGrid)
{
    auto well = [](double rho) { return rho < 1.0 ? -1e6 : 0.0; };
    EXPECT_THROW(qcs::numerov_integrate(well, 1.0, -1.0, 0.1, 10.0, 100), qcs::GridTooCoarse);
    EXPECT_THROW(qcs::numerov_integrate(well, 1.0, 1.0, 0.1, 10.0, 1000), qcs::DomainError);
    EXPECT_THROW(qcs::numerov_integrate(well, 1.0, -1.0, 0.01, 10.0, 1000), qcs::DomainError);
}

TEST(Numerov, SquareWellMatchesAnalyticCondition)
{
    const double beta = 1.0;
    const double v0 = 20.0;
    const double wall = 0.1;
    // rho = 1 must be a grid node: ln(1000 / 0.1) spans four times ln(1 / 0.1)
    auto well = [&](double rho) {
        if (std::abs(rho - 1.0) < 1e-9) {
            return -0.5 * v0;
        }
        return rho < 1.0 ? -v0 : 0.0;
    };
    NumerovOptions opt;
    opt.rho_min = wall;
    opt.rho_max = 1000.0;
    opt.points = 80001;
    const qcs::BoundSpectrum s = qcs::numerov_spectrum(well, beta, 3, opt);
    ASSERT_GE(s.levels.size(), 1u);

    auto mismatch = [&](double e) { return oracle::square_well_mismatch(e, v0, beta, wall); };
    std::vector<double> roots;
    double prev_e = -v0 + 1e-9;
    double prev_f = mismatch(prev_e);
    for (int i = 1; i <= 20000 && roots.size() < s.levels.size(); ++i) {
        const double e = -v0 + v0 * i / 20000.0 - 1e-12;
        const double f = mismatch(e);
        if ((f < 0.0) != (prev_f < 0.0) && std::isfinite(f) && std::isfinite(prev_f)) {
            roots.push_back(oracle::bisect(mismatch, prev_e, e));
        }
        prev_e = e;
        prev_f = f;
    }
    ASSERT_EQ(roots.size(), s.levels.size());
    for (std::size_t i = 0; i < roots.size(); ++i) {
        EXPECT_LT(rel(s.levels[i].energy, roots[i]), 1e-6) << "level " << i + 1;
    }
}

class QuasiCoulomb : public ::testing::Test {
protected:
    static void SetUpTestSuite()
    {
        spectrum_ = new qcs::BoundSpectrum(qcs::numerov_spectrum(AsymptoticPotential{}, 20.0, 8));
    }
    static void TearDownTestSuite()
    {
        delete spectrum_;
        spectrum_ = nullptr;
    }
    static qcs::BoundSpectrum* spectrum_;
};

qcs::BoundSpectrum* QuasiCoulomb::spectrum_ = nullptr;

TEST_F(QuasiCoulomb, LevelsOrderedBelowThreshold)
{
    ASSERT_EQ(spectrum_->levels.size(), 8u);
    for (std::size_t i = 0; i < spectrum_->levels.size(); ++i) {
        const BoundLevel& l = spectrum_->levels[i];
        EXPECT_EQ(l.n, static_cast<int>(i) + 1);
        EXPECT_LT(l.energy, 0.0);
        if (i > 0) {
            EXPECT_GT(l.energy, spectrum_->levels[i - 1].energy);
        }
        EXPECT_LT(rel(qcs::v_asympt(l.outer_turning_point), l.energy), 1e-10);
    }
}

TEST_F(QuasiCoulomb, GaussianCutoffSlope)
{
    const qcs::SpectrumFit f = qcs::fit_spectrum_model(tail(*spectrum_, 4));
    EXPECT_NEAR(f.slope / (pi * pi / 40.0), 1.0, 0.15);
    EXPECT_GT(f.r_squared, 0.9999);
}

TEST_F(QuasiCoulomb, NodeTheorem)
{
    const AsymptoticPotential v;
    const auto& lv = spectrum_->levels;
    for (std::size_t i = 0; i + 1 < lv.size(); ++i) {
        const double e = -std::sqrt(lv[i].energy * lv[i + 1].energy);
        const qcs::RadialSolution s = qcs::numerov_integrate(v, 20.0, e, 0.5, 1e7, 40000);
        EXPECT_EQ(s.node_count, static_cast<int>(i) + 1);
    }
}

TEST_F(QuasiCoulomb, ConvergedInGridSpacing)
{
    NumerovOptions fine;
    fine.points = 80000;
    const qcs::BoundSpectrum s = qcs::numerov_spectrum(AsymptoticPotential{}, 20.0, 8, fine);
    ASSERT_EQ(s.levels.size(), spectrum_->levels.size());
    for (std::size_t i = 0; i < s.levels.size(); ++i) {
        EXPECT_LT(rel(s.levels[i].energy, spectrum_->levels[i].energy), 1e-6) << "n=" << i + 1;
    }
}

TEST_F(QuasiCoulomb, InnerWallBelowCoulombCentreIsInert)
{
    for (double rho_min : {0.1, 1.0}) {
        NumerovOptions opt;
        opt.rho_min = rho_min;
        const qcs::BoundSpectrum s = qcs::numerov_spectrum(AsymptoticPotential{}, 20.0, 8, opt);
        const qcs::SpectrumFit f = qcs::fit_spectrum_model(tail(s, 4));
        EXPECT_NEAR(f.slope / (pi * pi / 40.0), 1.0, 0.15);
        EXPECT_LT(rel(s.levels[5].energy, spectrum_->levels[5].energy), 1e-6);
    }
}

TEST_F(QuasiCoulomb, WkbWithCalibratedPhaseTracksNumerov)
{
    const double beta = 20.0;
    const AsymptoticPotential v;
    const double e3 = spectrum_->levels[2].energy;
    const double r3 = qcs::outer_turning_point(v, e3, 1.0 + 1e-9);
    const double theta = 3.0 * pi - 2.0 * std::sqrt(beta * std::log(r3));
    for (int n = 3; n <= 8; ++n) {
        const double e_wkb = qcs::v_asympt(qcs::wkb_closed_turning_point(n, beta, theta));
        const double e_num = spectrum_->levels[static_cast<std::size_t>(n - 1)].energy;
        EXPECT_LT(std::abs(e_wkb / e_num - 1.0), 0.5) << "n=" << n;
    }
}

// At E = 0 the equation in x = ln(rho) is chi'' + (beta / x) chi = 0 with the
// regular solution sqrt(x) J_1(2 sqrt(beta x)) and derivative sqrt(beta) J_0.
int analytic_zero_energy_count(double beta, double cutoff)
{
    const double z_edge = 2.0 * std::sqrt(beta * std::log(cutoff));
    int nodes = 0;
    double prev = std::cyl_bessel_j(1.0, 1e-6);
    const int steps = 200000;
    for (int i = 1; i <= steps; ++i) {
        const double z = z_edge * i / steps;
        const double j = std::cyl_bessel_j(1.0, z);
        if ((j < 0.0) != (prev < 0.0)) {
            ++nodes;
        }
        prev = j;
    }
    if (std::cyl_bessel_j(1.0, z_edge) * std::cyl_bessel_j(0.0, z_edge) < 0.0) {
        ++nodes;
    }
    return nodes;
}

TEST(ZeroEnergy, CountMatchesBesselSolution)
{
    for (double beta : {5.0, 10.0, 20.0}) {
        for (double cutoff : {20.0, 64.56, 300.0, 2818.5, 1e5}) {
            const auto v = qcs::truncate(AsymptoticPotential{}, cutoff);
            EXPECT_EQ(qcs::zero_energy_node_count(v, beta), analytic_zero_energy_count(beta, cutoff))
                << "beta=" << beta << " cutoff=" << cutoff;
        }
    }
}

TEST(ZeroEnergy, CountNearEstimate)
{
    for (double a1 : {1e3, 1e6}) {
        const ModelParams p = ModelParams::from_beta(10.0, 1.0 / a1);
        const auto v = qcs::truncate(AsymptoticPotential{}, qcs::range_r1_scale(p).numeric);
        const int count = qcs::zero_energy_node_count(v, p.beta);
        EXPECT_LE(std::abs(count - std::lround(qcs::n0_estimate(p))), 1) << "a1=" << a1;
    }
}

TEST(ZeroEnergy, NumerovSpectrumRespectsCount)
{
    const ModelParams p = ModelParams::from_beta(10.0, 1e-6);
    const double r1 = qcs::range_r1_scale(p).numeric;
    const auto v = qcs::truncate(AsymptoticPotential{}, r1);
    const qcs::BoundSpectrum s = qcs::numerov_spectrum(v, p.beta, 20);
    EXPECT_EQ(static_cast<int>(s.levels.size()), qcs::zero_energy_node_count(v, p.beta));
    EXPECT_LE(static_cast<long>(s.levels.size()), std::lround(qcs::n0_estimate(p)) + 1);
}

} // namespace
