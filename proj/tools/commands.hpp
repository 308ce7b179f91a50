#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "artifacts.hpp"
#include "config.hpp"
#include "qcs/qcs.hpp"

namespace qcs::cli {

/// Raised when a run finishes but some results did not meet their checks.
class NumericalFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunContext {
    RunConfig cfg;
    fs::path dir;
    std::vector<fs::path> outputs;
    std::vector<std::string> diagnostics;

    unsigned workers() const
    {
        const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
        return cfg.threads == 0 ? hw : cfg.threads;
    }
};

/// Evaluate make_row over [0, n) in blocks on worker threads; emit writes
/// the rows of each block in index order before the next block starts.
template <class T>
void blocked_map(std::size_t n, unsigned workers, const std::function<T(std::size_t)>& make_row,
                 const std::function<void(std::size_t, const T&)>& emit, std::size_t block = 64)
{
    std::vector<T> buf;
    for (std::size_t start = 0; start < n; start += block) {
        const std::size_t len = std::min(block, n - start);
        buf.assign(len, T{});
        const unsigned nt = std::min<unsigned>(workers, static_cast<unsigned>(len));
        if (nt <= 1) {
            for (std::size_t i = 0; i < len; ++i) {
                buf[i] = make_row(start + i);
            }
        } else {
            std::vector<std::thread> pool;
            std::vector<std::exception_ptr> errors(nt);
            for (unsigned t = 0; t < nt; ++t) {
                pool.emplace_back([&, t] {
                    try {
                        for (std::size_t i = t; i < len; i += nt) {
                            buf[i] = make_row(start + i);
                        }
                    } catch (...) {
                        errors[t] = std::current_exception();
                    }
                });
            }
            for (std::thread& th : pool) {
                th.join();
            }
            for (const auto& e : errors) {
                if (e) {
                    std::rethrow_exception(e);
                }
            }
        }
        for (std::size_t i = 0; i < len; ++i) {
            emit(start + i, buf[i]);
        }
    }
}

// ---------------------------------------------------------------------------

inline void cmd_potential(RunContext& ctx)
{
    const ModelParams& p = ctx.cfg.params;
    const PotentialBlock& b = ctx.cfg.potential;
    const double hi = b.rho_max ? *b.rho_max : default_tabulation_range(p).second;
    if (hi <= b.rho_min) {
        throw ConfigError("potential: rho_max must exceed rho_min");
    }
    const auto grid = log_grid(b.rho_min, hi, points_for_density(b.rho_min, hi, b.points_per_decade));
    RootScanOptions scan;
    scan.points = b.xi_points;
    spdlog::info("potential: {} points on [{}, {}]", grid.size(), b.rho_min, hi);

    TableWriter out(ctx.dir / "potential",
                    {"rho", "v_branchI_plus", "v_branchI_minus", "v_branchII_plus", "v_branchII_minus", "v_I0_asympt",
                     "v_II0_asympt", "v_asympt"},
                    ctx.cfg.format);
    struct Result {
        Row row;
        std::vector<std::string> notes;
    };
    blocked_map<Result>(
        grid.size(), ctx.workers(),
        [&](std::size_t i) {
            Result r;
            r.row.push_back(grid[i]);
            for (PotentialKind k : all_potential_kinds) {
                const PotentialPoint pt = evaluate_potential(k, grid[i], p, scan);
                if (!pt.converged) {
                    r.notes.push_back(fmt::format("rho={} kind={} residual={} not converged", format_number(grid[i]),
                                                  to_string(k), format_number(pt.residual)));
                }
                r.row.push_back(pt.v ? Cell(*pt.v) : Cell());
            }
            return r;
        },
        [&](std::size_t, const Result& r) {
            out.write(r.row);
            ctx.diagnostics.insert(ctx.diagnostics.end(), r.notes.begin(), r.notes.end());
        });
    out.flush();
    ctx.outputs.push_back(out.close());
    if (!ctx.diagnostics.empty()) {
        throw NumericalFailure(fmt::format("potential: {} root searches did not converge", ctx.diagnostics.size()));
    }
}

// ---------------------------------------------------------------------------

template <RadialPotential P>
void spectrum_with(RunContext& ctx, const P& v)
{
    const ModelParams& p = ctx.cfg.params;
    const SpectrumBlock& b = ctx.cfg.spectrum;
    NumerovOptions opt;
    opt.rho_min = b.rho_min;
    opt.rho_max = b.rho_max;
    opt.points = b.points;
    const BoundSpectrum num = numerov_spectrum(v, p.beta, b.n_max, opt);
    spdlog::info("spectrum: {} Numerov levels below threshold", num.levels.size());

    TableWriter out(ctx.dir / "spectrum", {"n", "E_wkb", "E_numerov", "R_n"}, ctx.cfg.format);
    std::vector<BoundLevel> wkb_levels;
    for (int n = b.n_min; n <= b.n_max; ++n) {
        Row row{static_cast<long>(n)};
        Cell r_n;
        try {
            const BoundSpectrum w = wkb_spectrum(p, n, n, PotentialKind::asympt_V);
            row.push_back(w.levels.front().energy);
            r_n = w.levels.front().outer_turning_point;
            wkb_levels.push_back(w.levels.front());
        } catch (const LevelNotSupported& e) {
            spdlog::debug("spectrum: {}", e.what());
            row.emplace_back();
        }
        const auto it = std::find_if(num.levels.begin(), num.levels.end(), [n](const BoundLevel& l) { return l.n == n; });
        row.push_back(it != num.levels.end() ? Cell(it->energy) : Cell());
        row.push_back(r_n);
        out.write(row);
    }
    ctx.outputs.push_back(out.close());

    std::vector<BoundLevel> fit_levels;
    for (const BoundLevel& l : num.levels) {
        if (l.n >= b.fit_n_min) {
            fit_levels.push_back(l);
        }
    }
    std::vector<BoundLevel> wkb_fit_levels;
    for (const BoundLevel& l : wkb_levels) {
        if (l.n >= b.fit_n_min) {
            wkb_fit_levels.push_back(l);
        }
    }
    const double theory = pi * pi / (2.0 * p.beta);
    json summary = {{"slope_theory", json_number(theory)},
                    {"fit_levels", {b.fit_n_min, b.n_max}},
                    {"numerov_levels_found", num.levels.size()}};
    if (fit_levels.size() >= 4) {
        const SpectrumFit f = fit_spectrum_model(fit_levels);
        summary["E0_fit"] = json_number(f.e0);
        summary["slope_fit"] = json_number(f.slope);
        summary["slope_ratio"] = json_number(f.slope / theory);
        summary["r_squared"] = json_number(f.r_squared);
    } else {
        summary["E0_fit"] = nullptr;
        summary["slope_fit"] = nullptr;
        summary["slope_ratio"] = nullptr;
        summary["r_squared"] = nullptr;
        spdlog::warn("spectrum: {} levels with n >= {}, need 4 for the fit", fit_levels.size(), b.fit_n_min);
    }
    summary["wkb_slope_fit"] =
        wkb_fit_levels.size() >= 4 ? json_number(fit_spectrum_model(wkb_fit_levels).slope) : json(nullptr);
    summary["n0_estimate"] = json_number(n0_estimate(p));
    summary["numerov_node_count"] = zero_energy_node_count(v, p.beta, opt);
    ctx.outputs.push_back(write_json(ctx.dir / "spectrum_summary.json", summary));
}

inline void cmd_spectrum(RunContext& ctx)
{
    const ModelParams& p = ctx.cfg.params;
    if (p.on_resonance()) {
        spectrum_with(ctx, AsymptoticPotential{});
    } else {
        // beyond R1 the molecule is bound and the three-body attraction is gone
        spectrum_with(ctx, truncate(AsymptoticPotential{}, range_r1_scale(p).numeric));
    }
}

// ---------------------------------------------------------------------------

inline void cmd_scattering(RunContext& ctx)
{
    const ModelParams& p = ctx.cfg.params;
    const ScatteringBlock& b = ctx.cfg.scattering;
    const auto grid = log_grid(b.a1_min, b.a1_max, b.points);
    const ScatteringObservables obs = resonance_scan(p, grid);

    TableWriter out(ctx.dir / "scattering", {"a1", "N0", "A0", "is_pole"}, ctx.cfg.format);
    for (std::size_t i = 0; i < obs.rows.size(); ++i) {
        const ScanRow& r = obs.rows[i];
        out.write({r.a1, r.n0, r.a_molecule ? Cell(*r.a_molecule) : Cell(), r.is_pole});
        if (i % 256 == 255) {
            out.flush();
        }
    }
    ctx.outputs.push_back(out.close());

    json poles = json::array();
    for (const Resonance& r : obs.resonances) {
        poles.push_back({{"n", r.n}, {"a1", json_number(r.a1)}, {"a1_asymptotic", json_number(r.a1_asymptotic)}});
    }
    std::size_t expected = 0;
    for (int n = 1;; ++n) {
        const double a1n = resonance_positions(p, {n}).front().a1;
        if (a1n > b.a1_max) {
            break;
        }
        expected += a1n > b.a1_min ? 1 : 0;
    }
    const json summary = {{"beta", json_number(p.beta)},
                          {"pole_count", obs.resonances.size()},
                          {"expected_pole_count", expected},
                          {"resonances", poles}};
    ctx.outputs.push_back(write_json(ctx.dir / "scattering_summary.json", summary));
    if (obs.resonances.size() != expected) {
        ctx.diagnostics.push_back(fmt::format("scan found {} poles, expected {}", obs.resonances.size(), expected));
        throw NumericalFailure("scattering: pole count does not match the resonance positions");
    }
}

// ---------------------------------------------------------------------------

inline constexpr double detcheck_threshold = 1e-8;

inline void cmd_detcheck(RunContext& ctx)
{
    const ModelParams& p = ctx.cfg.params;
    const DetcheckBlock& b = ctx.cfg.detcheck;
    const std::vector<double> grid =
        b.points == 1 || b.rho_max == b.rho_min ? std::vector<double>{b.rho_min} : log_grid(b.rho_min, b.rho_max, b.points);

    struct Block {
        Sector sector;
        Reflection refl;
        const char* label;
    };
    const Block blocks[] = {{Sector::symmetric, Reflection::odd, "symmetric_odd"},
                            {Sector::symmetric, Reflection::even, "symmetric_even"},
                            {Sector::antisymmetric, Reflection::odd, "antisymmetric_odd"},
                            {Sector::antisymmetric, Reflection::even, "antisymmetric_even"}};

    struct Result {
        std::vector<Row> rows;
        std::vector<std::string> mismatches;
        double worst = 0.0;
        std::size_t checked = 0;
    };

    TableWriter out(ctx.dir / "detcheck", {"rho", "sector", "m_max", "xi_root", "xi_branch", "rel_diff"},
                    ctx.cfg.format);
    double worst = 0.0;
    std::size_t checked = 0;
    std::vector<std::string> mismatches;
    blocked_map<Result>(
        grid.size(), ctx.workers(),
        [&](std::size_t i) {
            Result r;
            const double rho = grid[i];
            for (int m : b.m_max) {
                for (const Block& blk : blocks) {
                    const auto det = find_det_roots(rho, p, m, blk.sector, blk.refl);
                    const auto br = solve_branch(reflection_branch(blk.refl), sector_sign(blk.sector), rho, p);
                    const bool exact = m == 1;
                    if (exact && det.size() != br.size()) {
                        r.mismatches.push_back(fmt::format("rho={} {}: {} determinant roots, {} branch roots",
                                                           format_number(rho), blk.label, det.size(), br.size()));
                    }
                    for (const DetRoot& d : det) {
                        const BranchRoot* best = nullptr;
                        double best_rel = std::numeric_limits<double>::infinity();
                        for (const BranchRoot& c : br) {
                            const double rd = std::abs(d.xi - c.xi) / c.xi;
                            if (rd < best_rel) {
                                best_rel = rd;
                                best = &c;
                            }
                        }
                        if (best) {
                            r.rows.push_back({rho, std::string(blk.label), static_cast<long>(m), d.xi, best->xi, best_rel});
                        } else {
                            r.rows.push_back({rho, std::string(blk.label), static_cast<long>(m), d.xi, Cell(), Cell()});
                        }
                        if (exact) {
                            ++r.checked;
                            r.worst = std::max(r.worst, best_rel);
                            if (!(best_rel < detcheck_threshold)) {
                                r.mismatches.push_back(fmt::format("rho={} {}: xi={} rel_diff={}", format_number(rho),
                                                                   blk.label, format_number(d.xi),
                                                                   format_number(best_rel)));
                            }
                        }
                    }
                }
            }
            return r;
        },
        [&](std::size_t, const Result& r) {
            for (const Row& row : r.rows) {
                out.write(row);
            }
            worst = std::max(worst, r.worst);
            checked += r.checked;
            mismatches.insert(mismatches.end(), r.mismatches.begin(), r.mismatches.end());
        },
        8);
    ctx.outputs.push_back(out.close());

    const bool pass = mismatches.empty() && checked > 0;
    const json summary = {{"threshold", detcheck_threshold},
                          {"m_max_checked", 1},
                          {"roots_checked", checked},
                          {"max_rel_diff", json_number(worst)},
                          {"mismatches", mismatches.size()},
                          {"pass", pass}};
    ctx.outputs.push_back(write_json(ctx.dir / "detcheck_summary.json", summary));
    spdlog::info("detcheck: {} roots, max rel diff {}", checked, worst);
    if (!pass) {
        ctx.diagnostics = mismatches;
        throw NumericalFailure("detcheck: determinant and branch roots disagree");
    }
}

} // namespace qcs::cli
