#pragma once

#include <cmath>
#include <cstddef>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qcs/truncated_system.hpp"
#include "qcs/twobody.hpp"

namespace qcs::cli {

using nlohmann::json;

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class OutputFormat { csv, json };

struct PotentialBlock {
    double rho_min = 1.0;
    std::optional<double> rho_max;  // empty: [1, 10 R1] off resonance, 1e8 on resonance
    double points_per_decade = 32.0;
    std::size_t xi_points = 2000;
};

struct SpectrumBlock {
    int n_min = 1;
    int n_max = 8;
    int fit_n_min = 4;
    double rho_min = 0.5;
    double rho_max = 1e7;
    std::size_t points = 40000;
};

struct ScatteringBlock {
    double a1_min = 10.0;
    double a1_max = 1e6;
    std::size_t points = 2000;
};

struct DetcheckBlock {
    double rho_min = 10.0;
    double rho_max = 1e4;
    std::size_t points = 20;
    std::vector<int> m_max = {1};
};

struct RunConfig {
    ModelParams params = ModelParams::from_alpha(0.1);
    PotentialBlock potential;
    SpectrumBlock spectrum;
    ScatteringBlock scattering;
    DetcheckBlock detcheck;
    std::string out_dir = "qcs_out";
    OutputFormat format = OutputFormat::csv;
    unsigned threads = 0;  // 0: hardware concurrency
};

/// Flag values that take precedence over the config file.
struct Overrides {
    std::optional<std::string> out_dir;
    std::optional<std::string> format;
    std::optional<unsigned> threads;
};

namespace detail {

inline void reject_unknown(const json& obj, const std::string& where, const std::set<std::string>& allowed)
{
    if (!obj.is_object()) {
        throw ConfigError(where + ": expected an object");
    }
    for (const auto& [key, value] : obj.items()) {
        if (!allowed.count(key)) {
            throw ConfigError(where + ": unknown key '" + key + "'");
        }
    }
}

inline double number(const json& obj, const std::string& where, const std::string& key, double fallback)
{
    if (!obj.contains(key)) {
        return fallback;
    }
    const json& v = obj.at(key);
    if (!v.is_number()) {
        throw ConfigError(where + "." + key + ": expected a number");
    }
    const double x = v.get<double>();
    if (!std::isfinite(x)) {
        throw ConfigError(where + "." + key + ": must be finite");
    }
    return x;
}

inline long integer(const json& obj, const std::string& where, const std::string& key, long fallback, long lo)
{
    if (!obj.contains(key)) {
        return fallback;
    }
    const json& v = obj.at(key);
    if (!v.is_number_integer()) {
        throw ConfigError(where + "." + key + ": expected an integer");
    }
    const long x = v.get<long>();
    if (x < lo) {
        throw ConfigError(where + "." + key + ": must be at least " + std::to_string(lo));
    }
    return x;
}

inline OutputFormat parse_format(const std::string& s)
{
    if (s == "csv") {
        return OutputFormat::csv;
    }
    if (s == "json") {
        return OutputFormat::json;
    }
    throw ConfigError("output format must be csv or json, got '" + s + "'");
}

inline ModelParams parse_params(const json& obj)
{
    reject_unknown(obj, "params", {"alpha", "beta", "a1", "a0", "r0", "theta0"});
    const ModelParams d = ModelParams::from_alpha(0.1);
    double inv_a1 = 0.0;
    if (obj.contains("a1")) {
        const json& a1 = obj.at("a1");
        if (a1.is_string() && a1.get<std::string>() == "inf") {
            inv_a1 = 0.0;
        } else if (a1.is_number() && a1.get<double>() > 0.0 && std::isfinite(a1.get<double>())) {
            inv_a1 = 1.0 / a1.get<double>();
        } else {
            throw ConfigError("params.a1: expected a positive number or \"inf\"");
        }
    }
    const double a0 = number(obj, "params", "a0", d.a0);
    const double r0 = number(obj, "params", "r0", d.r0);
    const double theta0 = number(obj, "params", "theta0", d.theta0);
    try {
        if (obj.contains("beta")) {
            const double beta = number(obj, "params", "beta", 0.0);
            ModelParams p = ModelParams::from_beta(beta, inv_a1, a0, r0, theta0);
            if (obj.contains("alpha")) {
                const double alpha = number(obj, "params", "alpha", 0.0);
                if (std::abs(alpha - p.alpha) > 1e-12 * p.alpha) {
                    throw ConfigError("params: alpha and beta are inconsistent");
                }
            }
            return p;
        }
        return ModelParams::from_alpha(number(obj, "params", "alpha", d.alpha), inv_a1, a0, r0, theta0);
    } catch (const DomainError& e) {
        throw ConfigError(std::string("params: ") + e.what());
    }
}

} // namespace detail

/// Build a RunConfig from parsed JSON; flags in ov win over file values.
inline RunConfig parse_config(const json& doc, const Overrides& ov = {})
{
    using namespace detail;
    RunConfig c;
    reject_unknown(doc, "config", {"params", "potential", "spectrum", "scattering", "detcheck", "output", "run"});

    if (doc.contains("params")) {
        c.params = parse_params(doc.at("params"));
    }
    if (doc.contains("potential")) {
        const json& b = doc.at("potential");
        reject_unknown(b, "potential", {"rho_min", "rho_max", "points_per_decade", "xi_points"});
        c.potential.rho_min = number(b, "potential", "rho_min", c.potential.rho_min);
        if (b.contains("rho_max")) {
            c.potential.rho_max = number(b, "potential", "rho_max", 0.0);
        }
        c.potential.points_per_decade = number(b, "potential", "points_per_decade", c.potential.points_per_decade);
        c.potential.xi_points = static_cast<std::size_t>(integer(b, "potential", "xi_points", 2000, 200));
        if (c.potential.rho_min <= 0.0 || (c.potential.rho_max && *c.potential.rho_max <= c.potential.rho_min)) {
            throw ConfigError("potential: need 0 < rho_min < rho_max");
        }
        if (c.potential.points_per_decade < 1.0) {
            throw ConfigError("potential.points_per_decade: must be at least 1");
        }
    }
    if (doc.contains("spectrum")) {
        const json& b = doc.at("spectrum");
        reject_unknown(b, "spectrum", {"n_min", "n_max", "fit_n_min", "rho_min", "rho_max", "points"});
        SpectrumBlock& s = c.spectrum;
        s.n_min = static_cast<int>(integer(b, "spectrum", "n_min", s.n_min, 1));
        s.n_max = static_cast<int>(integer(b, "spectrum", "n_max", s.n_max, 1));
        s.fit_n_min = static_cast<int>(integer(b, "spectrum", "fit_n_min", s.fit_n_min, 1));
        s.rho_min = number(b, "spectrum", "rho_min", s.rho_min);
        s.rho_max = number(b, "spectrum", "rho_max", s.rho_max);
        s.points = static_cast<std::size_t>(integer(b, "spectrum", "points", static_cast<long>(s.points), 100));
        if (s.n_max < s.n_min) {
            throw ConfigError("spectrum: n_max must be at least n_min");
        }
        if (s.rho_min < 0.1 || s.rho_max <= s.rho_min) {
            throw ConfigError("spectrum: need 0.1 <= rho_min < rho_max");
        }
    }
    if (doc.contains("scattering")) {
        const json& b = doc.at("scattering");
        reject_unknown(b, "scattering", {"a1_min", "a1_max", "points"});
        ScatteringBlock& s = c.scattering;
        s.a1_min = number(b, "scattering", "a1_min", s.a1_min);
        s.a1_max = number(b, "scattering", "a1_max", s.a1_max);
        s.points = static_cast<std::size_t>(integer(b, "scattering", "points", static_cast<long>(s.points), 2));
        if (s.a1_min < 2.0 || s.a1_max <= s.a1_min) {
            throw ConfigError("scattering: need 2 <= a1_min < a1_max");
        }
    }
    if (doc.contains("detcheck")) {
        const json& b = doc.at("detcheck");
        reject_unknown(b, "detcheck", {"rho_min", "rho_max", "points", "m_max"});
        DetcheckBlock& s = c.detcheck;
        s.rho_min = number(b, "detcheck", "rho_min", s.rho_min);
        s.rho_max = number(b, "detcheck", "rho_max", s.rho_max);
        s.points = static_cast<std::size_t>(integer(b, "detcheck", "points", static_cast<long>(s.points), 1));
        if (b.contains("m_max")) {
            const json& m = b.at("m_max");
            if (!m.is_array() || m.empty()) {
                throw ConfigError("detcheck.m_max: expected a non-empty array of integers");
            }
            s.m_max.clear();
            for (const json& e : m) {
                if (!e.is_number_integer() || e.get<int>() < 1 || e.get<int>() > max_partial_wave) {
                    throw ConfigError("detcheck.m_max: entries must be integers in 1.." +
                                      std::to_string(max_partial_wave));
                }
                s.m_max.push_back(e.get<int>());
            }
        }
        if (s.rho_min <= 1.0 || s.rho_max < s.rho_min) {
            throw ConfigError("detcheck: need 1 < rho_min <= rho_max");
        }
    }
    if (doc.contains("output")) {
        const json& b = doc.at("output");
        reject_unknown(b, "output", {"dir", "format"});
        if (b.contains("dir")) {
            if (!b.at("dir").is_string()) {
                throw ConfigError("output.dir: expected a string");
            }
            c.out_dir = b.at("dir").get<std::string>();
        }
        if (b.contains("format")) {
            if (!b.at("format").is_string()) {
                throw ConfigError("output.format: expected a string");
            }
            c.format = parse_format(b.at("format").get<std::string>());
        }
    }
    if (doc.contains("run")) {
        const json& b = doc.at("run");
        reject_unknown(b, "run", {"threads"});
        c.threads = static_cast<unsigned>(integer(b, "run", "threads", 0, 0));
    }

    if (ov.out_dir) {
        c.out_dir = *ov.out_dir;
    }
    if (ov.format) {
        c.format = parse_format(*ov.format);
    }
    if (ov.threads) {
        c.threads = *ov.threads;
    }
    return c;
}

inline RunConfig load_config(const std::optional<std::string>& path, const Overrides& ov)
{
    if (!path) {
        return parse_config(json::object(), ov);
    }
    std::ifstream in(*path);
    if (!in) {
        throw ConfigError("cannot open config file '" + *path + "'");
    }
    std::stringstream buf;
    buf << in.rdbuf();
    json doc;
    try {
        doc = json::parse(buf.str());
    } catch (const json::parse_error& e) {
        throw ConfigError("config is not valid JSON: " + std::string(e.what()));
    }
    return parse_config(doc, ov);
}

/// Effective configuration with every default filled in. Thread count and
/// output directory do not affect results and are left out.
inline json canonical(const RunConfig& c)
{
    const ModelParams& p = c.params;
    json j;
    j["params"] = {{"alpha", p.alpha},
                   {"beta", p.beta},
                   {"a1", p.on_resonance() ? json("inf") : json(p.a1())},
                   {"a0", p.a0},
                   {"r0", p.r0},
                   {"theta0", p.theta0}};
    j["potential"] = {{"rho_min", c.potential.rho_min},
                      {"rho_max", c.potential.rho_max ? json(*c.potential.rho_max) : json(nullptr)},
                      {"points_per_decade", c.potential.points_per_decade},
                      {"xi_points", c.potential.xi_points}};
    j["spectrum"] = {{"n_min", c.spectrum.n_min},     {"n_max", c.spectrum.n_max},
                     {"fit_n_min", c.spectrum.fit_n_min}, {"rho_min", c.spectrum.rho_min},
                     {"rho_max", c.spectrum.rho_max}, {"points", c.spectrum.points}};
    j["scattering"] = {{"a1_min", c.scattering.a1_min}, {"a1_max", c.scattering.a1_max},
                       {"points", c.scattering.points}};
    j["detcheck"] = {{"rho_min", c.detcheck.rho_min}, {"rho_max", c.detcheck.rho_max},
                     {"points", c.detcheck.points}, {"m_max", c.detcheck.m_max}};
    j["output"] = {{"format", c.format == OutputFormat::csv ? "csv" : "json"}};
    return j;
}

} // namespace qcs::cli
