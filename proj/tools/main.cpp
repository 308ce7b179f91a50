#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "commands.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_config = 2;
constexpr int exit_numerical = 3;

void setup_logging()
{
    auto logger = spdlog::stderr_color_mt("qcs");
    spdlog::set_default_logger(logger);
    spdlog::set_pattern("[%l] %v");
    spdlog::set_level(spdlog::level::warn);
    const char* env = std::getenv("QC_LOG_LEVEL");
    if (!env || !*env) {
        return;
    }
    static const std::map<std::string, spdlog::level::level_enum> levels = {
        {"error", spdlog::level::err},
        {"warn", spdlog::level::warn},
        {"info", spdlog::level::info},
        {"debug", spdlog::level::debug},
    };
    const auto it = levels.find(env);
    if (it == levels.end()) {
        throw qcs::cli::ConfigError(std::string("QC_LOG_LEVEL must be error, warn, info or debug, got '") + env + "'");
    }
    spdlog::set_level(it->second);
}

void write_sidecar(const qcs::cli::RunContext& ctx, const std::string& command, const std::string& what)
{
    std::ofstream log(ctx.dir / (command + ".log"), std::ios::trunc);
    log << "error: " << what << '\n';
    for (const std::string& line : ctx.diagnostics) {
        log << line << '\n';
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Heavy-heavy-light three-body quasi-Coulomb toolkit", "qcs"};
    app.set_version_flag("--version", QCS_VERSION_STRING);
    app.require_subcommand(1);
    app.footer("Precedence: command-line flags override config file values, which override defaults.\n"
               "Exit codes: 0 ok, 2 configuration error, 3 numerical failure.\n"
               "Set QC_LOG_LEVEL to error, warn, info or debug.");

    std::optional<std::string> config_path;
    qcs::cli::Overrides ov;
    app.add_option("--config", config_path, "JSON configuration file")->check(CLI::ExistingFile);
    app.add_option("--out", ov.out_dir, "output directory");
    app.add_option("--format", ov.format, "table format")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--threads", ov.threads, "worker threads (0: all cores)");

    const std::map<std::string, std::string> help = {
        {"potential", "tabulate branch and asymptotic Born-Oppenheimer potentials"},
        {"spectrum", "three-body levels from WKB and Numerov, with the quasi-Coulomb fit"},
        {"scattering", "N0 and the atom-molecule length A0 over an a1 scan"},
        {"detcheck", "compare truncated-determinant roots with the branch equations"},
    };
    for (const auto& [name, text] : help) {
        app.add_subcommand(name, text)->fallthrough();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_config;
    }
    const std::string command = app.get_subcommands().front()->get_name();

    qcs::cli::RunContext ctx;
    try {
        setup_logging();
        ctx.cfg = qcs::cli::load_config(config_path, ov);
    } catch (const qcs::cli::ConfigError& e) {
        std::cerr << "qcs: configuration error: " << e.what() << '\n';
        return exit_config;
    }

    ctx.dir = ctx.cfg.out_dir;
    std::error_code ec;
    qcs::cli::fs::create_directories(ctx.dir, ec);
    if (ec) {
        std::cerr << "qcs: cannot create output directory " << ctx.dir << ": " << ec.message() << '\n';
        return exit_config;
    }

    // a manifest marks a completed run, so drop one left by an earlier run
    qcs::cli::fs::remove(ctx.dir / (command + "_manifest.json"), ec);
    qcs::cli::fs::remove(ctx.dir / (command + ".log"), ec);

    try {
        if (command == "potential") {
            qcs::cli::cmd_potential(ctx);
        } else if (command == "spectrum") {
            qcs::cli::cmd_spectrum(ctx);
        } else if (command == "scattering") {
            qcs::cli::cmd_scattering(ctx);
        } else {
            qcs::cli::cmd_detcheck(ctx);
        }
    } catch (const qcs::cli::ConfigError& e) {
        std::cerr << "qcs: configuration error: " << e.what() << '\n';
        return exit_config;
    } catch (const std::exception& e) {
        spdlog::error("{}: {}", command, e.what());
        write_sidecar(ctx, command, e.what());
        return exit_numerical;
    }

    qcs::cli::write_manifest(ctx.dir, QCS_VERSION_STRING, command, ctx.cfg, ctx.outputs);
    spdlog::info("{}: wrote {} files to {}", command, ctx.outputs.size(), ctx.dir.string());
    return exit_ok;
}
