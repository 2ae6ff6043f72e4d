// Command-line front end: parse a declarative run config, orchestrate
// checks -> optional augmentation -> simulation -> verdicts, and emit the
// CSV/JSON/SVG artifacts with stable exit codes (0 verdicts pass, 1 verdict
// failed, 2 check refuted, 3 positivity/clamp failure, 4 divergence,
// 64 config error, 70 numeric error).

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <string>

#include "rdmass/errors.hpp"
#include "rdmass/oracle.hpp"
#include "rdmass/pipeline.hpp"
#include "rdmass/run_config.hpp"

namespace {

int do_run(const std::string& config_path, bool force, const std::string& out_dir) {
    rdmass::RunConfig config = rdmass::load_config(config_path);
    if (!out_dir.empty()) config.output.directory = out_dir;
    const rdmass::PipelineResult result = rdmass::execute(config, force);
    std::printf("%s\n", result.summary.c_str());
    std::printf("artifacts: %s\n", config.output.directory.c_str());
    return static_cast<int>(result.exit_code);
}

int do_check(const std::string& config_path) {
    const rdmass::RunConfig config = rdmass::load_config(config_path);
    const rdmass::PipelineResult result = rdmass::run_checks_only(config);
    std::printf("%s\n", result.report_json.c_str());
    return static_cast<int>(result.exit_code);
}

int do_oracle(const std::string& config_path, double t) {
    const rdmass::RunConfig config = rdmass::load_config(config_path);
    if (config.initial.kind != rdmass::InitialKind::constant)
        throw rdmass::ConfigError(
            "the well-mixed oracle needs an initial block of type 'constant'");
    const auto u = rdmass::wellmixed_oracle(config.system, config.initial.values, t);
    std::printf("{ \"t\": %.17g, \"u\": [", t);
    for (size_t i = 0; i < u.size(); ++i) std::printf("%s%.17g", i ? ", " : "", u[i]);
    std::printf("] }\n");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Structure-checking simulator for mass-dissipating reaction-diffusion systems.\n"
        "RDMASS_THREADS caps intra-step parallelism (default 1)."};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    bool force = false;
    double oracle_t = 1.0;

    auto* run_cmd = app.add_subcommand("run", "execute the full check/simulate/verdict pipeline");
    run_cmd->add_option("config", config_path, "run configuration (JSON)")->required();
    run_cmd->add_flag("--force", force, "continue even if a structural check is refuted");
    run_cmd->add_option("--out", out_dir, "override the output directory");

    auto* check_cmd = app.add_subcommand("check", "run only the structural checkers");
    check_cmd->add_option("config", config_path, "run configuration (JSON)")->required();

    auto* oracle_cmd =
        app.add_subcommand("oracle", "integrate the well-mixed system u' = f(u)");
    oracle_cmd->add_option("config", config_path, "run configuration (JSON)")->required();
    oracle_cmd->add_option("--t", oracle_t, "final time")->required();

    try {
        app.parse(argc, argv);
        if (run_cmd->parsed()) return do_run(config_path, force, out_dir);
        if (check_cmd->parsed()) return do_check(config_path);
        return do_oracle(config_path, oracle_t);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 64; // bad usage is a configuration error
    } catch (const rdmass::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 64;
    } catch (const rdmass::ArgumentError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 64;
    } catch (const rdmass::BlowupError& e) {
        std::fprintf(stderr, "divergence: %s\n", e.what());
        return 4;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 70;
    }
}
