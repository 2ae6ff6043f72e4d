#include "rdmass/pipeline.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>

#include "rdmass/errors.hpp"
#include "rdmass/svg.hpp"

namespace rdmass {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json to_json(const CheckerReport& report) {
    json j;
    j["verdict"] = to_string(report.verdict);
    j["method"] = to_string(report.method);
    j["note"] = report.note;
    j["witnesses"] = json::array();
    for (const Witness& w : report.witnesses) {
        json jw{{"point", w.point}, {"value", w.value}};
        if (w.component >= 0) jw["component"] = w.component + 1;
        j["witnesses"].push_back(std::move(jw));
    }
    return j;
}

json to_json(const VerdictEntry& e) {
    return {{"outcome", to_string(e.outcome)},
            {"observed", e.observed},
            {"threshold", e.threshold},
            {"note", e.note}};
}

json to_json(const Verdicts& v) {
    return {{"mass_bound", to_json(v.mass_bound)},
            {"mass_monotone", to_json(v.mass_monotone)},
            {"equal_diffusion_max_principle", to_json(v.equal_diffusion_max_principle)},
            {"uniform_in_time", to_json(v.uniform_in_time)},
            {"window_l2_bounded", to_json(v.window_l2_bounded)},
            {"time_integral_sup_bounded", to_json(v.time_integral_sup_bounded)}};
}

void atomic_write(const fs::path& path, const std::string& contents) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream os(tmp, std::ios::trunc | std::ios::binary);
        if (!os) throw IoError("cannot open for writing: " + tmp.string());
        os << contents;
        if (!os) throw IoError("write failed: " + tmp.string());
    }
    fs::rename(tmp, path);
}

// Write through a temp file so readers never observe a partial artifact.
template <typename Writer>
void atomic_emit(const fs::path& path, Writer&& writer) {
    const fs::path tmp = path.string() + ".tmp";
    writer(tmp.string());
    fs::rename(tmp, path);
}

struct CheckBundle {
    CheckerReport quasi_positivity;
    MassBalanceReport mass_balance;
    GrowthReport growth;

    bool refuted() const {
        return quasi_positivity.verdict == CheckVerdict::refuted ||
               mass_balance.verdict == CheckVerdict::refuted;
    }

    json to_report_json() const {
        json j;
        j["quasi_positivity"] = to_json(quasi_positivity);
        j["mass_balance"] = to_json(mass_balance);
        j["mass_balance"]["balance_class"] = to_string(mass_balance.balance_class);
        j["growth"] = {{"max_total_degree", growth.max_total_degree},
                       {"at_most_quadratic", growth.at_most_quadratic}};
        if (!growth.at_most_quadratic)
            j["growth"]["warning"] = "component degree exceeds 2; bounds may not apply";
        return j;
    }
};

CheckBundle run_checks(const RunConfig& config) {
    CheckBundle checks;
    checks.quasi_positivity = check_quasi_positivity(config.system.field,
                                                     config.checks.sample_count,
                                                     config.checks.seed);
    checks.mass_balance = check_mass_balance(config.system.field, config.system.weights,
                                             config.checks.sample_count, config.checks.seed);
    checks.growth = growth_degree(config.system.field);
    return checks;
}

} // namespace

PipelineResult run_checks_only(const RunConfig& config) {
    const CheckBundle checks = run_checks(config);
    json report;
    report["schema_version"] = "1";
    report["checks"] = checks.to_report_json();
    PipelineResult result;
    result.report_json = report.dump(2);
    result.exit_code = checks.refuted() ? ExitCode::check_refuted : ExitCode::ok;
    result.summary = checks.refuted() ? "structural checks refuted the system"
                                      : "structural checks passed";
    return result;
}

PipelineResult execute(const RunConfig& config, bool force) {
    const auto wall_start = std::chrono::steady_clock::now();
    const fs::path outdir = config.output.directory;
    fs::create_directories(outdir);

    PipelineResult result;
    json report;
    report["schema_version"] = "1";
    report["config"] = json::parse(config.echo);

    const CheckBundle checks = run_checks(config);
    report["checks"] = checks.to_report_json();
    const BalanceClass effective_class = checks.mass_balance.balance_class;

    auto finish = [&](ExitCode code, const std::string& summary) {
        const auto wall_end = std::chrono::steady_clock::now();
        report["wall_time_seconds"] =
            std::chrono::duration<double>(wall_end - wall_start).count();
        report["files"] = result.files;
        result.report_json = report.dump(2);
        atomic_write(outdir / "report.json", result.report_json);
        result.files.push_back("report.json");
        result.exit_code = code;
        result.summary = summary;
        return result;
    };

    if (checks.refuted() && !force) {
        report["termination"] = "checks_refuted";
        report["augmented"] = false;
        return finish(ExitCode::check_refuted,
                      "structural checks refuted the system (use --force to run anyway)");
    }

    // Optional conversion of a dissipating system into a conserving one.
    SystemSpec system = config.system;
    bool augmented = false;
    if (config.reduce_to_conservative && effective_class == BalanceClass::dissipative) {
        SystemSpec probe = config.system;
        probe.balance_class = BalanceClass::dissipative;
        system = augment(probe);
        augmented = true;
    }
    report["augmented"] = augmented;

    State initial = build_initial_state(config);
    if (augmented) initial.species.push_back(ScalarField::constant(config.domain, 0.0));

    Monitor monitor(config.monitor, augmented ? std::span<const double>{}
                                              : std::span<const double>(system.weights));

    // Snapshot emission at the configured simulation-time interval.
    int snap_counter = 0;
    double next_snapshot = config.output.snapshot_every ? *config.output.snapshot_every
                                                        : std::numeric_limits<double>::infinity();
    StepHook hook;
    if (config.output.snapshot_every) {
        hook = [&](const State& state, const StepOutcome&) {
            if (state.t < next_snapshot - 1e-12) return;
            for (int i = 0; i < state.m(); ++i) {
                char name[64];
                std::snprintf(name, sizeof name, "snapshot_%04d_s%d.rdm", snap_counter, i + 1);
                atomic_emit(outdir / name, [&](const std::string& tmp) {
                    write_snapshot(tmp, state.species[i]);
                });
                result.files.push_back(name);
                if (state.domain().n == 1) {
                    std::snprintf(name, sizeof name, "snapshot_%04d_s%d.csv", snap_counter, i + 1);
                    atomic_emit(outdir / name, [&](const std::string& tmp) {
                        write_field_csv(tmp, state.species[i]);
                    });
                    result.files.push_back(name);
                }
            }
            ++snap_counter;
            next_snapshot += *config.output.snapshot_every;
        };
    }

    RunResult run_result = run(system, std::move(initial), config.integrator, &monitor, hook);
    const RunReport& rr = run_result.report;

    atomic_emit(outdir / "metrics.csv",
                [&](const std::string& tmp) { write_metrics_csv(tmp, monitor); });
    result.files.push_back("metrics.csv");
    atomic_emit(outdir / "windows.csv",
                [&](const std::string& tmp) { write_windows_csv(tmp, monitor); });
    result.files.push_back("windows.csv");
    if (config.output.emit_svg && !monitor.records().empty()) {
        atomic_emit(outdir / "chart.svg", [&](const std::string& tmp) { emit_svg(monitor, tmp); });
        result.files.push_back("chart.svg");
    }

    report["termination"] = to_string(rr.termination);
    report["steps"] = rr.steps;
    report["retries"] = rr.retries_total;
    report["clamped_mass"] = rr.clamped_mass_cumulative;
    if (!rr.message.empty()) report["message"] = rr.message;
    if (rr.termination == Termination::blowup) report["blowup_time"] = rr.blowup_time;

    if (!monitor.records().empty()) {
        const MetricRecord& last = monitor.records().back();
        report["final"] = {{"t", rr.t_final},
                           {"l1", last.l1},
                           {"linf", last.linf},
                           {"total_weighted_mass", last.total_weighted_mass},
                           {"min_value", last.min_value}};
    }

    if (rr.termination == Termination::completed) {
        const Verdicts verdicts =
            issue_verdicts(monitor, augmented ? BalanceClass::conservative : effective_class,
                           system.equal_diffusion());
        report["verdicts"] = to_json(verdicts);

        // For 3D conserving/dissipating runs, record the duality-estimate
        // reference value next to the measured windowed L2 (informational:
        // the embedding constants it absorbs are not reproduced here).
        if (config.domain.n == 3 && !monitor.windows().empty() &&
            (effective_class == BalanceClass::conservative ||
             effective_class == BalanceClass::dissipative)) {
            double m0 = 0.0;
            for (double x : monitor.records().front().l1) m0 += x;
            const double ref = std::pow(m0, 1.0 / 4.0) *
                               std::pow(std::numbers::sqrt2 * system.d_max() / system.d_min(),
                                        1.0 / 3.0);
            double max_l2 = 0.0;
            for (const auto& w : monitor.windows())
                for (double x : w.window_l2) max_l2 = std::max(max_l2, x);
            report["window_l2_duality_reference"] = {{"value", ref},
                                                     {"max_window_l2", max_l2}};
        }

        if (checks.refuted())
            return finish(ExitCode::check_refuted, "completed, but a structural check is refuted");
        if (verdicts.any_failed()) return finish(ExitCode::verdict_failed, "a verdict failed");
        return finish(ExitCode::ok, "completed; all applicable verdicts passed");
    }
    if (rr.termination == Termination::blowup)
        return finish(ExitCode::blowup,
                      "divergence detected at t = " + std::to_string(rr.blowup_time));
    return finish(ExitCode::positivity, rr.message);
}

} // namespace rdmass
