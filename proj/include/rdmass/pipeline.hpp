#ifndef RDMASS_PIPELINE_HPP
#define RDMASS_PIPELINE_HPP

#include <string>
#include <vector>

#include "rdmass/run_config.hpp"

namespace rdmass {

/// Process exit codes shared by the library pipeline and the CLI.
enum class ExitCode : int {
    ok = 0,              // run completed, every applicable verdict passed
    verdict_failed = 1,  // run completed, at least one verdict failed
    check_refuted = 2,   // a structural check refuted the system (no --force)
    positivity = 3,      // positivity retries or the clamp budget exhausted
    blowup = 4,          // divergence detected
    config = 64,         // malformed configuration
    numeric = 70,        // internal numeric failure
};

struct PipelineResult {
    ExitCode exit_code = ExitCode::ok;
    std::string report_json;        // contents of report.json
    std::vector<std::string> files; // artifact names relative to the output directory
    std::string summary;            // one-line human outcome
};

/// Runs the full pipeline for a validated config: hypothesis checks, optional
/// conservative augmentation, time integration with monitoring, verdicts, and
/// artifact emission (metrics.csv, windows.csv, report.json, optional
/// snapshots and chart.svg). File writes are atomic (write temp, rename).
/// A report is produced on every path that reaches the checkers.
///
/// `force` continues past refuted checks (the report still records them).
PipelineResult execute(const RunConfig& config, bool force);

/// Runs only the checkers and renders their JSON report (no simulation).
PipelineResult run_checks_only(const RunConfig& config);

} // namespace rdmass

#endif
