#ifndef RDMASS_RUN_CONFIG_HPP
#define RDMASS_RUN_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "rdmass/grid.hpp"
#include "rdmass/integrate.hpp"
#include "rdmass/system.hpp"

namespace rdmass {

enum class InitialKind { constant, cosine, file, random };

struct InitialConfig {
    InitialKind kind = InitialKind::constant;
    std::vector<double> values;              // constant: one value per species
    std::vector<double> base, amplitude;     // cosine: u_i = base_i + amp_i * prod_a cos(k_a pi x_a / L_a)
    std::vector<int> mode;                   // cosine: one integer mode per axis
    std::vector<std::string> paths;          // file: one snapshot per species
    double lo = 0.0, hi = 0.0;               // random: uniform range
    std::uint64_t seed = 0;                  // random: required
};

struct ChecksConfig {
    int sample_count = 10000;
    std::uint64_t seed = 271828;
};

struct OutputConfig {
    std::string directory = "rdmass_out";
    bool emit_svg = false;
    std::optional<double> snapshot_every;
};

/// A fully validated declarative run description (defaults filled, unknown
/// keys rejected).
struct RunConfig {
    BoxDomain domain;
    SystemSpec system;
    bool reduce_to_conservative = false;
    InitialConfig initial;
    IntegratorConfig integrator;
    MonitorConfig monitor;
    ChecksConfig checks;
    OutputConfig output;
    std::string echo; // normalized JSON document for the run report
};

/// Parses and validates a config file. Throws ConfigError with line/field
/// diagnostics on malformed input.
RunConfig load_config(const std::string& path);

/// Same, from an in-memory JSON document.
RunConfig parse_config(const nlohmann::json& doc);

/// Builds the initial state described by the config (cell-centered samples;
/// nonnegative by validation).
State build_initial_state(const RunConfig& config);

} // namespace rdmass

#endif
