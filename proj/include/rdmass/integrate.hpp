#ifndef RDMASS_INTEGRATE_HPP
#define RDMASS_INTEGRATE_HPP

#include <functional>
#include <string>

#include "rdmass/grid.hpp"
#include "rdmass/helmholtz.hpp"
#include "rdmass/monitor.hpp"
#include "rdmass/system.hpp"

namespace rdmass {

enum class Scheme { imex_euler, explicit_euler, explicit_rk2 };
enum class Termination { completed, blowup, positivity_failure, clamp_budget };

const char* to_string(Scheme s);
const char* to_string(Termination t);

struct IntegratorConfig {
    Scheme scheme = Scheme::imex_euler;
    double dt = 0.0;
    double t_end = 0.0;
    double cfl_safety = 0.5;        // explicit schemes only
    double positivity_tol = 1e-12;  // negatives beyond tol*(1+||u||_inf) trigger retries
    double clamp_budget = 1e-8;     // max cumulative clamped mass / initial mass
    int max_retries = 30;
    double blowup_factor = 1e6;     // divergence threshold over (1 + initial sup)
};

void validate(const IntegratorConfig& cfg);

/// Largest stable explicit step: cfl_safety / sum_a (2 d_max / h_a^2).
double explicit_dt_bound(const SystemSpec& system, const BoxDomain& domain, double cfl_safety);

struct StepOutcome {
    double dt_used = 0.0;
    double clamped_mass = 0.0; // mass injected by clamping in this step
    int retries = 0;
};

struct RunReport {
    Termination termination = Termination::completed;
    double t_final = 0.0;
    long steps = 0;
    long retries_total = 0;
    double clamped_mass_cumulative = 0.0;
    double blowup_time = 0.0; // empirical divergence time when termination == blowup
    std::string message;
};

struct RunResult {
    RunReport report;
    State final_state;
};

/// Called after every accepted step (used by tests to capture trajectories).
using StepHook = std::function<void(const State&, const StepOutcome&)>;

/// Advances the state by one step honoring the positivity retry/clamp policy.
///
/// The reaction term is evaluated once per step; a halved retry only rescales
/// the cached values. Throws PositivityError when retries are exhausted and
/// NumericError if the implicit solve misbehaves.
class Integrator {
public:
    Integrator(const SystemSpec& system, const BoxDomain& domain, IntegratorConfig cfg);

    StepOutcome step(State& state, double dt_cap);

    /// Threads used for the reaction sweep (results are identical for any
    /// count; partitions write disjoint ranges and there are no reductions).
    void set_threads(int threads);

    const IntegratorConfig& config() const { return cfg_; }

private:
    StepOutcome step_imex_impl(State& state, double dt_cap);
    StepOutcome step_explicit_impl(State& state, double dt_cap);
    void eval_reaction(const State& state, std::vector<std::vector<double>>& out) const;
    double clamp_small_negatives(State& state, double tol_neg, const char* where);

    const SystemSpec& system_;
    IntegratorConfig cfg_;
    HelmholtzSolver solver_;
    int threads_ = 1;
    std::vector<std::vector<double>> reaction_; // per species, per cell
    std::vector<std::vector<double>> stage_;    // scratch for multi-stage schemes
};

/// One step at cfg.dt (convenience wrappers around Integrator).
StepOutcome step_imex(const SystemSpec& system, State& state, const IntegratorConfig& cfg);
StepOutcome step_explicit(const SystemSpec& system, State& state, const IntegratorConfig& cfg);

/// Integrates to cfg.t_end, recording through `monitor` (if given) every
/// monitor.record_every() accepted steps, exactly on window boundaries, and
/// at the initial and final times. Divergence, positivity failure, and clamp
/// budget exhaustion terminate early and are reported as the termination
/// cause; a report is always produced.
RunResult run(const SystemSpec& system, State initial, const IntegratorConfig& cfg,
              Monitor* monitor = nullptr, const StepHook& on_step = {});

/// Reads RDMASS_THREADS (default 1) and clamps it to a sane range.
int configured_thread_count();

} // namespace rdmass

#endif
