#include "rdmass/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "rdmass/errors.hpp"

namespace rdmass {

namespace {

double state_sup(const State& state) {
    double sup = 0.0;
    for (const auto& f : state.species) sup = std::max(sup, field_max_abs(f));
    return sup;
}

// True when any value exceeds the threshold in magnitude or is NaN.
bool diverged(const State& state, double threshold) {
    for (const auto& f : state.species)
        for (double x : f.v)
            if (!(std::abs(x) <= threshold)) return true;
    return false;
}

void validate_nonnegative(const State& state, double positivity_tol) {
    const double floor = -positivity_tol * (1.0 + state_sup(state));
    for (const auto& f : state.species)
        if (field_min(f) < floor)
            throw ArgumentError("state has negative species values beyond tolerance");
}

} // namespace

const char* to_string(Scheme s) {
    switch (s) {
        case Scheme::imex_euler: return "imex_euler";
        case Scheme::explicit_euler: return "explicit_euler";
        default: return "explicit_rk2";
    }
}

const char* to_string(Termination t) {
    switch (t) {
        case Termination::completed: return "completed";
        case Termination::blowup: return "blowup";
        case Termination::positivity_failure: return "positivity_failure";
        default: return "clamp_budget";
    }
}

void validate(const IntegratorConfig& cfg) {
    if (!(cfg.dt > 0.0) || !(cfg.t_end > 0.0)) throw ConfigError("dt and t_end must be positive");
    if (cfg.dt > cfg.t_end) throw ConfigError("dt must not exceed t_end");
    if (!(cfg.cfl_safety > 0.0) || cfg.cfl_safety > 1.0)
        throw ConfigError("cfl_safety must lie in (0, 1]");
    if (!(cfg.positivity_tol > 0.0) || !(cfg.clamp_budget > 0.0) || !(cfg.blowup_factor > 0.0))
        throw ConfigError("tolerances must be positive");
    if (cfg.max_retries < 0) throw ConfigError("max_retries must be nonnegative");
}

double explicit_dt_bound(const SystemSpec& system, const BoxDomain& domain, double cfl_safety) {
    double rate = 0.0;
    for (int a = 0; a < domain.n; ++a) rate += 2.0 * system.d_max() / (domain.h[a] * domain.h[a]);
    return cfl_safety / rate;
}

int configured_thread_count() {
    const char* env = std::getenv("RDMASS_THREADS");
    if (!env) return 1;
    const long v = std::strtol(env, nullptr, 10);
    return static_cast<int>(std::clamp(v, 1L, 64L));
}

Integrator::Integrator(const SystemSpec& system, const BoxDomain& domain, IntegratorConfig cfg)
    : system_(system), cfg_(cfg), solver_(domain) {
    validate(cfg_);
    reaction_.assign(system.m, std::vector<double>(domain.cells()));
    stage_.assign(system.m, std::vector<double>(domain.cells()));
}

void Integrator::set_threads(int threads) { threads_ = std::clamp(threads, 1, 64); }

void Integrator::eval_reaction(const State& state, std::vector<std::vector<double>>& out) const {
    const int m = system_.m;
    const std::size_t cells = state.domain().cells();
    auto sweep = [&](std::size_t begin, std::size_t end) {
        std::vector<double> u(m), f(m);
        for (std::size_t c = begin; c < end; ++c) {
            for (int i = 0; i < m; ++i) u[i] = state.species[i].v[c];
            system_.field.eval_into(u, f);
            for (int i = 0; i < m; ++i) out[i][c] = f[i];
        }
    };
    if (threads_ <= 1 || cells < 4096) {
        sweep(0, cells);
        return;
    }
    std::vector<std::thread> pool;
    const std::size_t chunk = (cells + threads_ - 1) / threads_;
    for (int w = 0; w < threads_; ++w) {
        const std::size_t b = std::min(cells, w * chunk), e = std::min(cells, b + chunk);
        if (b < e) pool.emplace_back(sweep, b, e);
    }
    for (auto& th : pool) th.join();
}

double Integrator::clamp_small_negatives(State& state, double tol_neg, const char* where) {
    const double vol = state.domain().cell_volume();
    double clamped = 0.0;
    for (auto& f : state.species)
        for (double& x : f.v) {
            if (x < 0.0) {
                if (x < -tol_neg)
                    throw NumericError(std::string(where) +
                                       " produced a negative value beyond tolerance");
                clamped -= x * vol;
                x = 0.0;
            }
        }
    return clamped;
}

StepOutcome Integrator::step_imex_impl(State& state, double dt_cap) {
    const int m = system_.m;
    const std::size_t cells = state.domain().cells();
    const double tol_neg = cfg_.positivity_tol * (1.0 + state_sup(state));

    eval_reaction(state, reaction_);

    // Explicit reaction stage with halving retries until nonnegative.
    double dt = dt_cap;
    int retries = 0;
    for (;;) {
        double lo = 0.0;
        for (int i = 0; i < m; ++i) {
            const auto& u = state.species[i].v;
            const auto& f = reaction_[i];
            auto& s = stage_[i];
            for (std::size_t c = 0; c < cells; ++c) {
                s[c] = u[c] + dt * f[c];
                if (s[c] < lo) lo = s[c];
            }
        }
        if (lo >= -tol_neg) break;
        if (++retries > cfg_.max_retries)
            throw PositivityError("reaction stage stayed negative after " +
                                  std::to_string(cfg_.max_retries) + " halvings");
        dt *= 0.5;
    }

    // Implicit diffusion per species; the solve preserves cell sums and
    // nonnegativity up to solver tolerance.
    for (int i = 0; i < m; ++i) {
        ScalarField rhs{state.domain(), std::move(stage_[i])};
        ScalarField sol = solver_.solve(dt * system_.d[i], rhs);
        stage_[i] = std::move(rhs.v);
        state.species[i].v = std::move(sol.v);
    }

    const double clamped = clamp_small_negatives(state, tol_neg, "implicit diffusion solve");
    state.t += dt;
    return {dt, clamped, retries};
}

StepOutcome Integrator::step_explicit_impl(State& state, double dt_cap) {
    const int m = system_.m;
    const std::size_t cells = state.domain().cells();
    const double bound = explicit_dt_bound(system_, state.domain(), cfg_.cfl_safety);
    if (dt_cap > bound * (1.0 + 1e-12))
        throw ConfigError("explicit step dt exceeds the stability bound");
    const double tol_neg = cfg_.positivity_tol * (1.0 + state_sup(state));

    // Stage 1 rate: reaction + diffusion at the current state.
    eval_reaction(state, reaction_);
    for (int i = 0; i < m; ++i) {
        ScalarField lap = neumann_laplacian_apply(state.species[i]);
        const double di = system_.d[i];
        auto& r = reaction_[i];
        for (std::size_t c = 0; c < cells; ++c) r[c] += di * lap.v[c];
    }

    double dt = dt_cap;
    int retries = 0;
    State next = state;
    for (;;) {
        if (cfg_.scheme == Scheme::explicit_rk2) {
            // Midpoint stage.
            State mid = state;
            for (int i = 0; i < m; ++i) {
                auto& mv = mid.species[i].v;
                const auto& r = reaction_[i];
                for (std::size_t c = 0; c < cells; ++c) mv[c] += 0.5 * dt * r[c];
            }
            eval_reaction(mid, stage_);
            for (int i = 0; i < m; ++i) {
                ScalarField lap = neumann_laplacian_apply(mid.species[i]);
                const double di = system_.d[i];
                auto& s = stage_[i];
                for (std::size_t c = 0; c < cells; ++c) s[c] += di * lap.v[c];
            }
        }
        const auto& rate = cfg_.scheme == Scheme::explicit_rk2 ? stage_ : reaction_;
        double lo = 0.0;
        for (int i = 0; i < m; ++i) {
            const auto& u = state.species[i].v;
            const auto& r = rate[i];
            auto& nv = next.species[i].v;
            for (std::size_t c = 0; c < cells; ++c) {
                nv[c] = u[c] + dt * r[c];
                if (nv[c] < lo) lo = nv[c];
            }
        }
        if (lo >= -tol_neg) break;
        if (++retries > cfg_.max_retries)
            throw PositivityError("explicit update stayed negative after " +
                                  std::to_string(cfg_.max_retries) + " halvings");
        dt *= 0.5;
    }

    state.species = std::move(next.species);
    const double clamped = clamp_small_negatives(state, tol_neg, "explicit update");
    state.t += dt;
    return {dt, clamped, retries};
}

StepOutcome Integrator::step(State& state, double dt_cap) {
    return cfg_.scheme == Scheme::imex_euler ? step_imex_impl(state, dt_cap)
                                             : step_explicit_impl(state, dt_cap);
}

namespace {

StepOutcome single_step(const SystemSpec& system, State& state, const IntegratorConfig& cfg) {
    validate_nonnegative(state, cfg.positivity_tol);
    const double mass_before = total_mass(state).total;
    Integrator integ(system, state.domain(), cfg);
    const StepOutcome outcome = integ.step(state, cfg.dt);
    if (mass_before > 0.0 && outcome.clamped_mass > cfg.clamp_budget * mass_before)
        throw ClampBudgetError("clamped mass " + std::to_string(outcome.clamped_mass) +
                               " exceeds the per-step budget");
    return outcome;
}

} // namespace

StepOutcome step_imex(const SystemSpec& system, State& state, const IntegratorConfig& cfg) {
    IntegratorConfig c = cfg;
    c.scheme = Scheme::imex_euler;
    return single_step(system, state, c);
}

StepOutcome step_explicit(const SystemSpec& system, State& state, const IntegratorConfig& cfg) {
    IntegratorConfig c = cfg;
    if (c.scheme == Scheme::imex_euler) c.scheme = Scheme::explicit_euler;
    return single_step(system, state, c);
}

RunResult run(const SystemSpec& system, State initial, const IntegratorConfig& cfg,
              Monitor* monitor, const StepHook& on_step) {
    validate(cfg);
    if (initial.m() != system.m)
        throw ArgumentError("initial state species count does not match the system");
    if (!all_finite(initial)) throw ArgumentError("initial state must be finite");
    validate_nonnegative(initial, cfg.positivity_tol);
    if (cfg.scheme != Scheme::imex_euler &&
        cfg.dt > explicit_dt_bound(system, initial.domain(), cfg.cfl_safety) * (1.0 + 1e-12))
        throw ConfigError("dt exceeds the explicit stability bound " +
                          std::to_string(explicit_dt_bound(system, initial.domain(),
                                                           cfg.cfl_safety)));

    RunResult result{RunReport{}, std::move(initial)};
    State& state = result.final_state;
    RunReport& report = result.report;

    const double sup0 = state_sup(state);
    const double blowup_threshold = cfg.blowup_factor * (1.0 + sup0);
    const double initial_mass = total_mass(state).total;
    const double w = monitor ? monitor->window_width() : 0.0;
    const int record_every = monitor ? monitor->record_every() : 0;
    const double t0 = state.t;

    Integrator integ(system, state.domain(), cfg);
    integ.set_threads(configured_thread_count());
    if (monitor) monitor->record(state, 0.0);

    double dt_current = cfg.dt;
    long steps_since_record = 0;
    const double t_eps = 1e-12 * std::max(1.0, std::abs(cfg.t_end));

    while (state.t < cfg.t_end - t_eps) {
        // Clip the step to land exactly on the next window boundary and t_end.
        double dt_cap = std::min(dt_current, cfg.t_end - state.t);
        double boundary = 0.0;
        if (monitor) {
            const long k = static_cast<long>(std::floor((state.t - t0) / w + 1e-9));
            boundary = t0 + (k + 1) * w;
            dt_cap = std::min(dt_cap, boundary - state.t);
        }

        StepOutcome outcome;
        try {
            outcome = integ.step(state, dt_cap);
        } catch (const PositivityError& e) {
            report.termination = Termination::positivity_failure;
            report.message = e.what();
            break;
        }
        ++report.steps;
        report.retries_total += outcome.retries;
        report.clamped_mass_cumulative += outcome.clamped_mass;

        // Snap to boundary / final time to keep records exact.
        if (monitor && std::abs(state.t - boundary) <= t_eps) state.t = boundary;
        if (std::abs(state.t - cfg.t_end) <= t_eps) state.t = cfg.t_end;

        if (initial_mass > 0.0 &&
            report.clamped_mass_cumulative > cfg.clamp_budget * initial_mass) {
            report.termination = Termination::clamp_budget;
            report.message = "cumulative clamped mass exceeded the budget";
            break;
        }
        if (diverged(state, blowup_threshold)) {
            report.termination = Termination::blowup;
            report.blowup_time = state.t;
            report.message = "sup norm crossed " + std::to_string(blowup_threshold) +
                             " at t = " + std::to_string(state.t);
            break;
        }

        if (on_step) on_step(state, outcome);
        if (monitor) {
            ++steps_since_record;
            const bool at_boundary = state.t == boundary;
            const bool at_end = state.t >= cfg.t_end - t_eps;
            if (at_boundary || at_end || steps_since_record >= record_every) {
                monitor->record(state, report.clamped_mass_cumulative);
                steps_since_record = 0;
            }
        }

        // Geometric recovery after positivity halvings, capped at the
        // configured step. Boundary clips are not halvings and leave the
        // working step alone.
        if (outcome.retries > 0)
            dt_current = std::min(cfg.dt, outcome.dt_used * 2.0);
        else
            dt_current = std::min(cfg.dt, dt_current * 2.0);
    }

    report.t_final = state.t;
    return result;
}

} // namespace rdmass
