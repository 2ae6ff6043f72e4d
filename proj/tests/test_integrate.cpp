#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "rdmass/errors.hpp"
#include "rdmass/integrate.hpp"
#include "rdmass/oracle.hpp"
#include "support/dense.hpp"

using namespace rdmass;
using rdmass::testing::random_values;

namespace {

State constant_state(const BoxDomain& box, std::vector<double> values) {
    State state;
    for (double v : values) state.species.push_back(ScalarField::constant(box, v));
    return state;
}

State random_state(const BoxDomain& box, int m, std::uint64_t seed, double lo, double hi) {
    State state;
    for (int i = 0; i < m; ++i)
        state.species.push_back(ScalarField{box, random_values(box.cells(), seed + i, lo, hi)});
    return state;
}

SystemSpec decay_system() {
    // m = 1, f = -u
    return make_system({1.0}, PolynomialVectorField(1, {{Term{-1.0, {1}}}}),
                       BalanceClass::dissipative);
}

double max_spatial_deviation(const State& state) {
    double dev = 0.0;
    for (const auto& f : state.species) {
        const double lo = field_min(f);
        const double hi = *std::max_element(f.v.begin(), f.v.end());
        dev = std::max(dev, hi - lo);
    }
    return dev;
}

} // namespace

TEST_CASE("well-mixed oracle") {
    SUBCASE("equilibrium of the reversible reaction is stationary") {
        const auto sys = builtin_reversible(1, 1, {1, 1, 1, 1});
        const auto u = wellmixed_oracle(sys, {1, 1, 1, 1}, 5.0);
        for (double v : u) CHECK(v == doctest::Approx(1.0).epsilon(1e-10));
    }
    SUBCASE("linear decay hits the exponential") {
        const auto u = wellmixed_oracle(decay_system(), {1.0}, 1.0);
        CHECK(u[0] == doctest::Approx(std::exp(-1.0)).epsilon(1e-9));
    }
    SUBCASE("skew interaction dissipates total mass exactly exponentially") {
        const auto sys = builtin_lotka_volterra({1, 1}, {0, 1, -1, 0}, {1, 1});
        for (double t : {0.5, 1.0, 3.0}) {
            const auto u = wellmixed_oracle(sys, {1.0, 2.0}, t);
            CHECK(u[0] + u[1] == doctest::Approx(3.0 * std::exp(-t)).epsilon(1e-8));
        }
    }
    SUBCASE("quadratic self-amplification escapes near t = 1") {
        const auto sys = make_system({1.0}, PolynomialVectorField(1, {{Term{1.0, {2}}}}),
                                     BalanceClass::unknown);
        try {
            wellmixed_oracle(sys, {1.0}, 2.0);
            FAIL("expected divergence");
        } catch (const BlowupError& e) {
            CHECK(e.t_detected > 0.9);
            CHECK(e.t_detected < 1.1);
        }
    }
    SUBCASE("rejects bad input") {
        CHECK_THROWS_AS(wellmixed_oracle(decay_system(), {-1.0}, 1.0), ArgumentError);
        CHECK_THROWS_AS(wellmixed_oracle(decay_system(), {1.0, 2.0}, 1.0), ArgumentError);
    }
}

TEST_CASE("single-step behavior") {
    const auto box = make_box(1, std::vector<double>{1.0}, std::vector<int>{8});

    SUBCASE("stationary reaction and constant data make a fixed point at any dt") {
        const auto sys = builtin_reversible(1, 1, {0.3, 0.5, 0.7, 0.9});
        for (double dt : {1e-3, 0.25, 0.7}) {
            State state = constant_state(box, {1, 1, 1, 1});
            IntegratorConfig cfg{.scheme = Scheme::imex_euler, .dt = dt, .t_end = dt};
            const auto outcome = step_imex(sys, state, cfg);
            CHECK(outcome.retries == 0);
            CHECK(outcome.dt_used == dt);
            for (const auto& f : state.species)
                for (double v : f.v) CHECK(v == doctest::Approx(1.0).epsilon(1e-13));
        }
    }
    SUBCASE("linear decay of constant data stays exact and nonnegative") {
        State state = constant_state(box, {1.0});
        IntegratorConfig cfg{.scheme = Scheme::imex_euler, .dt = 0.25, .t_end = 0.25};
        const auto outcome = step_imex(decay_system(), state, cfg);
        CHECK(outcome.retries == 0);
        CHECK(outcome.clamped_mass == 0.0);
        for (double v : state.species[0].v) CHECK(v == doctest::Approx(0.75).epsilon(1e-13));
    }
    SUBCASE("explicit and imex agree on the reaction half for constant data") {
        IntegratorConfig cfg{.scheme = Scheme::explicit_euler, .dt = 1e-4, .t_end = 1e-4};
        State a = constant_state(box, {1.0});
        State b = constant_state(box, {1.0});
        step_explicit(decay_system(), a, cfg);
        cfg.scheme = Scheme::imex_euler;
        step_imex(decay_system(), b, cfg);
        for (std::size_t k = 0; k < a.species[0].v.size(); ++k)
            CHECK(std::abs(a.species[0].v[k] - b.species[0].v[k]) <= 1e-12);
    }
    SUBCASE("explicit stability bound is enforced") {
        // 1D, h = 1, d = 1, safety 0.5 -> dt bound 0.25
        const auto unit = make_box(1, std::vector<double>{8.0}, std::vector<int>{8});
        const auto sys = decay_system();
        CHECK(explicit_dt_bound(sys, unit, 0.5) == doctest::Approx(0.25).epsilon(1e-15));
        State state = constant_state(unit, {1.0});
        IntegratorConfig cfg{.scheme = Scheme::explicit_euler, .dt = 0.3, .t_end = 1.0};
        CHECK_THROWS_AS(step_explicit(sys, state, cfg), ConfigError);
    }
    SUBCASE("negative states are rejected up front") {
        State state = constant_state(box, {1.0});
        state.species[0].v[3] = -0.5;
        IntegratorConfig cfg{.scheme = Scheme::imex_euler, .dt = 1e-3, .t_end = 1e-3};
        CHECK_THROWS_AS(step_imex(decay_system(), state, cfg), ArgumentError);
    }
    SUBCASE("a single step can exhaust the clamp budget") {
        PolynomialVectorField f(2, {{Term{-1.0, {0, 1}}}, {}});
        const auto sys = make_system({1, 1}, f, BalanceClass::unknown);
        State state = constant_state(box, {0.0, 1.0});
        IntegratorConfig cfg{.scheme = Scheme::imex_euler, .dt = 1e-4, .t_end = 1e-4,
                             .clamp_budget = 1e-30};
        CHECK_THROWS_AS(step_imex(sys, state, cfg), ClampBudgetError);
    }
}

TEST_CASE("discrete mass behavior over many steps") {
    SUBCASE("conservative system keeps total mass to roundoff") {
        const auto box = make_box(3, std::vector<double>{1, 1, 1}, std::vector<int>{8, 8, 8});
        const auto sys = builtin_reversible(1, 1, {0.1, 0.15, 0.2, 0.25});
        State state = random_state(box, 4, 1234, 0.0, 2.0);
        const double mass0 = total_mass(state).total;
        Integrator integ(sys, box, {.scheme = Scheme::imex_euler, .dt = 1e-3, .t_end = 1.0});
        double clamped = 0.0;
        for (int k = 0; k < 1000; ++k) {
            const double before = total_mass(state).total;
            const auto outcome = integ.step(state, 1e-3);
            clamped += outcome.clamped_mass;
            const double after = total_mass(state).total;
            CHECK(std::abs(after - before - outcome.clamped_mass) <= 1e-10 * before);
        }
        CHECK(std::abs(total_mass(state).total - mass0 - clamped) <= 1e-9 * mass0);
    }
    SUBCASE("dissipative system never gains weighted mass") {
        const auto box = make_box(2, std::vector<double>{1, 1}, std::vector<int>{12, 12});
        const auto sys = builtin_lotka_volterra({1, 1}, {0, 1, -1, 0}, {0.1, 0.2});
        State state = random_state(box, 2, 77, 0.0, 1.5);
        Integrator integ(sys, box, {.scheme = Scheme::imex_euler, .dt = 1e-3, .t_end = 1.0});
        for (int k = 0; k < 100; ++k) {
            const double before = total_mass(state).total;
            const auto outcome = integ.step(state, 1e-3);
            const double after = total_mass(state).total;
            CHECK(after <= before + outcome.clamped_mass + 1e-12 * before);
        }
    }
    SUBCASE("weights define the conserved total") {
        // 2*f_1 + 1*f_2 = 0 for f = (u_2, -2 u_2); the weighted total is the
        // invariant, not the plain sum.
        const auto box = make_box(1, std::vector<double>{1.0}, std::vector<int>{16});
        PolynomialVectorField f(2, {{Term{1.0, {0, 1}}}, {Term{-2.0, {0, 1}}}});
        const auto sys = make_system({0.4, 0.6}, f, BalanceClass::conservative, {2.0, 1.0});
        State state = random_state(box, 2, 9, 0.5, 2.0);
        const double mass0 = total_mass(state, sys.weights).total;
        Integrator integ(sys, box, {.scheme = Scheme::imex_euler, .dt = 1e-3, .t_end = 1.0});
        for (int k = 0; k < 100; ++k) integ.step(state, 1e-3);
        const double mass1 = total_mass(state, sys.weights).total;
        CHECK(std::abs(mass1 - mass0) <= 1e-10 * mass0);
    }
    SUBCASE("states stay nonnegative within tolerance") {
        const auto box = make_box(2, std::vector<double>{1, 1}, std::vector<int>{10, 10});
        const auto sys = builtin_reversible(3, 2, {0.3, 0.4, 0.5, 0.6});
        State state = random_state(box, 4, 5, 0.0, 1.0);
        Integrator integ(sys, box, {.scheme = Scheme::imex_euler, .dt = 5e-3, .t_end = 1.0});
        for (int k = 0; k < 200; ++k) {
            integ.step(state, 5e-3);
            double sup = 0.0;
            for (const auto& f : state.species) sup = std::max(sup, field_max_abs(f));
            for (const auto& f : state.species) CHECK(field_min(f) >= -1e-12 * (1.0 + sup));
        }
    }
}

TEST_CASE("spatially constant runs track the well-mixed oracle") {
    const auto box = make_box(1, std::vector<double>{1.0}, std::vector<int>{16});
    const auto sys = builtin_reversible(1, 1, {0.1, 0.15, 0.2, 0.25});

    SUBCASE("homogeneity is preserved and the oracle matched at small dt") {
        State initial = constant_state(box, {1, 1, 0, 0});
        IntegratorConfig cfg{.scheme = Scheme::imex_euler, .dt = 2e-6, .t_end = 0.1};
        const auto result = run(sys, initial, cfg);
        REQUIRE(result.report.termination == Termination::completed);
        CHECK(max_spatial_deviation(result.final_state) <= 1e-12);
        const auto ref = wellmixed_oracle(sys, {1, 1, 0, 0}, 0.1);
        for (int i = 0; i < 4; ++i) {
            const double got = result.final_state.species[i].v[0];
            CHECK(std::abs(got - ref[i]) <= 1e-6 * (1.0 + std::abs(ref[i])));
        }
    }
    SUBCASE("the oracle gap shrinks at first order in dt") {
        const auto ref = wellmixed_oracle(sys, {1, 1, 0, 0}, 0.5);
        auto gap = [&](double dt) {
            State initial = constant_state(box, {1, 1, 0, 0});
            IntegratorConfig cfg{.scheme = Scheme::imex_euler, .dt = dt, .t_end = 0.5};
            const auto result = run(sys, initial, cfg);
            double err = 0.0;
            for (int i = 0; i < 4; ++i)
                err = std::max(err, std::abs(result.final_state.species[i].v[0] - ref[i]));
            return err;
        };
        const double e1 = gap(2e-3), e2 = gap(1e-3);
        CHECK(e1 / e2 == doctest::Approx(2.0).epsilon(0.2));
    }
}

TEST_CASE("run loop bookkeeping") {
    SUBCASE("pure diffusion completes and conserves mass") {
        const auto box = make_box(1, std::vector<double>{1.0}, std::vector<int>{16});
        const auto sys = make_system({0.5}, PolynomialVectorField::zero(1),
                                     BalanceClass::conservative);
        State initial{{ScalarField{box, random_values(box.cells(), 31, 0.0, 2.0)}}, 0.0};
        const double mass0 = total_mass(initial).total;
        IntegratorConfig cfg{.scheme = Scheme::imex_euler, .dt = 1e-3, .t_end = 1.0};
        const auto result = run(sys, initial, cfg);
        CHECK(result.report.termination == Termination::completed);
        CHECK(result.report.t_final == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(std::abs(total_mass(result.final_state).total - mass0) <= 1e-10 * mass0);
        // diffusion flattens the profile
        CHECK(max_spatial_deviation(result.final_state) <
              max_spatial_deviation(initial));
    }
    SUBCASE("quadratic self-amplification is caught by the divergence detector") {
        const auto box = make_box(1, std::vector<double>{1.0}, std::vector<int>{8});
        const auto sys = make_system({1e-3}, PolynomialVectorField(1, {{Term{1.0, {2}}}}),
                                     BalanceClass::unknown);
        State initial = constant_state(box, {1.0});
        IntegratorConfig cfg{.scheme = Scheme::explicit_euler, .dt = 1e-4, .t_end = 2.0};
        const auto result = run(sys, initial, cfg);
        CHECK(result.report.termination == Termination::blowup);
        CHECK(result.report.blowup_time > 0.9);
        CHECK(result.report.blowup_time < 1.1);
    }
    SUBCASE("exhausted retries end as positivity failure") {
        const auto box = make_box(1, std::vector<double>{1.0}, std::vector<int>{8});
        // f_1 = -u_2 keeps pushing species 1 negative from its zero face.
        PolynomialVectorField f(2, {{Term{-1.0, {0, 1}}}, {}});
        const auto sys = make_system({1, 1}, f, BalanceClass::unknown);
        State initial = constant_state(box, {0.0, 1.0});
        IntegratorConfig cfg{.scheme = Scheme::imex_euler, .dt = 1e-4, .t_end = 1.0,
                             .max_retries = 5};
        const auto result = run(sys, initial, cfg);
        CHECK(result.report.termination == Termination::positivity_failure);
    }
    SUBCASE("persistent clamping exhausts the budget") {
        const auto box = make_box(1, std::vector<double>{1.0}, std::vector<int>{8});
        PolynomialVectorField f(2, {{Term{-1.0, {0, 1}}}, {}});
        const auto sys = make_system({1, 1}, f, BalanceClass::unknown);
        State initial = constant_state(box, {0.0, 1.0});
        IntegratorConfig cfg{.scheme = Scheme::imex_euler, .dt = 1e-4, .t_end = 1.0,
                             .clamp_budget = 1e-30};
        const auto result = run(sys, initial, cfg);
        CHECK(result.report.termination == Termination::clamp_budget);
        CHECK(result.report.clamped_mass_cumulative > 0.0);
    }
    SUBCASE("explicit runs reject unstable steps up front") {
        const auto box = make_box(1, std::vector<double>{8.0}, std::vector<int>{8});
        State initial = constant_state(box, {1.0});
        IntegratorConfig cfg{.scheme = Scheme::explicit_euler, .dt = 0.3, .t_end = 1.0};
        CHECK_THROWS_AS(run(decay_system(), initial, cfg), ConfigError);
    }
}

TEST_CASE("midpoint scheme is second order on linear decay") {
    const auto box = make_box(1, std::vector<double>{1.0}, std::vector<int>{4});
    auto err_at = [&](Scheme scheme, double dt) {
        State initial = constant_state(box, {1.0});
        IntegratorConfig cfg{.scheme = scheme, .dt = dt, .t_end = 1.0, .cfl_safety = 1.0};
        const auto result = run(decay_system(), initial, cfg);
        return std::abs(result.final_state.species[0].v[0] - std::exp(-1.0));
    };
    const double rk2 = err_at(Scheme::explicit_rk2, 0.01);
    const double euler = err_at(Scheme::explicit_euler, 0.01);
    CHECK(rk2 <= 1e-4);
    CHECK(rk2 * 20 < euler);
}

TEST_CASE("worker count comes from the environment") {
    unsetenv("RDMASS_THREADS");
    CHECK(configured_thread_count() == 1);
    setenv("RDMASS_THREADS", "4", 1);
    CHECK(configured_thread_count() == 4);
    setenv("RDMASS_THREADS", "1000", 1);
    CHECK(configured_thread_count() == 64);
    setenv("RDMASS_THREADS", "0", 1);
    CHECK(configured_thread_count() == 1);
    unsetenv("RDMASS_THREADS");
}

TEST_CASE("reaction sweep is thread-count invariant") {
    const auto box = make_box(3, std::vector<double>{1, 1, 1}, std::vector<int>{16, 16, 16});
    const auto sys = builtin_reversible(1, 1, {0.1, 0.15, 0.2, 0.25});
    auto advance = [&](int threads) {
        State state = random_state(box, 4, 2024, 0.0, 2.0);
        Integrator integ(sys, box, {.scheme = Scheme::imex_euler, .dt = 1e-3, .t_end = 1.0});
        integ.set_threads(threads);
        for (int k = 0; k < 5; ++k) integ.step(state, 1e-3);
        return state;
    };
    const State a = advance(1);
    const State b = advance(4);
    for (int i = 0; i < 4; ++i)
        for (std::size_t k = 0; k < a.species[i].v.size(); ++k)
            CHECK(a.species[i].v[k] == b.species[i].v[k]);
}
