#include "rdmass/oracle.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <cmath>

#include "rdmass/errors.hpp"

namespace rdmass {

std::vector<double> wellmixed_oracle(const SystemSpec& system, std::vector<double> u0,
                                     double t_end) {
    namespace odeint = boost::numeric::odeint;
    using StateVec = std::vector<double>;

    if (static_cast<int>(u0.size()) != system.m)
        throw ArgumentError("initial vector length does not match the species count");
    for (double x : u0)
        if (!(x >= 0.0) || !std::isfinite(x))
            throw ArgumentError("oracle initial data must be nonnegative and finite");
    if (t_end < 0.0) throw ArgumentError("t_end must be nonnegative");
    if (t_end == 0.0) return u0;

    double sup0 = 0.0;
    for (double x : u0) sup0 = std::max(sup0, x);
    const double escape = 1e12 * (1.0 + sup0);

    auto rhs = [&](const StateVec& u, StateVec& dudt, double) {
        system.field.eval_into(u, dudt);
    };

    auto stepper =
        odeint::make_controlled(1e-12, 1e-10, odeint::runge_kutta_dopri5<StateVec>());
    double t = 0.0;
    double dt = std::min(t_end, 1e-3);
    StateVec u = std::move(u0);

    while (t < t_end) {
        for (double x : u)
            if (!(std::abs(x) <= escape))
                throw BlowupError("well-mixed solution diverged near t = " + std::to_string(t), t);
        dt = std::min(dt, t_end - t);
        odeint::controlled_step_result res;
        try {
            res = stepper.try_step(rhs, u, t, dt);
        } catch (const NumericError&) {
            throw BlowupError("well-mixed solution overflowed near t = " + std::to_string(t), t);
        }
        if (res == odeint::fail && dt < 1e-14 * std::max(1.0, t))
            throw BlowupError("step size underflow near t = " + std::to_string(t), t);
    }
    return u;
}

} // namespace rdmass
