#ifndef RDMASS_ORACLE_HPP
#define RDMASS_ORACLE_HPP

#include <vector>

#include "rdmass/system.hpp"

namespace rdmass {

/// Solves the well-mixed ordinary system u' = f(u) from nonnegative data with
/// an adaptive embedded Runge-Kutta method (relative tolerance 1e-10). For
/// spatially constant data the full model reduces to exactly this system,
/// which makes it an independent reference for the grid integrator.
///
/// Throws BlowupError carrying the divergence time estimate if the solution
/// escapes before t_end.
std::vector<double> wellmixed_oracle(const SystemSpec& system, std::vector<double> u0,
                                     double t_end);

} // namespace rdmass

#endif
