#ifndef RDMASS_HELMHOLTZ_HPP
#define RDMASS_HELMHOLTZ_HPP

#include <memory>

#include "rdmass/grid.hpp"

namespace rdmass {

/// Solves (I - a * Lap_h) x = rhs for the reflected-ghost Neumann Laplacian.
///
/// Default path: the stencil is diagonal in the type-II cosine basis with
/// per-axis eigenvalues -(2/h_a^2)(1 - cos(pi j / N_a)), so one forward DCT,
/// a pointwise divide, and one inverse DCT solve the system to roundoff.
/// Fallback path: matrix-free conjugate gradient on the same operator, used
/// as an independent cross-check.
///
/// Both paths leave the cell sum of the solution equal to the cell sum of the
/// right-hand side (the zero mode has eigenvalue 0), and the inverse of the
/// M-matrix (I - a*Lap_h) is nonnegative, so nonnegative right-hand sides
/// stay nonnegative up to solver tolerance.
class HelmholtzSolver {
public:
    enum class Method { cosine_transform, conjugate_gradient };

    explicit HelmholtzSolver(const BoxDomain& domain);
    ~HelmholtzSolver();
    HelmholtzSolver(const HelmholtzSolver&) = delete;
    HelmholtzSolver& operator=(const HelmholtzSolver&) = delete;

    const BoxDomain& domain() const;

    /// Requires a > 0 and rhs on the solver's domain. One solve at a time per
    /// solver instance (the transform workspace is shared).
    ScalarField solve(double a, const ScalarField& rhs,
                      Method method = Method::cosine_transform) const;

    /// Conjugate-gradient controls (relative 2-norm residual target).
    void set_cg_tolerance(double rel_residual, int max_iterations);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace rdmass

#endif
