#include "rdmass/helmholtz.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <string>
#include <vector>

#include "rdmass/errors.hpp"

namespace rdmass {

namespace {

// FFTW plan creation/destruction touches global planner state.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

} // namespace

struct HelmholtzSolver::Impl {
    BoxDomain domain;
    double* buf = nullptr;
    fftw_plan forward = nullptr;
    fftw_plan inverse = nullptr;
    double scale = 1.0;                  // 1 / prod(2 N_a), the DCT round-trip factor
    std::vector<double> mode_factor[3];  // (2/h^2)(1 - cos(pi j / N)) per axis
    double cg_rel_tol = 1e-13;
    int cg_max_iters = 2000;

    explicit Impl(const BoxDomain& d) : domain(d) {
        const std::size_t cells = d.cells();
        buf = fftw_alloc_real(cells);
        if (!buf) throw NumericError("transform workspace allocation failed");

        int dims[3];
        fftw_r2r_kind fwd_kind[3], inv_kind[3];
        for (int a = 0; a < d.n; ++a) {
            dims[a] = d.N[a];
            fwd_kind[a] = FFTW_REDFT10;
            inv_kind[a] = FFTW_REDFT01;
            scale /= 2.0 * d.N[a];
        }
        {
            std::lock_guard<std::mutex> lock(planner_mutex());
            forward = fftw_plan_r2r(d.n, dims, buf, buf, fwd_kind, FFTW_ESTIMATE);
            inverse = fftw_plan_r2r(d.n, dims, buf, buf, inv_kind, FFTW_ESTIMATE);
        }
        if (!forward || !inverse) throw NumericError("transform planning failed");

        for (int a = 0; a < 3; ++a) {
            if (a < d.n) {
                mode_factor[a].resize(d.N[a]);
                for (int j = 0; j < d.N[a]; ++j)
                    mode_factor[a][j] = 2.0 / (d.h[a] * d.h[a]) *
                                        (1.0 - std::cos(std::numbers::pi * j / d.N[a]));
            } else {
                mode_factor[a].assign(1, 0.0);
            }
        }
    }

    ~Impl() {
        std::lock_guard<std::mutex> lock(planner_mutex());
        if (forward) fftw_destroy_plan(forward);
        if (inverse) fftw_destroy_plan(inverse);
        if (buf) fftw_free(buf);
    }

    ScalarField solve_dct(double a, const ScalarField& rhs) const {
        const std::size_t cells = domain.cells();
        std::copy(rhs.v.begin(), rhs.v.end(), buf);
        fftw_execute(forward);

        const auto& f0 = mode_factor[0];
        const auto& f1 = mode_factor[1];
        const auto& f2 = mode_factor[2];
        std::size_t k = 0;
        for (std::size_t j0 = 0; j0 < f0.size(); ++j0)
            for (std::size_t j1 = 0; j1 < f1.size(); ++j1) {
                const double l01 = f0[j0] + f1[j1];
                for (std::size_t j2 = 0; j2 < f2.size(); ++j2, ++k)
                    buf[k] *= scale / (1.0 + a * (l01 + f2[j2]));
            }

        fftw_execute(inverse);
        ScalarField out{domain, std::vector<double>(buf, buf + cells)};
        return out;
    }

    ScalarField solve_cg(double a, const ScalarField& rhs) const {
        auto apply = [&](const ScalarField& x) {
            ScalarField y = neumann_laplacian_apply(x);
            for (std::size_t k = 0; k < y.v.size(); ++k) y.v[k] = x.v[k] - a * y.v[k];
            return y;
        };
        auto dot = [](const ScalarField& x, const ScalarField& y) {
            double acc = 0.0;
            for (std::size_t k = 0; k < x.v.size(); ++k) acc += x.v[k] * y.v[k];
            return acc;
        };

        ScalarField x = ScalarField::constant(domain, 0.0);
        ScalarField r = rhs;
        double rr = dot(r, r);
        const double target2 = cg_rel_tol * cg_rel_tol * std::max(rr, 1e-300);
        if (rr <= target2) return x;
        ScalarField p = r;
        for (int it = 0; it < cg_max_iters; ++it) {
            ScalarField q = apply(p);
            const double alpha = rr / dot(p, q);
            for (std::size_t k = 0; k < x.v.size(); ++k) {
                x.v[k] += alpha * p.v[k];
                r.v[k] -= alpha * q.v[k];
            }
            const double rr_new = dot(r, r);
            if (rr_new <= target2) return x;
            const double beta = rr_new / rr;
            rr = rr_new;
            for (std::size_t k = 0; k < p.v.size(); ++k) p.v[k] = r.v[k] + beta * p.v[k];
        }
        throw NumericError("conjugate gradient did not converge; residual " +
                           std::to_string(std::sqrt(rr)));
    }
};

HelmholtzSolver::HelmholtzSolver(const BoxDomain& domain) : impl_(std::make_unique<Impl>(domain)) {}
HelmholtzSolver::~HelmholtzSolver() = default;

const BoxDomain& HelmholtzSolver::domain() const { return impl_->domain; }

void HelmholtzSolver::set_cg_tolerance(double rel_residual, int max_iterations) {
    impl_->cg_rel_tol = rel_residual;
    impl_->cg_max_iters = max_iterations;
}

ScalarField HelmholtzSolver::solve(double a, const ScalarField& rhs, Method method) const {
    if (!(a > 0.0)) throw ArgumentError("helmholtz solve requires a > 0");
    if (!(rhs.domain == impl_->domain)) throw ArgumentError("rhs is on a different grid");
    return method == Method::cosine_transform ? impl_->solve_dct(a, rhs)
                                              : impl_->solve_cg(a, rhs);
}

} // namespace rdmass
