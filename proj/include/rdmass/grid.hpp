#ifndef RDMASS_GRID_HPP
#define RDMASS_GRID_HPP

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace rdmass {

/// Axis-aligned box discretized by a uniform cell-centered grid. The
/// homogeneous Neumann boundary is realized by even (reflected) ghost cells,
/// so the discrete Laplacian is symmetric negative semidefinite and its cell
/// sums telescope to zero.
struct BoxDomain {
    int n = 1;                       // spatial dimension, 1..3
    std::array<double, 3> L{1, 1, 1}; // side lengths (axes >= n unused)
    std::array<int, 3> N{1, 1, 1};    // cells per axis (axes >= n are 1)
    std::array<double, 3> h{1, 1, 1}; // cell widths L[a]/N[a]

    std::size_t cells() const {
        return static_cast<std::size_t>(N[0]) * N[1] * N[2];
    }
    double cell_volume() const { return h[0] * h[1] * h[2]; }
    double volume() const;

    /// Cell-center coordinate along an axis.
    double center(int axis, int index) const { return (index + 0.5) * h[axis]; }

    friend bool operator==(const BoxDomain&, const BoxDomain&) = default;
};

/// Validates and builds a BoxDomain (N_j >= 2, L_j > 0, cell count bounded).
BoxDomain make_box(int n, std::span<const double> lengths, std::span<const int> cells);

/// One cell-centered scalar field over a box, stored row-major with axis 0
/// slowest.
struct ScalarField {
    BoxDomain domain;
    std::vector<double> v;

    static ScalarField constant(const BoxDomain& d, double value) {
        return {d, std::vector<double>(d.cells(), value)};
    }
};

/// Concentrations of all species at one time.
struct State {
    std::vector<ScalarField> species;
    double t = 0.0;

    int m() const { return static_cast<int>(species.size()); }
    const BoxDomain& domain() const { return species.front().domain; }
};

struct MassSummary {
    std::vector<double> per_species;
    double total = 0.0; // weighted by SystemSpec weights (default 1)
};

/// Second-order reflected-ghost stencil of the Neumann Laplacian.
ScalarField neumann_laplacian_apply(const ScalarField& field);

/// (sum_k |u_k|^p * cell volume)^(1/p); p = infinity gives max |u_k|.
/// Requires p >= 1.
double lp_norm(const ScalarField& field, double p);

double field_min(const ScalarField& field);
double field_max_abs(const ScalarField& field);
double cell_sum(const ScalarField& field);

MassSummary total_mass(const State& state, std::span<const double> weights = {});

/// Pointwise sum of all species fields.
ScalarField species_sum(const State& state);

bool all_finite(const State& state);

/// Binary snapshot of one field: magic "RDM1", uint32 dimension, uint32 cell
/// counts per axis, then the row-major values as little-endian 64-bit floats.
void write_snapshot(const std::string& path, const ScalarField& field);

/// Reads a snapshot written by write_snapshot; the file's grid shape must
/// match `domain` (side lengths are carried by the caller's domain).
ScalarField read_snapshot(const std::string& path, const BoxDomain& domain);

/// CSV export (columns x,value) for 1D fields.
void write_field_csv(const std::string& path, const ScalarField& field);

} // namespace rdmass

#endif
