#include "rdmass/grid.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>

#include "rdmass/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "snapshot format assumes a little-endian host");

namespace rdmass {

double BoxDomain::volume() const {
    double vol = 1.0;
    for (int a = 0; a < n; ++a) vol *= L[a];
    return vol;
}

BoxDomain make_box(int n, std::span<const double> lengths, std::span<const int> cells) {
    if (n < 1 || n > 3) throw ArgumentError("dimension must be 1, 2 or 3");
    if (static_cast<int>(lengths.size()) != n || static_cast<int>(cells.size()) != n)
        throw ArgumentError("need one side length and one cell count per axis");
    BoxDomain box;
    box.n = n;
    std::size_t total = 1;
    for (int a = 0; a < n; ++a) {
        if (!(lengths[a] > 0.0) || !std::isfinite(lengths[a]))
            throw ArgumentError("side length must be positive");
        if (cells[a] < 2) throw ArgumentError("need at least 2 cells per axis");
        box.L[a] = lengths[a];
        box.N[a] = cells[a];
        box.h[a] = lengths[a] / cells[a];
        total *= static_cast<std::size_t>(cells[a]);
        if (total > (std::size_t{1} << 31)) throw ArgumentError("grid too large");
    }
    return box;
}

ScalarField neumann_laplacian_apply(const ScalarField& field) {
    const BoxDomain& d = field.domain;
    const int N0 = d.N[0], N1 = d.N[1], N2 = d.N[2];
    const std::ptrdiff_t s0 = static_cast<std::ptrdiff_t>(N1) * N2, s1 = N2, s2 = 1;
    const double w0 = 1.0 / (d.h[0] * d.h[0]);
    const double w1 = d.n >= 2 ? 1.0 / (d.h[1] * d.h[1]) : 0.0;
    const double w2 = d.n >= 3 ? 1.0 / (d.h[2] * d.h[2]) : 0.0;

    ScalarField out{d, std::vector<double>(d.cells())};
    const double* u = field.v.data();
    double* y = out.v.data();
    std::ptrdiff_t k = 0;
    for (int i0 = 0; i0 < N0; ++i0)
        for (int i1 = 0; i1 < N1; ++i1)
            for (int i2 = 0; i2 < N2; ++i2, ++k) {
                const double c = u[k];
                // Reflected ghosts: the out-of-range neighbor equals the cell
                // itself, so the boundary flux vanishes.
                double acc = ((i0 > 0 ? u[k - s0] : c) - 2.0 * c +
                              (i0 < N0 - 1 ? u[k + s0] : c)) *
                             w0;
                if (d.n >= 2)
                    acc += ((i1 > 0 ? u[k - s1] : c) - 2.0 * c +
                            (i1 < N1 - 1 ? u[k + s1] : c)) *
                           w1;
                if (d.n >= 3)
                    acc += ((i2 > 0 ? u[k - s2] : c) - 2.0 * c +
                            (i2 < N2 - 1 ? u[k + s2] : c)) *
                           w2;
                y[k] = acc;
            }
    return out;
}

double lp_norm(const ScalarField& field, double p) {
    if (!(p >= 1.0)) throw ArgumentError("lp_norm requires p >= 1");
    if (std::isinf(p)) return field_max_abs(field);
    const double vol = field.domain.cell_volume();
    double acc = 0.0;
    if (p == 1.0) {
        for (double x : field.v) acc += std::abs(x);
    } else if (p == 2.0) {
        for (double x : field.v) acc += x * x;
    } else {
        for (double x : field.v) acc += std::pow(std::abs(x), p);
    }
    return std::pow(acc * vol, 1.0 / p);
}

double field_min(const ScalarField& field) {
    double lo = std::numeric_limits<double>::infinity();
    for (double x : field.v)
        if (x < lo) lo = x;
    return lo;
}

double field_max_abs(const ScalarField& field) {
    double hi = 0.0;
    for (double x : field.v) {
        const double a = std::abs(x);
        if (a > hi) hi = a;
    }
    return hi;
}

double cell_sum(const ScalarField& field) {
    double acc = 0.0;
    for (double x : field.v) acc += x;
    return acc;
}

MassSummary total_mass(const State& state, std::span<const double> weights) {
    MassSummary mass;
    mass.per_species.reserve(state.species.size());
    for (size_t i = 0; i < state.species.size(); ++i) {
        const double mi = cell_sum(state.species[i]) * state.species[i].domain.cell_volume();
        mass.per_species.push_back(mi);
        mass.total += (weights.empty() ? 1.0 : weights[i]) * mi;
    }
    return mass;
}

ScalarField species_sum(const State& state) {
    ScalarField out = state.species.front();
    for (size_t i = 1; i < state.species.size(); ++i)
        for (size_t k = 0; k < out.v.size(); ++k) out.v[k] += state.species[i].v[k];
    return out;
}

bool all_finite(const State& state) {
    for (const ScalarField& f : state.species)
        for (double x : f.v)
            if (!std::isfinite(x)) return false;
    return true;
}

void write_snapshot(const std::string& path, const ScalarField& field) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open snapshot for writing: " + path);
    os.write("RDM1", 4);
    const std::uint32_t n = static_cast<std::uint32_t>(field.domain.n);
    os.write(reinterpret_cast<const char*>(&n), 4);
    for (int a = 0; a < field.domain.n; ++a) {
        const std::uint32_t na = static_cast<std::uint32_t>(field.domain.N[a]);
        os.write(reinterpret_cast<const char*>(&na), 4);
    }
    os.write(reinterpret_cast<const char*>(field.v.data()),
             static_cast<std::streamsize>(field.v.size() * sizeof(double)));
    if (!os) throw IoError("snapshot write failed: " + path);
}

ScalarField read_snapshot(const std::string& path, const BoxDomain& domain) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open snapshot: " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "RDM1", 4) != 0)
        throw IoError("not a field snapshot (bad magic): " + path);
    std::uint32_t n = 0;
    is.read(reinterpret_cast<char*>(&n), 4);
    if (!is || static_cast<int>(n) != domain.n)
        throw IoError("snapshot dimension does not match the configured domain: " + path);
    for (int a = 0; a < domain.n; ++a) {
        std::uint32_t na = 0;
        is.read(reinterpret_cast<char*>(&na), 4);
        if (!is || static_cast<int>(na) != domain.N[a])
            throw IoError("snapshot grid shape does not match the configured domain: " + path);
    }
    ScalarField field{domain, std::vector<double>(domain.cells())};
    is.read(reinterpret_cast<char*>(field.v.data()),
            static_cast<std::streamsize>(field.v.size() * sizeof(double)));
    if (!is) throw IoError("snapshot truncated: " + path);
    return field;
}

void write_field_csv(const std::string& path, const ScalarField& field) {
    if (field.domain.n != 1) throw ArgumentError("CSV export is defined for 1D fields");
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw IoError("cannot open CSV for writing: " + path);
    os << "x,value\n";
    char buf[64];
    for (int i = 0; i < field.domain.N[0]; ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", field.domain.center(0, i), field.v[i]);
        os << buf;
    }
    if (!os) throw IoError("CSV write failed: " + path);
}

} // namespace rdmass
