#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "rdmass/errors.hpp"
#include "rdmass/grid.hpp"
#include "support/dense.hpp"

using namespace rdmass;
using rdmass::testing::dense_neumann_laplacian;
using rdmass::testing::random_values;

namespace {

ScalarField random_field(const BoxDomain& box, std::uint64_t seed, double lo = 0.0,
                         double hi = 1.0) {
    return {box, random_values(box.cells(), seed, lo, hi)};
}

double dot(const ScalarField& a, const ScalarField& b) {
    double acc = 0.0;
    for (std::size_t k = 0; k < a.v.size(); ++k) acc += a.v[k] * b.v[k];
    return acc;
}

} // namespace

TEST_CASE("box construction and validation") {
    const auto box = make_box(2, std::vector<double>{2.0, 1.0}, std::vector<int>{4, 8});
    CHECK(box.cells() == 32);
    CHECK(box.h[0] == 0.5);
    CHECK(box.h[1] == 0.125);
    CHECK(box.volume() == 2.0);
    CHECK(box.cell_volume() == doctest::Approx(0.0625));

    CHECK_THROWS_AS(make_box(0, {}, {}), ArgumentError);
    CHECK_THROWS_AS(make_box(1, std::vector<double>{1.0}, std::vector<int>{1}), ArgumentError);
    CHECK_THROWS_AS(make_box(1, std::vector<double>{-1.0}, std::vector<int>{4}), ArgumentError);
    CHECK_THROWS_AS(make_box(2, std::vector<double>{1.0}, std::vector<int>{4, 4}), ArgumentError);
    CHECK_THROWS_AS(make_box(3, std::vector<double>{1, 1, 1}, std::vector<int>{2048, 2048, 2048}),
                    ArgumentError);
}

TEST_CASE("reflected-ghost stencil") {
    SUBCASE("constants are in the kernel") {
        const auto box = make_box(3, std::vector<double>{1, 2, 3}, std::vector<int>{4, 3, 5});
        const auto lap = neumann_laplacian_apply(ScalarField::constant(box, 7.5));
        for (double v : lap.v) CHECK(v == 0.0);
    }
    SUBCASE("hand-checked 1D spike") {
        const auto box = make_box(1, std::vector<double>{3.0}, std::vector<int>{3});
        const auto lap = neumann_laplacian_apply({box, {0.0, 1.0, 0.0}});
        CHECK(lap.v[0] == 1.0);
        CHECK(lap.v[1] == -2.0);
        CHECK(lap.v[2] == 1.0);
    }
    SUBCASE("cell sums telescope to zero") {
        const BoxDomain boxes[] = {
            make_box(1, std::vector<double>{1.0}, std::vector<int>{17}),
            make_box(2, std::vector<double>{1.0, 0.7}, std::vector<int>{9, 6}),
            make_box(3, std::vector<double>{1.0, 1.0, 2.0}, std::vector<int>{5, 4, 6}),
        };
        for (const auto& box : boxes) {
            const auto u = random_field(box, 99, -1.0, 1.0);
            const auto lap = neumann_laplacian_apply(u);
            double sum = 0.0, abs_sum = 0.0;
            for (double v : lap.v) {
                sum += v;
                abs_sum += std::abs(v);
            }
            CHECK(std::abs(sum) <= 1e-12 * abs_sum + 1e-300);
        }
    }
    SUBCASE("agrees with the dense assembly on small grids") {
        const BoxDomain boxes[] = {
            make_box(1, std::vector<double>{1.0}, std::vector<int>{5}),
            make_box(2, std::vector<double>{1.0, 0.5}, std::vector<int>{4, 5}),
            make_box(3, std::vector<double>{1.0, 1.5, 0.8}, std::vector<int>{3, 4, 5}),
        };
        for (const auto& box : boxes) {
            const auto mat = dense_neumann_laplacian(box);
            const std::size_t n = box.cells();
            const auto u = random_field(box, 5, -2.0, 2.0);
            const auto lap = neumann_laplacian_apply(u);
            for (std::size_t r = 0; r < n; ++r) {
                double expect = 0.0;
                for (std::size_t c = 0; c < n; ++c) expect += mat[r * n + c] * u.v[c];
                CHECK(lap.v[r] == doctest::Approx(expect).epsilon(1e-13));
            }
        }
    }
    SUBCASE("the operator is symmetric") {
        const auto box = make_box(3, std::vector<double>{1, 1, 1}, std::vector<int>{6, 5, 4});
        for (int k = 0; k < 20; ++k) {
            const auto u = random_field(box, 200 + k, -1.0, 1.0);
            const auto v = random_field(box, 300 + k, -1.0, 1.0);
            const double left = dot(neumann_laplacian_apply(u), v);
            const double right = dot(u, neumann_laplacian_apply(v));
            CHECK(left == doctest::Approx(right).epsilon(1e-12));
        }
    }
}

TEST_CASE("norms and quadrature") {
    SUBCASE("hand-checked values") {
        const auto box2 = make_box(2, std::vector<double>{2.0, 1.5}, std::vector<int>{4, 4});
        CHECK(lp_norm(ScalarField::constant(box2, 1.0), 1.0) == doctest::Approx(3.0));
        CHECK(lp_norm(ScalarField::constant(box2, 1.0),
                      std::numeric_limits<double>::infinity()) == 1.0);

        const auto box1 = make_box(1, std::vector<double>{1.0}, std::vector<int>{2});
        const ScalarField u{box1, {3.0, 4.0}};
        CHECK(lp_norm(u, 2.0) == doctest::Approx(std::sqrt(12.5)).epsilon(1e-15));
    }
    SUBCASE("monotone in the field values for nonnegative fields") {
        const auto box = make_box(2, std::vector<double>{1, 1}, std::vector<int>{6, 6});
        const auto u = random_field(box, 17, 0.0, 2.0);
        auto w = u;
        for (double& x : w.v) x += 0.25;
        for (double p : {1.0, 2.0, std::numeric_limits<double>::infinity()})
            CHECK(lp_norm(u, p) <= lp_norm(w, p));
    }
    SUBCASE("p < 1 is rejected") {
        const auto box = make_box(1, std::vector<double>{1.0}, std::vector<int>{2});
        CHECK_THROWS_AS(lp_norm(ScalarField::constant(box, 1.0), 0.5), ArgumentError);
    }
}

TEST_CASE("total mass") {
    const auto box = make_box(2, std::vector<double>{1, 1}, std::vector<int>{8, 8});
    SUBCASE("zero state") {
        State state{{ScalarField::constant(box, 0.0), ScalarField::constant(box, 0.0)}, 0.0};
        const auto mass = total_mass(state);
        CHECK(mass.total == 0.0);
        CHECK(mass.per_species[0] == 0.0);
    }
    SUBCASE("constant state on the unit box") {
        State state{{ScalarField::constant(box, 2.0), ScalarField::constant(box, 2.0),
                     ScalarField::constant(box, 2.0)},
                    0.0};
        const auto mass = total_mass(state);
        for (double v : mass.per_species) CHECK(v == doctest::Approx(2.0).epsilon(1e-14));
        CHECK(mass.total == doctest::Approx(6.0).epsilon(1e-14));
    }
    SUBCASE("coincides with the L1 norm for nonnegative fields") {
        State state{{random_field(box, 4, 0.0, 3.0)}, 0.0};
        CHECK(total_mass(state).total ==
              doctest::Approx(lp_norm(state.species[0], 1.0)).epsilon(1e-13));
    }
    SUBCASE("weights scale the total") {
        State state{{ScalarField::constant(box, 1.0), ScalarField::constant(box, 1.0)}, 0.0};
        const std::vector<double> w{2.0, 3.0};
        CHECK(total_mass(state, w).total == doctest::Approx(5.0).epsilon(1e-14));
    }
}

TEST_CASE("snapshot round-trip is bit-exact") {
    const auto dir = std::filesystem::temp_directory_path() / "rdmass_grid_test";
    std::filesystem::create_directories(dir);
    const auto box = make_box(3, std::vector<double>{1, 1, 1}, std::vector<int>{4, 3, 2});
    const auto field = random_field(box, 8, 0.0, 5.0);
    const std::string path = (dir / "field.rdm").string();
    write_snapshot(path, field);
    const auto loaded = read_snapshot(path, box);
    REQUIRE(loaded.v.size() == field.v.size());
    for (std::size_t k = 0; k < field.v.size(); ++k) CHECK(loaded.v[k] == field.v[k]);

    const auto other = make_box(3, std::vector<double>{1, 1, 1}, std::vector<int>{4, 3, 3});
    CHECK_THROWS_AS(read_snapshot(path, other), IoError);
    CHECK_THROWS_AS(read_snapshot((dir / "missing.rdm").string(), box), IoError);
    std::filesystem::remove_all(dir);
}

TEST_CASE("1D CSV export") {
    const auto dir = std::filesystem::temp_directory_path() / "rdmass_grid_csv";
    std::filesystem::create_directories(dir);
    const auto box = make_box(1, std::vector<double>{1.0}, std::vector<int>{4});
    const ScalarField field{box, {0.5, 1.5, 2.5, 3.5}};
    const std::string path = (dir / "field.csv").string();
    write_field_csv(path, field);
    std::ifstream is(path);
    std::string header, row;
    std::getline(is, header);
    CHECK(header == "x,value");
    std::getline(is, row);
    CHECK(row == "0.125,0.5");

    const auto box2 = make_box(2, std::vector<double>{1, 1}, std::vector<int>{2, 2});
    CHECK_THROWS_AS(write_field_csv(path, ScalarField::constant(box2, 1.0)), ArgumentError);
    std::filesystem::remove_all(dir);
}
