#include <doctest.h>

#include <cmath>
#include <random>

#include "mcflow/grid.hpp"
#include "oracles.hpp"

using namespace mcf;

namespace {

ScalarField field_1d(std::vector<double> vals, double eps = 1.0, double dbar = 100.0) {
    GridGeometry g = GridGeometry::box1d(static_cast<int>(vals.size()), eps);
    ScalarField f(g, 0.0, dbar);
    f.values = std::move(vals);
    return f;
}

PhaseMask disk_mask(int n, double radius, double eps = 1.0) {
    GridGeometry g = GridGeometry::box2d(n, n, eps);
    PhaseMask m(g, 1);
    const int c = n / 2;
    const double r2 = (radius / eps) * (radius / eps);
    for (std::size_t i = 0; i < m.labels.size(); ++i) {
        const auto q = g.coords_of(i);
        const double dx = q[0] - c, dy = q[1] - c;
        if (dx * dx + dy * dy <= r2) m.labels[i] = 0;
    }
    return m;
}

}  // namespace

TEST_CASE("geometry validation") {
    CHECK_THROWS_AS(GridGeometry(2, 1.0, {2, 5, 1}), grid_error);
    CHECK_THROWS_AS(GridGeometry(2, -1.0, {5, 5, 1}), grid_error);
    CHECK_NOTHROW(GridGeometry::box2d(3, 3));
    GridGeometry g = GridGeometry::box1d(5);
    CHECK(g.reflect(-1, 0) == 0);
    CHECK(g.reflect(-2, 0) == 1);
    CHECK(g.reflect(5, 0) == 4);
    CHECK(g.reflect(6, 0) == 3);
}

TEST_CASE("laplacian annihilates constants") {
    GridGeometry g = GridGeometry::box2d(7, 5);
    ScalarField f(g, 3.25, 100.0);
    ScalarField lap = discrete_laplacian(f);
    for (double v : lap.values) CHECK(v == 0.0);
}

TEST_CASE("laplacian 1d stencil arithmetic") {
    ScalarField f = field_1d({0.0, 1.0, 4.0});
    ScalarField lap = discrete_laplacian(f);
    CHECK(lap.values[1] == doctest::Approx(2.0).epsilon(1e-15));
    // mirror at the faces: v_{-1} = v_0 and v_3 = v_2
    CHECK(lap.values[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(lap.values[2] == doctest::Approx(-3.0).epsilon(1e-15));
}

TEST_CASE("laplacian of |x|^2 is 2N in the interior") {
    const double eps = 0.5;
    GridGeometry g = GridGeometry::box2d(11, 11, eps);
    ScalarField f(g, 0.0, 1e9);
    for (std::size_t i = 0; i < f.size(); ++i) {
        const auto c = g.coords_of(i);
        const double x = eps * (c[0] - 5), y = eps * (c[1] - 5);
        f.values[i] = x * x + y * y;
    }
    ScalarField lap = discrete_laplacian(f);
    for (std::size_t i = 0; i < f.size(); ++i) {
        const auto c = g.coords_of(i);
        if (c[0] < 1 || c[0] > 9 || c[1] < 1 || c[1] > 9) continue;
        CHECK(std::abs(lap.values[i] - 4.0) < 1e-9);
    }
}

TEST_CASE("laplacian is linear and kills affine fields") {
    GridGeometry g = GridGeometry::box2d(8, 8);
    std::mt19937_64 rng(7);
    auto uniform = [&]() { return (rng() >> 11) * 0x1.0p-53 - 0.5; };
    ScalarField u(g, 0.0, 100.0), v(g, 0.0, 100.0);
    for (std::size_t i = 0; i < u.size(); ++i) {
        u.values[i] = uniform();
        v.values[i] = uniform();
    }
    const double a = 0.7, b = -1.3;
    ScalarField w(g, 0.0, 100.0);
    for (std::size_t i = 0; i < u.size(); ++i) w.values[i] = a * u.values[i] + b * v.values[i];
    ScalarField lw = discrete_laplacian(w), lu = discrete_laplacian(u),
                lv = discrete_laplacian(v);
    double scale = 0.0;
    for (double x : lw.values) scale = std::max(scale, std::abs(x));
    for (std::size_t i = 0; i < u.size(); ++i)
        CHECK(std::abs(lw.values[i] - (a * lu.values[i] + b * lv.values[i])) <=
              1e-12 * std::max(scale, 1.0));

    ScalarField affine(g, 0.0, 100.0);
    for (std::size_t i = 0; i < affine.size(); ++i) {
        const auto c = g.coords_of(i);
        affine.values[i] = 0.25 * c[0] - 0.75 * c[1] + 2.0;
    }
    ScalarField la = discrete_laplacian(affine);
    for (std::size_t i = 0; i < la.size(); ++i) {
        const auto c = g.coords_of(i);
        if (c[0] < 1 || c[0] > 6 || c[1] < 1 || c[1] > 6) continue;
        CHECK(std::abs(la.values[i]) < 1e-12);
    }
}

TEST_CASE("exact signed distance: single cell and flags") {
    GridGeometry g = GridGeometry::box2d(6, 6);
    PhaseMask m(g, 1);
    m.labels[g.linear_index({0, 0, 0})] = 0;
    SignedDistanceResult r = exact_signed_distance(m, 100.0);
    CHECK(!r.one_phase_empty);
    CHECK(r.field.values[g.linear_index({3, 4, 0})] == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(r.field.values[g.linear_index({0, 0, 0})] < 0.0);

    PhaseMask all0(g, 0);
    SignedDistanceResult r0 = exact_signed_distance(all0, 30.0);
    CHECK(r0.one_phase_empty);
    CHECK(r0.empty_phase == 1);
    for (double v : r0.field.values) CHECK(v == -30.0);
}

TEST_CASE("exact signed distance matches an independent recomputation") {
    PhaseMask m = disk_mask(9, 2.5);
    SignedDistanceResult r = exact_signed_distance(m, 1e9);
    const std::vector<double> ref = oracle::signed_distance(m, 1e9);
    for (std::size_t i = 0; i < ref.size(); ++i) CHECK(r.field.values[i] == ref[i]);
    CHECK(lipschitz_check(r.field).ok);
    for (std::size_t i = 0; i < ref.size(); ++i)
        CHECK((r.field.values[i] < 0.0) == (m.labels[i] == 0));
}

TEST_CASE("seed field") {
    GridGeometry g = GridGeometry::box2d(8, 8);
    PhaseMask empty0(g, 1);
    ScalarField s = seed_field(empty0, 30.0);
    for (double v : s.values) CHECK(v == 0.5);

    PhaseMask checker(g, 1);
    for (std::size_t i = 0; i < checker.labels.size(); ++i) {
        const auto c = g.coords_of(i);
        checker.labels[i] = static_cast<std::uint8_t>((c[0] + c[1]) % 2);
    }
    ScalarField sc = seed_field(checker, 30.0);
    CHECK(lipschitz_check(sc).ok);
    for (std::size_t i = 0; i < sc.size(); ++i)
        CHECK(std::abs(sc.values[i]) == 0.5);
}

TEST_CASE("seed field on the radius-50 disk counts its lattice points") {
    PhaseMask m = disk_mask(128, 50.0);
    ScalarField s = seed_field(m, 30.0);
    std::size_t neg = 0;
    for (double v : s.values) neg += (v < 0.0);
    // lattice points with dx^2 + dy^2 <= 2500 around the center
    std::size_t expect = 0;
    for (int dx = -50; dx <= 50; ++dx)
        for (int dy = -50; dy <= 50; ++dy)
            if (dx * dx + dy * dy <= 2500) ++expect;
    CHECK(neg == expect);
    CHECK(neg >= 7815);
    CHECK(neg <= 7875);
    CHECK(lipschitz_check(s).ok);
}

TEST_CASE("lipschitz check accepts distances and reports violations") {
    PhaseMask m = disk_mask(16, 5.0);
    ScalarField d = exact_signed_distance(m, 100.0).field;
    CHECK(lipschitz_check(d).ok);

    ScalarField bumped = d;
    const std::size_t cell = d.geometry.linear_index({8, 8, 0});
    bumped.values[cell] += 2.0;
    LipschitzReport rep = lipschitz_check(bumped);
    CHECK(!rep.ok);
    CHECK((rep.cell_a == cell || rep.cell_b == cell));
    CHECK(rep.value_gap > rep.distance);
}
