#include "cjm/errors.hpp"
#include "cjm/grid.hpp"

#include <doctest.h>

#include <cmath>
#include <set>

using namespace cjm;

TEST_SUITE("grid") {

TEST_CASE("uniform grid spacing and sizes") {
    const auto g = make_uniform_grid(1024, CoordinateSystem::cartesian(), 1);
    CHECK(g->nx() == 1024);
    CHECK(g->ny() == 1024);
    CHECK(g->h1() == 1.0 / 1024);
    CHECK(g->h2() == 1.0 / 1024);
    CHECK(g->uniform());
    CHECK(g->lx() == 1.0);

    const auto g128 = make_uniform_grid(128, CoordinateSystem::cartesian(), 2);
    CHECK(g128->h1() == 1.0 / 128);
    CHECK(g128->ghost() == 2);
}

TEST_CASE("smallest grid with two ghost layers") {
    // n counts intervals: 3 unknowns per axis plus 2 ghost layers each side.
    const auto g = make_uniform_grid(4, CoordinateSystem::cartesian(), 2);
    CHECK(g->h1() == 0.25);
    CHECK(g->rows() == 7);
    CHECK(g->stride() == 7);
    CHECK(g->storage_size() == 49);
    CHECK(g->interior_count() == 9);
}

TEST_CASE("invalid grids are rejected") {
    CHECK_THROWS_AS(make_uniform_grid(3, CoordinateSystem::cartesian(), 1), ConfigError);
    CHECK_THROWS_AS(make_uniform_grid(8, CoordinateSystem::cartesian(), 0), ConfigError);
    CHECK_THROWS_AS(make_uniform_grid(8, CoordinateSystem::cartesian(), 3), ConfigError);
    CHECK_THROWS_AS(CoordinateSystem::polar({0.0, 1.0}, {0.0, 1.0}), ConfigError);
    CHECK_THROWS_AS(CoordinateSystem::bipolar(0.0, {0.5, 1.0}, {0.5, 1.0}), ConfigError);
    CHECK_THROWS_AS(CoordinateSystem::bipolar(-1.0, {0.5, 1.0}, {0.5, 1.0}), ConfigError);
    // Polar radii must stay positive on the ghost ring too.
    CHECK_THROWS_AS(make_uniform_grid(4, CoordinateSystem::polar({0.1, 0.5}, {0.0, 1.0}), 2), ConfigError);
}

TEST_CASE("node coordinates") {
    const auto g = make_uniform_grid(4, CoordinateSystem::cartesian(), 1);
    auto [x, y] = g->node_coords(1, 1);
    CHECK(x == 0.25);
    CHECK(y == 0.25);
    auto [gx, gy] = g->node_coords(0, 2);
    CHECK(gx == 0.0);
    CHECK(gy == 0.5);
    auto [ex, ey] = g->node_coords(4, 4);
    CHECK(ex == 1.0);
    CHECK(ey == 1.0);
    CHECK_THROWS_AS(g->node_coords(-1, 1), ConfigError);
    CHECK_THROWS_AS(g->node_coords(1, 5), ConfigError);

    const auto p = make_uniform_grid(4, CoordinateSystem::polar({1.0, 2.0}, {0.0, 1.0}), 1);
    CHECK(p->node_coords(2, 1).first == doctest::Approx(1.5).epsilon(1e-15));
}

TEST_CASE("adjacent interior nodes differ by the local spacing") {
    for (int ghost : {1, 2}) {
        const auto g = make_uniform_grid(10, CoordinateSystem::polar({1.0, 3.0}, {0.0, 2.0}), ghost);
        for_each_interior(*g, [&](int i, int j) {
            if (i + 1 <= g->nx() - 1) {
                auto a = g->node_coords(i, j);
                auto b = g->node_coords(i + 1, j);
                CHECK(b.first - a.first == doctest::Approx(g->dx1(i)).epsilon(1e-14));
                CHECK(b.second == a.second);
            }
            if (j + 1 <= g->ny() - 1) {
                auto a = g->node_coords(i, j);
                auto b = g->node_coords(i, j + 1);
                CHECK(b.second - a.second == doctest::Approx(g->dx2(j)).epsilon(1e-14));
                CHECK(b.first == a.first);
            }
        });
    }
}

TEST_CASE("interior iteration visits every unknown once") {
    for (int n : {4, 5, 16, 33}) {
        for (int ghost : {1, 2}) {
            const auto g = make_uniform_grid(n, CoordinateSystem::cartesian(), ghost);
            std::set<std::size_t> seen;
            std::size_t count = 0;
            for_each_interior(*g, [&](int i, int j) {
                ++count;
                seen.insert(g->interior_number(i, j));
                CHECK(g->is_interior(i, j));
            });
            CHECK(count == static_cast<std::size_t>((n - 1) * (n - 1)));
            CHECK(seen.size() == count);
            std::size_t ghosts = 0;
            for_each_ghost(*g, [&](int, int) { ++ghosts; });
            CHECK(ghosts + count == g->storage_size());
        }
    }
}

TEST_CASE("fill_dirichlet") {
    const auto g = make_uniform_grid(4, CoordinateSystem::cartesian(), 2);
    const double h = g->h1();

    SUBCASE("exact solution on the ghost rings") {
        Field f(g);
        fill_dirichlet(f, [](double x, double y) { return -std::exp(x * y); });
        for_each_ghost(*g, [&](int i, int j) {
            CHECK(f(i, j) == -std::exp(g->x1(i) * g->x2(j)));
        });
        for_each_interior(*g, [&](int i, int j) { CHECK(f(i, j) == 0.0); });
    }

    SUBCASE("zero boundary") {
        Field f(g, 3.0);
        fill_dirichlet(f, [](double, double) { return 0.0; });
        for_each_ghost(*g, [&](int i, int j) { CHECK(f(i, j) == 0.0); });
        for_each_interior(*g, [&](int i, int j) { CHECK(f(i, j) == 3.0); });
    }

    SUBCASE("linear function at the corners") {
        const auto g1 = make_uniform_grid(4, CoordinateSystem::cartesian(), 1);
        Field f1(g1);
        fill_dirichlet(f1, [](double x, double y) { return x + y; });
        CHECK(f1(0, 0) == 0.0);
        Field f2(g);
        fill_dirichlet(f2, [](double x, double y) { return x + y; });
        CHECK(f2(-1, -1) == doctest::Approx(-2.0 * h).epsilon(1e-15));
        CHECK(f2(5, 5) == doctest::Approx(2.0 + 2.0 * h).epsilon(1e-15));
    }

    SUBCASE("idempotent") {
        for (int n : {4, 7, 12}) {
            const auto gg = make_uniform_grid(n, CoordinateSystem::cartesian(), 2);
            Field once(gg, 0.5);
            fill_dirichlet(once, [](double x, double y) { return std::sin(3 * x) * std::cos(y) + x * y; });
            Field twice = once;
            fill_dirichlet(twice, [](double x, double y) { return std::sin(3 * x) * std::cos(y) + x * y; });
            CHECK(once == twice);
        }
    }
}

TEST_CASE("fields on general grids") {
    // Non-uniform x1 spacing is carried by the data model.
    std::vector<double> x1{0.0, 0.1, 0.3, 0.6, 1.0};
    std::vector<double> x2{0.0, 0.25, 0.5, 0.75, 1.0};
    const auto g = std::make_shared<const Grid>(4, 4, 1, CoordinateSystem::cartesian(), x1, x2);
    CHECK_FALSE(g->uniform());
    CHECK(g->dx1(1) == doctest::Approx(0.2));
    CHECK(g->dx1(4) == doctest::Approx(0.4));
    CHECK_THROWS_AS(Grid(4, 4, 1, CoordinateSystem::cartesian(), {0.0, 0.2, 0.1, 0.6, 1.0}, x2), ConfigError);
    CHECK_THROWS_AS(Grid(4, 4, 1, CoordinateSystem::cartesian(), {0.0, 1.0}, x2), ConfigError);
}

}  // TEST_SUITE
