#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "heatopt/grid.hpp"
#include "test_helpers.hpp"

using namespace heatopt;

TEST_CASE("grid construction and invariants") {
    Grid g = Grid::make_1d(0.0, 2.0, 5);
    CHECK(g.h[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(g.num_nodes() == 5);
    CHECK(g.is_boundary(0));
    CHECK(g.is_boundary(4));
    CHECK(!g.is_boundary(2));

    CHECK_THROWS_AS(Grid::make_1d(0.0, 1.0, 2), std::invalid_argument);
    CHECK_THROWS_AS(Grid::make_1d(1.0, 0.0, 5), std::invalid_argument);
    CHECK_THROWS_AS(Grid::make_2d({0, 0}, {1, 1}, {3, 2}), std::invalid_argument);

    Grid g2 = Grid::make_2d({0.0, -1.0}, {1.0, 1.0}, {5, 9});
    CHECK(g2.h[0] == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(g2.h[1] == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(g2.is_boundary(0, 4));
    CHECK(g2.is_boundary(2, 0));
    CHECK(!g2.is_boundary(2, 4));
}

TEST_CASE("laplacian exact on constants and quadratics") {
    SUBCASE("1D constant") {
        Grid g = Grid::make_1d(-1.0, 3.0, 17);
        ScalarField f(g, 4.2);
        ScalarField lap = laplacian(f);
        CHECK(lap.interior_only);
        for (int i = 1; i < g.n[0] - 1; ++i) CHECK(lap(i) == doctest::Approx(0.0).epsilon(1e-14));
        CHECK(lap(0) == 0.0);
    }
    SUBCASE("1D x^2 gives exactly 2") {
        Grid g = Grid::make_1d(-1.0, 3.0, 17);
        ScalarField f(g);
        for (int i = 0; i < g.n[0]; ++i) f(i) = g.x(i) * g.x(i);
        ScalarField lap = laplacian(f);
        for (int i = 1; i < g.n[0] - 1; ++i) CHECK(lap(i) == doctest::Approx(2.0).epsilon(1e-12));
    }
    SUBCASE("2D x^2 + y^2 gives exactly 4") {
        Grid g = Grid::make_2d({-1.0, -1.0}, {1.0, 1.0}, {9, 13});
        ScalarField f(g);
        for (int j = 0; j < g.n[1]; ++j)
            for (int i = 0; i < g.n[0]; ++i) f(i, j) = g.x(i) * g.x(i) + g.y(j) * g.y(j);
        ScalarField lap = laplacian(f);
        for (int j = 1; j < g.n[1] - 1; ++j)
            for (int i = 1; i < g.n[0] - 1; ++i)
                CHECK(lap(i, j) == doctest::Approx(4.0).epsilon(1e-12));
    }
}

TEST_CASE("laplacian is linear") {
    TestRng rng(7);
    Grid g = Grid::make_2d({0.0, 0.0}, {1.0, 2.0}, {11, 7});
    ScalarField f(g), q(g);
    for (auto& v : f.values) v = rng.uniform(-1.0, 1.0);
    for (auto& v : q.values) v = rng.uniform(-1.0, 1.0);
    const double a = 1.7, b = -0.3;
    ScalarField combo(g);
    for (std::size_t k = 0; k < combo.values.size(); ++k)
        combo.values[k] = a * f.values[k] + b * q.values[k];
    ScalarField lf = laplacian(f), lq = laplacian(q), lc = laplacian(combo);
    for (std::size_t k = 0; k < lc.values.size(); ++k) {
        double want = a * lf.values[k] + b * lq.values[k];
        CHECK(lc.values[k] == doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("laplacian second-order convergence on a smooth function") {
    auto err_at = [](int n) {
        Grid g = Grid::make_2d({0.0, 0.0}, {1.0, 1.0}, {n, n});
        ScalarField f(g);
        for (int j = 0; j < g.n[1]; ++j)
            for (int i = 0; i < g.n[0]; ++i)
                f(i, j) = std::sin(2.0 * g.x(i)) * std::exp(g.y(j));
        ScalarField lap = laplacian(f);
        double e = 0.0;
        for (int j = 1; j < g.n[1] - 1; ++j)
            for (int i = 1; i < g.n[0] - 1; ++i) {
                double exact = -3.0 * std::sin(2.0 * g.x(i)) * std::exp(g.y(j));
                e = std::max(e, std::fabs(lap(i, j) - exact));
            }
        return e;
    };
    double e1 = err_at(33), e2 = err_at(65), e3 = err_at(129);
    double order12 = std::log2(e1 / e2), order23 = std::log2(e2 / e3);
    CHECK(order12 >= 1.9);
    CHECK(order23 >= 1.9);
}

TEST_CASE("grad_sup_norm") {
    SUBCASE("zero field") {
        Grid g = Grid::make_1d(0.0, 1.0, 9);
        CHECK(grad_sup_norm(ScalarField(g, 0.0)) == 0.0);
    }
    SUBCASE("linear 3x is exact on any grid") {
        for (int n : {5, 9, 33}) {
            Grid g = Grid::make_1d(-2.0, 1.0, n);
            ScalarField f(g);
            for (int i = 0; i < n; ++i) f(i) = 3.0 * g.x(i);
            CHECK(grad_sup_norm(f) == doctest::Approx(3.0).epsilon(1e-13));
        }
    }
    SUBCASE("hand-evaluated hat") {
        Grid g = Grid::make_1d(0.0, 1.0, 3); // h = 0.5
        ScalarField f(g);
        f(0) = 0.0;
        f(1) = 1.0;
        f(2) = 0.0;
        CHECK(grad_sup_norm(f) == doctest::Approx(2.0).epsilon(1e-15));
    }
    SUBCASE("zero iff constant") {
        TestRng rng(11);
        Grid g = Grid::make_2d({0.0, 0.0}, {1.0, 1.0}, {6, 5});
        ScalarField f(g, 3.25);
        CHECK(grad_sup_norm(f) == 0.0);
        // flip one node: strictly positive
        f(2, 2) += 1e-9;
        CHECK(grad_sup_norm(f) > 0.0);
        for (int rep = 0; rep < 20; ++rep) {
            ScalarField r(g);
            for (auto& v : r.values) v = rng.uniform(-1.0, 1.0);
            bool constant = true;
            for (auto v : r.values) constant = constant && v == r.values[0];
            CHECK((grad_sup_norm(r) == 0.0) == constant);
        }
    }
}

TEST_CASE("integrate with trapezoid weights") {
    SUBCASE("constants are exact in 1D for any node count") {
        for (int n : {3, 7, 16, 33}) {
            Grid g = Grid::make_1d(0.0, 2.0, n);
            CHECK(integrate(ScalarField(g, 1.0), ScalarField(g, 1.0)) ==
                  doctest::Approx(2.0).epsilon(1e-13));
        }
    }
    SUBCASE("empty mask") {
        Grid g = Grid::make_1d(0.0, 2.0, 9);
        CHECK(integrate(ScalarField(g, 1.0), ScalarField(g, 0.0)) == 0.0);
    }
    SUBCASE("2D constant") {
        Grid g = Grid::make_2d({0.0, 0.0}, {1.0, 1.0}, {9, 17});
        CHECK(integrate(ScalarField(g, 3.0), ScalarField(g, 1.0)) ==
              doctest::Approx(3.0).epsilon(1e-13));
    }
    SUBCASE("grid mismatch is rejected") {
        Grid a = Grid::make_1d(0.0, 1.0, 9), b = Grid::make_1d(0.0, 1.0, 10);
        CHECK_THROWS_AS(integrate(ScalarField(a), ScalarField(b)), std::invalid_argument);
    }
    SUBCASE("mask range is enforced") {
        Grid g = Grid::make_1d(0.0, 1.0, 9);
        ScalarField bad(g, 1.5);
        CHECK_THROWS_AS(integrate(ScalarField(g, 1.0), bad), std::invalid_argument);
    }
    SUBCASE("linear in f, monotone in mask") {
        TestRng rng(23);
        Grid g = Grid::make_2d({0.0, 0.0}, {2.0, 1.0}, {7, 9});
        ScalarField f(g), q(g), m1(g), m2(g);
        for (auto& v : f.values) v = rng.uniform(-1.0, 1.0);
        for (auto& v : q.values) v = rng.uniform(-1.0, 1.0);
        for (std::size_t k = 0; k < m1.values.size(); ++k) {
            m1.values[k] = rng.uniform(0.0, 1.0);
            m2.values[k] = m1.values[k] + rng.uniform(0.0, 1.0 - m1.values[k]);
        }
        ScalarField combo(g);
        for (std::size_t k = 0; k < combo.values.size(); ++k)
            combo.values[k] = 2.0 * f.values[k] - 0.5 * q.values[k];
        CHECK(integrate(combo, m1) ==
              doctest::Approx(2.0 * integrate(f, m1) - 0.5 * integrate(q, m1)).epsilon(1e-12));
        ScalarField ones(g, 1.0);
        CHECK(integrate(ones, m2) >= integrate(ones, m1));
    }
}
