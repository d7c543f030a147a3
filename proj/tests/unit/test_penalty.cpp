#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "heatopt/penalty.hpp"
#include "test_helpers.hpp"

using namespace heatopt;

TEST_CASE("penalty_A pointwise values") {
    // vanishes on [0, inf)
    for (double k1 : {0.01, 0.1, 1.0}) {
        CHECK(penalty_A(1.0, k1).value == 0.0);
        CHECK(penalty_A(1.0, k1).slope == 0.0);
        CHECK(penalty_A(0.0, k1).value == 0.0);
    }
    // tail slope -1/kappa1
    CHECK(penalty_A(-1.0, 0.1).slope == doctest::Approx(-10.0).epsilon(1e-15));
    // quadratic piece: t = -0.05, kappa1 = 0.1
    CHECK(penalty_A(-0.05, 0.1).value == doctest::Approx(0.125).epsilon(1e-15));
    CHECK(penalty_A(-0.05, 0.1).slope == doctest::Approx(-5.0).epsilon(1e-15));
    // tail value: -(1/k1)(t + k1/2)
    CHECK(penalty_A(-1.0, 0.1).value == doctest::Approx(9.5).epsilon(1e-15));

    CHECK_THROWS_AS(penalty_A(0.5, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(penalty_A(0.5, -1.0), std::invalid_argument);
}

TEST_CASE("penalty_A structure: nonnegative, decreasing, convex, C1") {
    TestRng rng(101);
    for (double k1 : {0.03, 0.1, 0.7}) {
        // nonnegative + nonincreasing on random pairs
        for (int rep = 0; rep < 2000; ++rep) {
            double a = rng.uniform(-3.0, 1.0), b = rng.uniform(-3.0, 1.0);
            if (a > b) std::swap(a, b);
            double Aa = penalty_A(a, k1).value, Ab = penalty_A(b, k1).value;
            CHECK(Aa >= 0.0);
            CHECK(Ab >= 0.0);
            CHECK(Aa >= Ab);
        }
        // convexity: midpoint inequality on random triples
        for (int rep = 0; rep < 10000; ++rep) {
            double a = rng.uniform(-3.0, 1.0), b = rng.uniform(-3.0, 1.0);
            double mid = 0.5 * (a + b);
            double lhs = penalty_A(mid, k1).value;
            double rhs = 0.5 * (penalty_A(a, k1).value + penalty_A(b, k1).value);
            CHECK(lhs <= rhs + 1e-14 * (1.0 + std::fabs(rhs)));
        }
        // derivative matches central differences away from the kinks {-k1, 0}
        int tested = 0;
        while (tested < 500) {
            double t = rng.uniform(-3.0, 1.0);
            if (std::fabs(t) < 1e-3 || std::fabs(t + k1) < 1e-3) continue;
            ++tested;
            double d = 1e-7;
            double fd = (penalty_A(t + d, k1).value - penalty_A(t - d, k1).value) / (2.0 * d);
            double an = penalty_A(t, k1).slope;
            CHECK(std::fabs(fd - an) <= 1e-6 * std::max(1.0, std::fabs(an)));
        }
    }
}

TEST_CASE("penalty_A grows pointwise as kappa1 shrinks") {
    TestRng rng(17);
    for (int rep = 0; rep < 500; ++rep) {
        double t = rng.uniform(-2.0, -1e-6);
        double k_big = rng.uniform(0.05, 1.0);
        double k_small = k_big * rng.uniform(0.1, 0.999);
        CHECK(penalty_A(t, k_small).value >= penalty_A(t, k_big).value);
    }
}

TEST_CASE("regularizer_B") {
    CHECK(regularizer_B(-0.3, 0.1).value == 0.0);
    CHECK(regularizer_B(-0.3, 0.1).slope == 0.0);
    CHECK(regularizer_B(0.2, 0.1).value == 1.0);
    CHECK(regularizer_B(0.2, 0.1).slope == 0.0);
    CHECK(regularizer_B(0.05, 0.1).value == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(regularizer_B(0.05, 0.1).slope == doctest::Approx(10.0).epsilon(1e-15));
    // kink convention: flat-side value
    CHECK(regularizer_B(0.0, 0.1).slope == 0.0);
    CHECK(regularizer_B(0.1, 0.1).slope == 0.0);
    CHECK_THROWS_AS(regularizer_B(0.5, 0.0), std::invalid_argument);

    TestRng rng(3);
    for (int rep = 0; rep < 2000; ++rep) {
        double k2 = rng.uniform(0.01, 1.0);
        double a = rng.uniform(-1.0, 2.0), b = rng.uniform(-1.0, 2.0);
        if (a > b) std::swap(a, b);
        double Ba = regularizer_B(a, k2).value, Bb = regularizer_B(b, k2).value;
        CHECK(Ba >= 0.0);
        CHECK(Bb <= 1.0);
        CHECK(Ba <= Bb);
        if (a <= 0.0) CHECK(Ba == 0.0);
        if (b >= k2) CHECK(Bb == 1.0);
    }
}

TEST_CASE("volume_penalty_f") {
    CHECK(volume_penalty_f(1.0, 0.1, 1.0).value == 0.0); // f(m) = 0 exactly
    CHECK(volume_penalty_f(1.2, 0.1, 1.0).value == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(volume_penalty_f(1.2, 0.1, 1.0).slope == doctest::Approx(10.0).epsilon(1e-15));
    CHECK(volume_penalty_f(0.5, 0.1, 1.0).value == doctest::Approx(-0.05).epsilon(1e-13));
    CHECK(volume_penalty_f(0.5, 0.1, 1.0).slope == doctest::Approx(0.1).epsilon(1e-15));
    // one-sided derivative at the kink
    CHECK(volume_penalty_f(1.0, 0.1, 1.0).slope == doctest::Approx(0.1).epsilon(1e-15));

    CHECK_THROWS_AS(volume_penalty_f(-0.1, 0.1, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(volume_penalty_f(0.5, 0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(volume_penalty_f(0.5, 0.1, 0.0), std::invalid_argument);

    TestRng rng(5);
    for (int rep = 0; rep < 2000; ++rep) {
        double eps = rng.uniform(0.01, 1.0), m = rng.uniform(0.1, 3.0);
        double a = rng.uniform(0.0, 4.0), b = rng.uniform(0.0, 4.0);
        double mid = 0.5 * (a + b);
        double lhs = volume_penalty_f(mid, eps, m).value;
        double rhs = 0.5 * (volume_penalty_f(a, eps, m).value + volume_penalty_f(b, eps, m).value);
        CHECK(lhs <= rhs + 1e-14 * (1.0 + std::fabs(rhs)));           // convex
        CHECK(volume_penalty_f(a, eps, m).value >= -eps * m - 1e-15); // floor at f(0)
    }
}
