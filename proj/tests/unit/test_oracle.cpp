#include <doctest.h>

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "heatopt/energy.hpp"
#include "heatopt/oracle.hpp"
#include "test_helpers.hpp"

using namespace heatopt;

TEST_CASE("oracle_solve_1d trivial and structural cases") {
    SUBCASE("zero obstacle: t_star = 0, zero profile, zero energy") {
        SceneSpec spec = golden_1d_spec(129);
        spec.bumps.clear();
        Scene s = build_scene(spec);
        Oracle1DResult r = oracle_solve_1d(s, 2000);
        CHECK(r.t_star == 0.0);
        CHECK(r.energy == 0.0);
        CHECK(!r.has_free_boundary);
        for (double v : r.sample(s).values) CHECK(v == 0.0);
    }
    SUBCASE("free boundary points sit at +-(r_D + m/2)") {
        Scene s = build_scene(golden_1d_spec(513));
        Oracle1DResult r = oracle_solve_1d(s, 4000);
        REQUIRE(r.has_free_boundary);
        CHECK(r.t_star > 0.0);
        CHECK(r.fb_points[0] == doctest::Approx(-1.5).epsilon(1e-12));
        CHECK(r.fb_points[1] == doctest::Approx(1.5).epsilon(1e-12));
    }
    SUBCASE("asymmetric scenes are rejected") {
        SceneSpec spec = golden_1d_spec(129);
        spec.bumps[0].center = {0.2, 0.0};
        Scene s = build_scene(spec);
        CHECK_THROWS_AS(oracle_solve_1d(s, 1000), std::invalid_argument);
    }
    SUBCASE("m exceeding the box capacity is rejected") {
        SceneSpec spec = golden_1d_spec(129);
        spec.m = 7.0; // fb would sit at 4.5, outside [-4, 4]
        Scene s = build_scene(spec);
        CHECK_THROWS_AS(oracle_solve_1d(s, 1000), std::invalid_argument);
    }
}

TEST_CASE("oracle_solve_1d profile properties") {
    Scene s = build_scene(golden_1d_spec(513));
    Oracle1DResult r = oracle_solve_1d(s, 10000);

    SUBCASE("profile dominates the obstacle and hits t at the domain ends") {
        for (std::size_t i = 0; i < r.fine_x.size(); ++i) {
            double phi = eval_phi(s.spec, r.fine_x[i], 0.0);
            CHECK(r.fine_u[i] >= phi - 1e-12);
        }
        CHECK(r.fine_u.front() == doctest::Approx(r.t_star).epsilon(1e-12));
        CHECK(r.fine_u.back() == doctest::Approx(r.t_star).epsilon(1e-12));
    }
    SUBCASE("profile is concave inside D") {
        for (std::size_t i = 1; i + 1 < r.fine_u.size(); ++i)
            CHECK(r.fine_u[i - 1] - 2.0 * r.fine_u[i] + r.fine_u[i + 1] <= 1e-10);
    }
    SUBCASE("exterior volume is m exactly by construction") {
        // the sampled positive set outside D spans (r_D, r_D + m/2) per side
        ScalarField u = r.sample(s);
        double vol = exterior_positive_volume(u, s, s.positive_threshold());
        CHECK(std::fabs(vol - s.m) <= 2.0 * s.grid.h[0]);
    }
    SUBCASE("energy is stable to 1e-4 under resolution doubling") {
        Oracle1DResult r2 = oracle_solve_1d(s, 20000);
        CHECK(std::fabs(r2.energy - r.energy) <= 1e-4 * std::max(1.0, std::fabs(r.energy)));
        CHECK(std::fabs(r2.t_star - r.t_star) <= 1e-3);
    }
    SUBCASE("linear exterior ramp beats kinked piecewise-linear competitors at fixed t") {
        TestRng rng(9);
        const double t = r.t_star, L = 0.5 * s.m;
        double ramp_energy = t * t / (2.0 * L);
        for (int rep = 0; rep < 200; ++rep) {
            double theta = rng.uniform(0.05, 0.95);
            double eta = rng.uniform(0.0, t);
            // two segments through (theta L, eta), same support and endpoints
            double e = (t - eta) * (t - eta) / (2.0 * theta * L) +
                       eta * eta / (2.0 * (1.0 - theta) * L);
            CHECK(e >= ramp_energy - 1e-12);
        }
    }
}

TEST_CASE("oracle_solve_1d reproduces the committed golden values") {
    std::ifstream in(std::string(HEATOPT_SOURCE_DIR) + "/tests/golden/golden_1d.json");
    REQUIRE(in.good());
    nlohmann::json gold = nlohmann::json::parse(in);

    Scene s = build_scene(golden_1d_spec(513));
    Oracle1DResult r = oracle_solve_1d(s, gold.at("resolution").get<int>());
    CHECK(std::fabs(r.t_star - gold.at("t_star").get<double>()) <= 1e-9);
    CHECK(std::fabs(r.energy - gold.at("energy").get<double>()) <= 1e-9);
    CHECK(r.fb_points[1] == doctest::Approx(gold.at("fb_points")[1].get<double>()).epsilon(1e-12));
}

TEST_CASE("oracle_radial_2d closed forms and structure") {
    SUBCASE("R_star from the exact annulus area") {
        Scene s3 = build_scene(radial_2d_spec(65, 3.0 * 3.14159265358979323846));
        OracleRadialResult r3 = oracle_radial_2d(s3, 256);
        CHECK(r3.R_star == doctest::Approx(2.0).epsilon(1e-14));

        Scene s21 = build_scene(radial_2d_spec(65, 0.21 * 3.14159265358979323846));
        OracleRadialResult r21 = oracle_radial_2d(s21, 256);
        CHECK(r21.R_star == doctest::Approx(1.1).epsilon(1e-14));
    }
    SUBCASE("zero obstacle: t_star = 0") {
        SceneSpec spec = radial_2d_spec(65);
        spec.bumps.clear();
        Scene s = build_scene(spec);
        OracleRadialResult r = oracle_radial_2d(s, 256);
        CHECK(r.t_star == 0.0);
        CHECK(r.energy == 0.0);
    }
    SUBCASE("non-radial scenes are rejected") {
        SceneSpec spec = radial_2d_spec(65);
        spec.bumps[0].center = {0.1, 0.0};
        Scene s = build_scene(spec);
        CHECK_THROWS_AS(oracle_radial_2d(s, 256), std::invalid_argument);
    }
    SUBCASE("interior profile dominates the obstacle; energy stable under doubling") {
        Scene s = build_scene(radial_2d_spec(129));
        OracleRadialResult r = oracle_radial_2d(s, 1024);
        for (std::size_t i = 0; i < r.fine_r.size(); ++i)
            CHECK(r.fine_u[i] >= eval_phi(s.spec, r.fine_r[i], 0.0) - 1e-12);
        OracleRadialResult r2 = oracle_radial_2d(s, 2048);
        CHECK(std::fabs(r2.energy - r.energy) <= 1e-4 * std::max(1.0, r.energy));
    }
}

TEST_CASE("sharp_energy of the sampled radial oracle matches its energy within 2%") {
    Scene s = build_scene(radial_2d_spec(257));
    OracleRadialResult r = oracle_radial_2d(s, 2048);
    REQUIRE(r.t_star > 0.0);
    ScalarField u = r.sample(s);
    double e = sharp_energy(u, s, 1.0, s.positive_threshold());
    CHECK(std::fabs(e - r.energy) <= 0.02 * r.energy);
}
