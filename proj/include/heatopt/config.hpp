#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "heatopt/continuation.hpp"
#include "heatopt/penalty.hpp"
#include "heatopt/scene.hpp"
#include "heatopt/solver.hpp"

namespace heatopt {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct OutputOptions {
    std::string dir = "out";
    std::vector<std::string> formats = {"csv", "bin"};
};

struct RunConfig {
    SceneSpec scene;
    PenaltyParams penalty;
    SolverOptions solver;
    OutputOptions output;

    // continuation block; sequences left empty fall back to the default
    // schedule for the scene
    std::vector<double> kappa1_seq, kappa2_seq;
    std::vector<double> epsilons = {0.8, 0.4, 0.2, 0.1, 0.05, 0.025};
    double vol_tol = 0.0; // <= 0: 4 h * max(1, perimeter(D)/2)
    double seed_volume = 0.0;

    std::string canonical_text; // canonical serialization, hashed into manifests

    Schedule make_schedule(const Scene& s, double epsilon) const;
    double default_vol_tol(const Scene& s) const;
};

// Strict parse: unknown keys are rejected with their full path, every
// numeric constraint is validated with a message naming the key. Throws
// ConfigError.
RunConfig load_config(const std::string& path);
RunConfig parse_config_text(const std::string& text);

// Reference of the accepted schema with defaults, printable from the CLI.
std::string config_reference();

} // namespace heatopt
