#include "heatopt/continuation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace heatopt {

void Schedule::validate() const {
    auto check_seq = [](const std::vector<double>& seq, const char* name) {
        if (seq.empty()) throw std::invalid_argument(std::string("schedule: ") + name + " is empty");
        for (std::size_t i = 0; i < seq.size(); ++i) {
            if (!(seq[i] > 0.0))
                throw std::invalid_argument(std::string("schedule: ") + name + " must be positive");
            if (i > 0 && !(seq[i] < seq[i - 1]))
                throw std::invalid_argument(std::string("schedule: ") + name +
                                            " must be strictly decreasing");
        }
    };
    check_seq(kappa1_seq, "kappa1_seq");
    check_seq(kappa2_seq, "kappa2_seq");
    if (!(epsilon > 0.0)) throw std::invalid_argument("schedule: epsilon must be positive");
    solver.validate();
}

Schedule default_schedule(const Scene& s, double epsilon) {
    Schedule sched;
    double scale = std::max(s.max_phi, 1.0);
    double k1 = 0.1 * scale, k2 = 0.5 * scale;
    for (int i = 0; i < 6; ++i, k1 *= 0.5, k2 *= 0.5) {
        sched.kappa1_seq.push_back(k1);
        sched.kappa2_seq.push_back(k2);
    }
    sched.epsilon = epsilon;
    return sched;
}

namespace {

std::vector<double> clamp_to_floor(const std::vector<double>& seq, double floor) {
    std::vector<double> out;
    for (double v : seq) {
        double c = std::max(v, floor);
        if (out.empty() || c < out.back()) out.push_back(c);
    }
    return out;
}

double min_u_minus_phi(const ScalarField& u, const Scene& s) {
    double m = 0.0;
    for (std::size_t k = 0; k < u.values.size(); ++k)
        m = std::min(m, u.values[k] - s.phi.values[k]);
    return m;
}

} // namespace

AnnealResult anneal(const Scene& s, const Schedule& sched) {
    sched.validate();

    const std::vector<double> k1s = clamp_to_floor(sched.kappa1_seq, sched.kappa1_floor(s.grid));
    const std::vector<double> k2s = clamp_to_floor(sched.kappa2_seq, sched.kappa2_floor(s.grid));

    // kappa1 descends first at the initial kappa2, then kappa2 descends at
    // the final kappa1.
    std::vector<PenaltyParams> stages;
    for (double k1 : k1s) stages.push_back({k1, k2s.front(), sched.epsilon});
    for (std::size_t i = 1; i < k2s.size(); ++i)
        stages.push_back({k1s.back(), k2s[i], sched.epsilon});

    AnnealResult res;
    res.all_converged = true;
    ScalarField u = initial_guess(s, sched.seed_volume);
    const double thresh = s.positive_threshold();

    for (const PenaltyParams& p : stages) {
        auto t0 = std::chrono::steady_clock::now();
        double start_energy = perturbed_energy(u, s, p).total;
        SolveState st = solve_fixed_params(u, s, p, sched.solver);
        auto t1 = std::chrono::steady_clock::now();

        StageRecord rec;
        rec.kappa1 = p.kappa1;
        rec.kappa2 = p.kappa2;
        rec.epsilon = p.epsilon;
        rec.iters = st.iters;
        rec.start_energy = start_energy;
        rec.energy = st.energy_history.back();
        rec.grad_norm = st.grad_norm;
        rec.min_u_minus_phi = min_u_minus_phi(st.u, s);
        rec.grad_sup = grad_sup_norm(st.u);
        rec.exterior_volume = exterior_positive_volume(st.u, s, thresh);
        rec.converged = st.converged;
        rec.stalled = st.stalled;
        rec.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
        res.stages.push_back(rec);

        if (!st.converged) res.all_converged = false;
        u = st.u;
        res.state = std::move(st);
    }
    return res;
}

EpsSelection select_epsilon(const Scene& s, const std::vector<double>& epsilons,
                            const Schedule& sched_template, double vol_tol) {
    if (epsilons.empty()) throw std::invalid_argument("select_epsilon: empty epsilon list");
    for (std::size_t i = 0; i < epsilons.size(); ++i) {
        if (!(epsilons[i] > 0.0))
            throw std::invalid_argument("select_epsilon: epsilons must be positive");
        if (i > 0 && !(epsilons[i] < epsilons[i - 1]))
            throw std::invalid_argument("select_epsilon: epsilons must be strictly decreasing");
    }

    EpsSelection sel;
    const double thresh = s.positive_threshold();
    double best_miss = std::numeric_limits<double>::infinity();

    for (double eps : epsilons) {
        Schedule sched = sched_template;
        sched.epsilon = eps;
        AnnealResult r = anneal(s, sched);
        double vol = exterior_positive_volume(r.state.u, s, thresh);
        double miss = std::fabs(vol - s.m);

        EpsSweepEntry entry{eps, vol, r.state.energy_history.back(), miss <= vol_tol};
        sel.tried.push_back(entry);

        if (entry.qualified) {
            sel.epsilon_star = eps;
            sel.result = std::move(r);
            sel.qualified = true;
            return sel;
        }
        if (miss < best_miss) {
            best_miss = miss;
            sel.epsilon_star = eps;
            sel.result = std::move(r);
        }
    }
    sel.qualified = false;
    return sel;
}

} // namespace heatopt
