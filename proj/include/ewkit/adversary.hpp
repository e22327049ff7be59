#pragma once

#include <cmath>
#include <string>
#include <utility>

#include "common.hpp"
#include "rng.hpp"

namespace ewkit {

// Environment constants declared up front and validated each round; any
// observed violation aborts the run with a diagnostic.
struct EnvConstants {
    double G = 1.0;    // gradient bound
    double D = 1.0;    // comparator norm bound / domain radius
    double B = 2.0;    // domain diameter
    double alpha = 1.0;  // strong convexity / exp-concavity parameter
};

enum class AdversaryKind {
    IidLinear,
    AdaptiveLinear,
    StronglyConvexQuadratic,
    LogLossBernoulli,
    ExpertsBounded,
    ExpertsLowVariance,
    BanditLinear,
};

inline AdversaryKind adversary_kind_from_string(const std::string& s) {
    if (s == "iid-linear") return AdversaryKind::IidLinear;
    if (s == "adaptive-linear") return AdversaryKind::AdaptiveLinear;
    if (s == "strongly-convex-quadratic")
        return AdversaryKind::StronglyConvexQuadratic;
    if (s == "log-loss-bernoulli") return AdversaryKind::LogLossBernoulli;
    if (s == "experts-bounded") return AdversaryKind::ExpertsBounded;
    if (s == "experts-low-variance") return AdversaryKind::ExpertsLowVariance;
    if (s == "bandit-linear") return AdversaryKind::BanditLinear;
    throw config_error("unknown adversary kind: " + s);
}

// Seeded synthetic adversaries. Each emission self-validates its declared
// class bounds.

// ||g||_inf <= G, with a persistent drift direction so the best comparator
// is nontrivial.
inline Vec iid_linear_gradient(int d, double G, CounterRng& rng,
                               const Vec& drift) {
    Vec g(d);
    for (int i = 0; i < d; ++i)
        g[i] = G * std::clamp(0.6 * drift[i] + 0.4 * rng.uniform(-1.0, 1.0),
                              -1.0, 1.0);
    require(g.cwiseAbs().maxCoeff() <= G + 1e-12,
            "adversary emitted gradient above declared G");
    return g;
}

// Gradient aimed at the current iterate, ||g||_2 = G.
inline Vec adaptive_linear_gradient(const Vec& w, double G, CounterRng& rng) {
    Vec g;
    double n = w.norm();
    if (n < 1e-12) {
        g = rng.sphere(static_cast<int>(w.size()), G);
    } else {
        g = (G / n) * w;
    }
    require(std::abs(g.norm() - G) <= 1e-9 * G,
            "adversary emitted gradient off the declared G sphere");
    return g;
}

// f_t(w) = (alpha/2) ||w - z_t||^2 with z_t in a ball chosen so that
// ||grad|| <= G over the play domain.
struct StronglyConvexRound {
    Vec center;
    double alpha;

    double loss(const Vec& w) const {
        return 0.5 * alpha * (w - center).squaredNorm();
    }
    Vec gradient(const Vec& w) const { return alpha * (w - center); }
};

inline StronglyConvexRound strongly_convex_round(int d, double alpha,
                                                 double center_radius,
                                                 CounterRng& rng) {
    return {rng.ball(d, center_radius), alpha};
}

// Experts losses g_t in [0,1]^d, one mildly favored expert.
inline Vec experts_bounded_losses(int d, CounterRng& rng, int favored) {
    Vec g(d);
    for (int i = 0; i < d; ++i) g[i] = rng.uniform();
    g[favored] = 0.35 * g[favored];  // favored expert loses less on average
    require((g.array() >= 0).all() && (g.array() <= 1).all(),
            "experts loss outside [0,1]");
    return g;
}

// Best expert pinned at 1/2, others worse: r_t(i*) -> 0 as the learner
// concentrates, giving small V_T(i*).
inline Vec experts_low_variance_losses(int d, CounterRng& rng, int favored) {
    Vec g(d);
    for (int i = 0; i < d; ++i) g[i] = rng.uniform(0.5, 1.0);
    g[favored] = 0.5;
    return g;
}

// Bandit linear losses: slowly rotating direction scaled so |<w, g>| <= 1 on
// a ball of the given radius.
inline Vec bandit_linear_gradient(int d, double domain_radius, int t,
                                  CounterRng& rng, const Vec& base) {
    Vec g = base + 0.15 * rng.normal_vec(d);
    g *= 1.0 / (domain_radius * g.norm() * 1.0001);
    require(g.norm() * domain_radius <= 1.0,
            "bandit adversary emitted loss outside [-1,1]");
    (void)t;
    return g;
}

}  // namespace ewkit
