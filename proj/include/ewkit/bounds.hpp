#pragma once

#include <cmath>
#include <vector>

#include "common.hpp"

namespace ewkit {
namespace bounds {

// KL between two distributions on the same finite support.
inline double kl_weights(const Vec& q, const Vec& p) {
    require(q.size() == p.size(), "dimension mismatch");
    double out = 0.0;
    for (int i = 0; i < q.size(); ++i) {
        if (q[i] == 0.0) continue;
        if (p[i] == 0.0) return kInf;
        out += q[i] * std::log(q[i] / p[i]);
    }
    return out;
}

// Krichevsky-Trofimov: regret vs the best fixed w under log loss <= ln(2 sqrt T).
inline double kt(int T) { return std::log(2.0 * std::sqrt(double(T))); }

// EG+- with tuned constant rate: R_T(u) <= G M sqrt(2 T ln(2d)).
inline double egpm(double G, double M, int T, int d) {
    return G * M * std::sqrt(2.0 * T * std::log(2.0 * d));
}

// Lazy GD: ||u - w1||^2 / (2 sigma^2 eta_T) + (sigma^2/2) sum eta_{t-1} ||g_t||^2.
inline double gd_lazy(double dist1_sq, double sigma2,
                      const std::vector<double>& etas,
                      const std::vector<double>& grad_sq_norms) {
    require(etas.size() == grad_sq_norms.size(), "length mismatch");
    const int T = static_cast<int>(etas.size());
    double gap = 0.0;
    for (int t = 0; t < T; ++t) {
        double eta_prev = t == 0 ? etas[0] : etas[t - 1];
        gap += eta_prev * grad_sq_norms[t];
    }
    return dist1_sq / (2.0 * sigma2 * etas[T - 1]) + 0.5 * sigma2 * gap;
}

// Greedy GD: max_t ||u - w_t||^2 / (2 sigma^2 eta_T) + (sigma^2/2) sum eta_t ||g_t||^2.
inline double gd_greedy(double max_dist_sq, double sigma2,
                        const std::vector<double>& etas,
                        const std::vector<double>& grad_sq_norms) {
    require(etas.size() == grad_sq_norms.size(), "length mismatch");
    const int T = static_cast<int>(etas.size());
    double gap = 0.0;
    for (int t = 0; t < T; ++t) gap += etas[t] * grad_sq_norms[t];
    return max_dist_sq / (2.0 * sigma2 * etas[T - 1]) + 0.5 * sigma2 * gap;
}

// Quadratic-surrogate EW:
// (1/2 eta)(w1 - u)' Sigma_1^{-1} (w1 - u) + (eta/2) sum g_t' Sigma_{t+1} g_t.
inline double quad_ew(const Vec& w1, const Vec& u, const Mat& prec1,
                      double eta, double quad_sum) {
    Vec d = w1 - u;
    return d.dot(prec1 * d) / (2.0 * eta) + 0.5 * eta * quad_sum;
}

// Strongly convex corollary:
// (G^2/2a) ln((1/es2 + aT)/(1/es2 + a)) + G^2/(2/es2 + 2a) + D^2/(2 es2),
// where es2 = eta sigma^2.
inline double strongly_convex(double G, double alpha, double eta_sigma2,
                              int T, double D) {
    double inv = 1.0 / eta_sigma2;
    return (G * G / (2.0 * alpha)) *
               std::log((inv + alpha * T) / (inv + alpha)) +
           G * G / (2.0 * inv + 2.0 * alpha) + D * D / (2.0 * eta_sigma2);
}

// Exp-concave (ONS) corollary:
// (d/2 beta) ln(1 + eta sigma^2 beta G^2 T / d) + D^2 / (2 eta sigma^2).
inline double exp_concave(int d, double beta, double eta_sigma2, double G,
                          int T, double D) {
    return (d / (2.0 * beta)) *
               std::log(1.0 + eta_sigma2 * beta * G * G * T / d) +
           D * D / (2.0 * eta_sigma2);
}

// iProd / Squint, for a fixed comparator rate eta_star on the grid:
// 2 eta* E[V_T] + (2/eta*)(kl(pi_hat || pi) - ln gamma([eta*/2, eta*])).
inline double iprod_special(double eta_star, double expected_v, double kl,
                            double gamma_mass) {
    require(eta_star > 0 && gamma_mass > 0, "eta* and prior mass must be positive");
    return 2.0 * eta_star * expected_v +
           (2.0 / eta_star) * (kl - std::log(gamma_mass));
}

// Coin Betting: E[R_T(i)] <= sqrt(3T (kl(pi_hat||pi) + 3)).
inline double coin_betting(int T, double kl) {
    return std::sqrt(3.0 * T * (kl + 3.0));
}

// Bandit EW with John's exploration: 2 sqrt(3 nu d T ln T) + 2.
inline double bandit(int d, int T, double nu) {
    return 2.0 * std::sqrt(3.0 * nu * d * T * std::log(double(T))) + 2.0;
}

}  // namespace bounds
}  // namespace ewkit
