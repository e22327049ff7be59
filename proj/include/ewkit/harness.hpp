#pragma once

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "adaptive.hpp"
#include "adversary.hpp"
#include "bandit.hpp"
#include "bounds.hpp"
#include "common.hpp"
#include "domain.hpp"
#include "ew_core.hpp"
#include "expfam.hpp"
#include "rng.hpp"
#include "surrogates.hpp"

namespace ewkit {

// ---------------------------------------------------------------------------
// Experiment configuration. Flat `key = value` text file, `#` comments; all
// keys double as CLI flags which override the file.
// ---------------------------------------------------------------------------

struct ExperimentConfig {
    std::string algorithm = "gd-greedy";
    std::string adversary;  // empty -> per-algorithm default
    int d = 2;
    int T = 100;
    std::uint64_t seed = 1;
    int replicates = 1;
    EnvConstants constants;
    double eta = -1.0;     // <= 0 selects the tuned default
    double sigma2 = 1.0;
    std::string domain = "ball";
    double domain_radius = 1.0;
    int grid_resolution = 1000;      // per axis, d <= 2 comparators
    int random_comparators = 10000;  // d > 2 comparators
    int bandit_moment_samples = 4096;
    std::string bandit_moment = "mc";  // "mc" | "analytic"
    double nu = -1.0;                  // bandit barrier parameter; <= 0 -> d
    std::string out_dir;

    void set(const std::string& key, const std::string& value) {
        auto as_int = [&] { return std::stoi(value); };
        auto as_double = [&] { return std::stod(value); };
        if (key == "algorithm" || key == "algo") algorithm = value;
        else if (key == "adversary") adversary = value;
        else if (key == "d") d = as_int();
        else if (key == "T" || key == "t") T = as_int();
        else if (key == "seed") seed = std::stoull(value);
        else if (key == "replicates") replicates = as_int();
        else if (key == "G") constants.G = as_double();
        else if (key == "D") constants.D = as_double();
        else if (key == "B") constants.B = as_double();
        else if (key == "alpha") constants.alpha = as_double();
        else if (key == "eta") eta = as_double();
        else if (key == "sigma2") sigma2 = as_double();
        else if (key == "domain") domain = value;
        else if (key == "domain_radius") domain_radius = as_double();
        else if (key == "grid_resolution") grid_resolution = as_int();
        else if (key == "random_comparators") random_comparators = as_int();
        else if (key == "bandit_moment_samples") bandit_moment_samples = as_int();
        else if (key == "bandit_moment") bandit_moment = value;
        else if (key == "nu") nu = as_double();
        else if (key == "out" || key == "out_dir") out_dir = value;
        else throw config_error("unknown config key: " + key);
        if (T < 1) throw config_error("T must be >= 1");
        if (d < 1) throw config_error("d must be >= 1");
        if (replicates < 1) throw config_error("replicates must be >= 1");
    }

    static ExperimentConfig from_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw config_error("cannot open config file: " + path);
        ExperimentConfig cfg;
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            auto hash = line.find('#');
            if (hash != std::string::npos) line = line.substr(0, hash);
            auto trim = [](std::string s) {
                auto b = s.find_first_not_of(" \t\r");
                auto e = s.find_last_not_of(" \t\r");
                return b == std::string::npos ? std::string()
                                              : s.substr(b, e - b + 1);
            };
            std::string t = trim(line);
            if (t.empty()) continue;
            auto eq = t.find('=');
            if (eq == std::string::npos)
                throw config_error("config line " + std::to_string(lineno) +
                                   ": expected key = value");
            cfg.set(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
        }
        return cfg;
    }
};

// ---------------------------------------------------------------------------
// Run result.
// ---------------------------------------------------------------------------

struct RunResult {
    RegretLedger ledger;
    double final_regret = 0.0;
    double final_bound = 0.0;
    bool bound_violated = false;
    double runtime_sec = 0.0;
};

namespace detail {

// Best fixed comparator loss over the run. Grid search for d <= 2, random
// feasible points for d > 2; a lower bound on the true comparator loss, so
// regret-upper-bound checks only get stricter.
template <class LossFn>
double best_comparator_loss(const ConvexDomain& domain, int d, LossFn&& total,
                            int grid_res, int n_random,
                            std::uint64_t seed) {
    double best = kInf;
    auto consider = [&](const Vec& u) {
        if (!domain.contains(u, 1e-9)) return;
        best = std::min(best, total(u));
    };
    if (domain.kind() == ConvexDomain::Kind::Ball && d <= 2) {
        double r = domain.radius();
        if (d == 1) {
            for (int i = 0; i <= grid_res; ++i)
                consider(Vec::Constant(1, -r + 2.0 * r * i / grid_res));
        } else {
            for (int i = 0; i <= grid_res; ++i)
                for (int j = 0; j <= grid_res; ++j) {
                    Vec u(2);
                    u << -r + 2.0 * r * i / grid_res,
                        -r + 2.0 * r * j / grid_res;
                    consider(u);
                }
        }
        return best;
    }
    CounterRng rng(seed, 0xC0117A5A);
    if (domain.kind() == ConvexDomain::Kind::Ball) {
        consider(Vec::Zero(d));
        for (int i = 0; i < n_random; ++i) consider(rng.ball(d, domain.radius()));
    } else if (domain.kind() == ConvexDomain::Kind::Box) {
        for (int i = 0; i < n_random; ++i) {
            Vec u(d);
            for (int k = 0; k < d; ++k)
                u[k] = rng.uniform(domain.lo()[k], domain.hi()[k]);
            consider(u);
        }
    } else {
        throw error("comparator grid: unsupported domain");
    }
    return best;
}

inline void fill_ledger(RegretLedger& ledger,
                        const std::vector<double>& learner_losses,
                        const std::vector<double>& comparator_losses,
                        const std::vector<double>& mix_gaps,
                        const std::vector<double>& bound_at_t) {
    double cum = 0.0;
    for (std::size_t t = 0; t < learner_losses.size(); ++t) {
        cum += learner_losses[t] - comparator_losses[t];
        LedgerRow row;
        row.t = static_cast<int>(t) + 1;
        row.learner_loss = learner_losses[t];
        row.mix_gap = mix_gaps[t];
        row.cum_regret = cum;
        row.bound_value = bound_at_t[t];
        ledger.push(row);
    }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Per-algorithm runners. Each produces true learner losses, the per-round
// losses of the final comparator, mixability gaps, and the matching bound
// evaluated at every prefix.
// ---------------------------------------------------------------------------

namespace runners {

inline RunResult kt(const ExperimentConfig& cfg) {
    CounterRng rng(cfg.seed, 1);
    const int T = cfg.T;
    int ones = 0;
    double p_true = 0.3 + 0.4 * rng.uniform();
    std::vector<int> xs(T);
    for (int t = 0; t < T; ++t) xs[t] = rng.uniform() < p_true ? 1 : 0;

    std::vector<double> losses(T), gaps(T, 0.0), bounds(T);
    for (int t = 1; t <= T; ++t) {
        double w = kt_predict(ones, t);
        losses[t - 1] = xs[t - 1] == 1 ? -std::log(w) : -std::log(1.0 - w);
        ones += xs[t - 1];
        bounds[t - 1] = bounds::kt(t);
    }
    // Exact closed-form comparator: the empirical frequency.
    double k = ones, n = T;
    double comp_total = 0.0;
    if (k > 0) comp_total += -k * std::log(k / n);
    if (k < n) comp_total += -(n - k) * std::log((n - k) / n);
    // Attribute comparator loss to rounds by realized outcome so prefix
    // regret columns stay meaningful.
    std::vector<double> comp(T, 0.0);
    double phat = k / n;
    for (int t = 0; t < T; ++t)
        comp[t] = xs[t] == 1 ? (phat > 0 ? -std::log(phat) : 0.0)
                             : (phat < 1 ? -std::log(1 - phat) : 0.0);

    RunResult out;
    detail::fill_ledger(out.ledger, losses, comp, gaps, bounds);
    double total = 0.0;
    for (double l : losses) total += l;
    out.final_regret = total - comp_total;
    out.final_bound = bounds::kt(T);
    out.bound_violated = out.final_regret > out.final_bound + 1e-9;
    return out;
}

inline RunResult egpm(const ExperimentConfig& cfg) {
    CounterRng rng(cfg.seed, 2);
    const int T = cfg.T, d = cfg.d;
    const double G = cfg.constants.G;
    const double M = 1.0;  // scale factor of the L1 ball
    double eta = cfg.eta > 0 ? cfg.eta : egpm_tuned_eta(d, T, M, G);

    EgpmWeights w = EgpmWeights::uniform(d);
    Vec drift = rng.sphere(d);
    Vec cum_g = Vec::Zero(d);
    std::vector<double> losses(T), gaps(T), bounds(T);
    std::vector<Vec> gs(T);
    for (int t = 0; t < T; ++t) {
        Vec g = iid_linear_gradient(d, G, rng, drift);
        gs[t] = g;
        Vec pred = M * w.prediction();
        losses[t] = pred.dot(g);
        // Closed-form discrete mixability gap at this round.
        Vec expo(2 * d);
        for (int i = 0; i < d; ++i) {
            expo[i] = std::log(w.plus[i]) - eta * M * g[i];
            expo[d + i] = std::log(w.minus[i]) + eta * M * g[i];
        }
        double m = expo.maxCoeff();
        gaps[t] = losses[t] +
                  (m + std::log((expo.array() - m).exp().sum())) / eta;
        w = egpm_step(w.plus, w.minus, M * g, eta);
        cum_g += g;
        bounds[t] = bounds::egpm(G, M, t + 1, d);
    }
    // Exact comparator over the L1 ball of radius M: a signed vertex.
    int best_i = 0;
    for (int i = 1; i < d; ++i)
        if (std::abs(cum_g[i]) > std::abs(cum_g[best_i])) best_i = i;
    double comp_total = -M * std::abs(cum_g[best_i]);
    std::vector<double> comp(T);
    double sign = cum_g[best_i] > 0 ? -1.0 : 1.0;
    for (int t = 0; t < T; ++t) comp[t] = sign * M * gs[t][best_i];

    RunResult out;
    detail::fill_ledger(out.ledger, losses, comp, gaps, bounds);
    double total = 0.0;
    for (double l : losses) total += l;
    out.final_regret = total - comp_total;
    out.final_bound = bounds::egpm(G, M, T, d);
    out.bound_violated = out.final_regret > out.final_bound + 1e-9;
    return out;
}

inline RunResult gd(const ExperimentConfig& cfg, Flavor flavor) {
    CounterRng rng(cfg.seed, 3);
    const int T = cfg.T, d = cfg.d;
    const double G = cfg.constants.G, D = cfg.constants.D;
    ConvexDomain domain = ConvexDomain::ball(D);
    const double sigma2 = cfg.sigma2;
    // GD-effective rate D/(G sqrt(T)); the EW rate is scaled by 1/sigma^2.
    double eta = cfg.eta > 0 ? cfg.eta : D / (G * std::sqrt(double(T)) * sigma2);

    Vec w = Vec::Zero(d);
    Vec g_sum = Vec::Zero(d);
    Vec drift = rng.sphere(d);
    std::vector<double> losses(T), gaps(T), bounds(T);
    std::vector<Vec> gs(T);
    std::vector<double> gsq;
    std::vector<Vec> traj;
    for (int t = 0; t < T; ++t) {
        Vec g = iid_linear_gradient(d, G / std::sqrt(double(d)), rng, drift);
        require(g.norm() <= G + 1e-9, "gradient above declared G");
        gs[t] = g;
        traj.push_back(w);
        losses[t] = w.dot(g);
        gaps[t] = 0.5 * eta * sigma2 * g.squaredNorm();
        g_sum += g;
        w = gd_step(w, g, eta * sigma2, domain, flavor, g_sum, Vec::Zero(d));
        gsq.push_back(g.squaredNorm());
        std::vector<double> gsq_t(gsq);
        bounds[t] = flavor == Flavor::Lazy
                        ? bounds::gd_lazy(4.0 * D * D, sigma2,
                                          std::vector<double>(t + 1, eta * sigma2),
                                          gsq_t)
                        : bounds::gd_greedy(4.0 * D * D, sigma2,
                                            std::vector<double>(t + 1, eta * sigma2),
                                            gsq_t);
    }
    // Exact linear comparator over the ball: u* = -D g_sum / ||g_sum||.
    double comp_total = -D * g_sum.norm();
    Vec u_star = g_sum.norm() > 0 ? Vec(-D * g_sum / g_sum.norm())
                                  : Vec(Vec::Zero(d));
    std::vector<double> comp(T);
    for (int t = 0; t < T; ++t) comp[t] = u_star.dot(gs[t]);
    // Tighten the distance terms now that the comparator is known.
    double dist1 = u_star.squaredNorm();
    double max_dist = 0.0;
    for (const Vec& wt : traj)
        max_dist = std::max(max_dist, (u_star - wt).squaredNorm());
    std::vector<double> etas_full(T, eta * sigma2);
    double final_bound =
        flavor == Flavor::Lazy
            ? bounds::gd_lazy(dist1, sigma2, etas_full, gsq)
            : bounds::gd_greedy(max_dist, sigma2, etas_full, gsq);

    RunResult out;
    detail::fill_ledger(out.ledger, losses, comp, gaps, bounds);
    double total = 0.0;
    for (double l : losses) total += l;
    out.final_regret = total - comp_total;
    out.final_bound = final_bound;
    out.bound_violated = out.final_regret > out.final_bound + 1e-6;
    return out;
}

// Greedy MD with the Poisson carrier (unnormalized relative entropy) on a
// positive box, linear losses.
inline RunResult md_poisson(const ExperimentConfig& cfg) {
    CounterRng rng(cfg.seed, 4);
    const int T = cfg.T, d = cfg.d;
    const double G = cfg.constants.G;
    ConvexDomain domain =
        ConvexDomain::box(Vec::Constant(d, 0.05), Vec::Constant(d, 3.0));
    double eta = cfg.eta > 0 ? cfg.eta : 1.0 / (G * std::sqrt(double(T)));

    BregmanPair carrier = BregmanPair::poisson();
    Vec w = Vec::Ones(d);
    Vec drift = rng.sphere(d);
    std::vector<double> losses(T), gaps(T), bounds(T);
    std::vector<Vec> gs(T);
    double gap_sum = 0.0;
    for (int t = 0; t < T; ++t) {
        Vec g = iid_linear_gradient(d, G, rng, drift);
        gs[t] = g;
        losses[t] = w.dot(g);
        // Poisson log-partition: ln E[e^{-eta g . w}] = sum lambda_i (e^{-eta g_i} - 1).
        double log_mgf =
            (w.array() * ((-eta * g.array()).exp() - 1.0)).sum();
        gaps[t] = losses[t] + log_mgf / eta;
        gap_sum += gaps[t];
        w = md_step(w, g, eta, carrier, domain, Flavor::Greedy);
        bounds[t] = kInf;  // filled against the final comparator below
    }
    double comp_total = detail::best_comparator_loss(
        domain, d,
        [&](const Vec& u) {
            double s = 0.0;
            for (const Vec& g : gs) s += u.dot(g);
            return s;
        },
        cfg.grid_resolution, cfg.random_comparators, cfg.seed);
    // Recover the minimizing point for the KL term (coordinatewise for
    // linear losses on a box: each coordinate picks its nearer box edge).
    Vec cum = Vec::Zero(d);
    for (const Vec& g : gs) cum += g;
    Vec u_star(d);
    for (int i = 0; i < d; ++i)
        u_star[i] = cum[i] > 0 ? domain.lo()[i] : domain.hi()[i];
    double kl_prior = unnormalized_relative_entropy(u_star, Vec::Ones(d));
    std::vector<double> comp(T);
    for (int t = 0; t < T; ++t) comp[t] = u_star.dot(gs[t]);
    comp_total = std::min(comp_total, u_star.dot(cum));

    double running_gap = 0.0;
    for (int t = 0; t < T; ++t) {
        running_gap += gaps[t];
        bounds[t] = kl_prior / eta + running_gap;
    }

    RunResult out;
    detail::fill_ledger(out.ledger, losses, comp, gaps, bounds);
    double total = 0.0;
    for (double l : losses) total += l;
    out.final_regret = total - comp_total;
    out.final_bound = kl_prior / eta + running_gap;
    out.bound_violated = out.final_regret > out.final_bound + 1e-6;
    return out;
}

// Greedy EW on quadratic surrogates with M_t = alpha I (strongly convex GD).
inline RunResult strongly_convex(const ExperimentConfig& cfg) {
    CounterRng rng(cfg.seed, 5);
    const int T = cfg.T, d = cfg.d;
    const double alpha = cfg.constants.alpha, D = cfg.constants.D;
    ConvexDomain domain = ConvexDomain::ball(D);
    const double eta_sigma2 =
        cfg.eta > 0 ? cfg.eta * cfg.sigma2 : 1.0;  // eta sigma^2 product
    const double center_radius = 0.5 * D;
    const double G = alpha * (D + center_radius);

    QuadEWState state(Vec::Zero(d), (eta_sigma2 / (cfg.eta > 0 ? cfg.eta : 1.0)) *
                                        Mat::Identity(d, d),
                      cfg.eta > 0 ? cfg.eta : 1.0, Flavor::Greedy);
    std::vector<double> losses(T), gaps(T), bounds(T);
    std::vector<StronglyConvexRound> rounds;
    Vec center_sum = Vec::Zero(d);
    for (int t = 0; t < T; ++t) {
        auto round = strongly_convex_round(d, alpha, center_radius, rng);
        rounds.push_back(round);
        Vec w = state.mean();
        losses[t] = round.loss(w);
        Vec g = round.gradient(w);
        require(g.norm() <= G + 1e-9, "gradient above declared G");
        // Quadratic surrogates with eta <= alpha have nonpositive gap; we
        // record the closed-form value.
        QuadraticSurrogate s(g, alpha * Mat::Identity(d, d), w);
        Mat cov_next =
            (state.precision() + state.eta() * s.curvature)
                .llt()
                .solve(Mat::Identity(d, d));
        double logdet_ratio = std::log(
            state.covariance().determinant() / cov_next.determinant());
        gaps[t] = 0.5 * state.eta() * g.dot(cov_next * g) -
                  logdet_ratio / (2.0 * state.eta());
        state = quad_ew_step(state, s, domain);
        center_sum += round.center;
        bounds[t] = bounds::strongly_convex(G, alpha, eta_sigma2, t + 1, D);
    }
    // Exact comparator: projection of the center mean onto the ball.
    Vec u_star = domain.project(center_sum / T);
    std::vector<double> comp(T);
    double comp_total = 0.0;
    for (int t = 0; t < T; ++t) {
        comp[t] = rounds[t].loss(u_star);
        comp_total += comp[t];
    }

    RunResult out;
    detail::fill_ledger(out.ledger, losses, comp, gaps, bounds);
    double total = 0.0;
    for (double l : losses) total += l;
    out.final_regret = total - comp_total;
    out.final_bound = bounds::strongly_convex(G, alpha, eta_sigma2, T, D);
    out.bound_violated = out.final_regret > out.final_bound + 1e-6;
    return out;
}

// ONS: greedy EW on rank-one quadratic surrogates, squared-loss adversary.
inline RunResult ons(const ExperimentConfig& cfg) {
    CounterRng rng(cfg.seed, 6);
    const int T = cfg.T, d = cfg.d;
    const double D = cfg.constants.D;
    ConvexDomain domain = ConvexDomain::ball(D);
    const double G = 4.0 * D, B = 2.0 * D, alpha = 1.0 / (8.0 * D * D);
    const double beta = ons_beta(alpha, G, B);
    const double eta_sigma2 = cfg.eta > 0 ? cfg.eta * cfg.sigma2 : beta * D * D;
    const double eta = cfg.eta > 0 ? cfg.eta : 1.0;
    const double sigma2 = eta_sigma2 / eta;

    Vec u_true = rng.ball(d, 0.7 * D);
    QuadEWState state(Vec::Zero(d), sigma2 * Mat::Identity(d, d), eta,
                      Flavor::Greedy);
    std::vector<double> losses(T), gaps(T), bounds(T);
    std::vector<Vec> xs(T);
    std::vector<double> ys(T);
    double quad_sum = 0.0;
    for (int t = 0; t < T; ++t) {
        Vec x = rng.sphere(d);
        double y = std::clamp(u_true.dot(x) + 0.1 * rng.normal(), -D, D);
        xs[t] = x;
        ys[t] = y;
        Vec w = state.mean();
        double resid = w.dot(x) - y;
        losses[t] = resid * resid;
        Vec g = 2.0 * resid * x;
        require(g.norm() <= G + 1e-9, "gradient above declared G");
        QuadraticSurrogate s = ons_curvature(g, alpha, G, B, w);
        Mat cov_next = (state.precision() + eta * s.curvature)
                           .llt()
                           .solve(Mat::Identity(d, d));
        quad_sum += g.dot(cov_next * g);
        double logdet_ratio = std::log(
            state.covariance().determinant() / cov_next.determinant());
        gaps[t] =
            0.5 * eta * g.dot(cov_next * g) - logdet_ratio / (2.0 * eta);
        state = quad_ew_step(state, s, domain);
        bounds[t] = bounds::exp_concave(d, beta, eta_sigma2, G, t + 1, D);
    }
    auto total_loss = [&](const Vec& u) {
        double s = 0.0;
        for (int t = 0; t < T; ++t) {
            double r = u.dot(xs[t]) - ys[t];
            s += r * r;
        }
        return s;
    };
    double comp_total = detail::best_comparator_loss(
        domain, d, total_loss, cfg.grid_resolution, cfg.random_comparators,
        cfg.seed);
    comp_total = std::min(comp_total, total_loss(domain.project(u_true)));
    std::vector<double> comp(T, comp_total / T);

    RunResult out;
    detail::fill_ledger(out.ledger, losses, comp, gaps, bounds);
    double total = 0.0;
    for (double l : losses) total += l;
    out.final_regret = total - comp_total;
    out.final_bound = bounds::exp_concave(d, beta, eta_sigma2, G, T, D);
    out.bound_violated = out.final_regret > out.final_bound + 1e-6;
    return out;
}

// Generic quadratic-surrogate EW against random PSD curvatures; the bound is
// the Sigma-weighted display, comparator is the exact unconstrained minimizer.
inline RunResult quad_ew(const ExperimentConfig& cfg) {
    CounterRng rng(cfg.seed, 7);
    const int T = cfg.T, d = cfg.d;
    const double eta = cfg.eta > 0 ? cfg.eta : 0.5;
    ConvexDomain domain = ConvexDomain::all_space();

    QuadEWState state(Vec::Zero(d), cfg.sigma2 * Mat::Identity(d, d), eta,
                      Flavor::Greedy);
    Mat prec1 = state.precision();
    Vec w1 = state.mean();
    std::vector<double> losses(T), gaps(T), bounds(T);
    std::vector<QuadraticSurrogate> surs;
    double quad_sum = 0.0;
    Mat curv_sum = Mat::Zero(d, d);
    Vec lin_sum = Vec::Zero(d);
    for (int t = 0; t < T; ++t) {
        Vec g = rng.normal_vec(d);
        Mat a = 0.4 * Mat::NullaryExpr(d, d, [&](int, int) { return rng.normal(); });
        Mat m = a * a.transpose() / d;
        Vec anchor = state.mean();
        QuadraticSurrogate s(g, m, anchor);
        surs.push_back(s);
        losses[t] = s.value(state.mean());
        Mat cov_next = (state.precision() + eta * m)
                           .llt()
                           .solve(Mat::Identity(d, d));
        quad_sum += g.dot(cov_next * g);
        double logdet_ratio = std::log(
            state.covariance().determinant() / cov_next.determinant());
        gaps[t] =
            0.5 * eta * g.dot(cov_next * g) - logdet_ratio / (2.0 * eta);
        state = quad_ew_step(state, s, domain);
        curv_sum += m;
        lin_sum += g - m * anchor;
        bounds[t] = kInf;
    }
    // Exact unconstrained minimizer of the cumulative surrogate.
    Vec u_star = (curv_sum + 1e-12 * Mat::Identity(d, d))
                     .ldlt()
                     .solve(-lin_sum);
    std::vector<double> comp(T);
    double comp_total = 0.0;
    for (int t = 0; t < T; ++t) {
        comp[t] = surs[t].value(u_star);
        comp_total += comp[t];
    }
    double final_bound = bounds::quad_ew(w1, u_star, prec1, eta, quad_sum);
    for (int t = 0; t < T; ++t) bounds[t] = final_bound;

    RunResult out;
    detail::fill_ledger(out.ledger, losses, comp, gaps, bounds);
    double total = 0.0;
    for (double l : losses) total += l;
    out.final_regret = total - comp_total;
    out.final_bound = final_bound;
    out.bound_violated = out.final_regret > out.final_bound + 1e-6;
    return out;
}

enum class AdaptiveAlgo { IProd, Squint, CoinBetting };

inline RunResult adaptive_experts(const ExperimentConfig& cfg,
                                  AdaptiveAlgo algo) {
    CounterRng rng(cfg.seed, 8);
    const int T = cfg.T, d = cfg.d;
    const bool low_variance = cfg.adversary == "experts-low-variance";
    int favored = rng.uniform_int(d);

    EtaGridPosterior grid_post = EtaGridPosterior::make(d, T);
    CoinBettingState cb(d, T);
    std::vector<double> losses(T), gaps(T), bounds(T);
    Vec regret_sum = Vec::Zero(d);
    Vec v_sum = Vec::Zero(d);
    std::vector<Vec> gs(T);
    double potential_log = 0.0;
    for (int t = 0; t < T; ++t) {
        Vec g = low_variance ? experts_low_variance_losses(d, rng, favored)
                             : experts_bounded_losses(d, rng, favored);
        gs[t] = g;
        Vec w;
        if (algo == AdaptiveAlgo::CoinBetting) {
            w = cb.weights();
        } else {
            w = iprod_weights(grid_post);
        }
        losses[t] = w.dot(g);
        Vec r = instantaneous_regrets(w, g);
        regret_sum += r;
        v_sum += r.cwiseProduct(r);
        if (algo == AdaptiveAlgo::IProd) {
            double m = grid_post.mix_loss(
                [&](double eta, int i) { return std::log1p(eta * r[i]); });
            potential_log -= m;
            gaps[t] = m;
            iprod_update(grid_post, r);
        } else if (algo == AdaptiveAlgo::Squint) {
            double m = grid_post.mix_loss([&](double eta, int i) {
                return eta * r[i] - eta * eta * r[i] * r[i];
            });
            potential_log -= m;
            gaps[t] = m;
            squint_update(grid_post, r);
        } else {
            Vec eta = cb.rates();
            double e = 0.0;
            Vec p = cb.wealth() / cb.wealth().sum();
            for (int i = 0; i < d; ++i) e += p[i] * (1.0 + eta[i] * r[i]);
            gaps[t] = -std::log(e);
            potential_log += std::log(e);
            cb.step(g);
        }
        // Bound vs a point mass on the current best expert.
        int best = 0;
        for (int i = 1; i < d; ++i)
            if (regret_sum[i] > regret_sum[best]) best = i;
        double kl = std::log(double(d));
        if (algo == AdaptiveAlgo::CoinBetting) {
            bounds[t] = bounds::coin_betting(t + 1, kl);
        } else {
            double b = kInf;
            for (int k = 0; k < grid_post.grid().size(); ++k) {
                double es = grid_post.grid()[k];
                b = std::min(b, bounds::iprod_special(
                                    es, v_sum[best], kl,
                                    grid_post.gamma_mass(es / 2.0, es)));
            }
            bounds[t] = b;
        }
    }
    int best = 0;
    for (int i = 1; i < d; ++i)
        if (regret_sum[i] > regret_sum[best]) best = i;
    std::vector<double> comp(T);
    for (int t = 0; t < T; ++t) comp[t] = gs[t][best];

    RunResult out;
    detail::fill_ledger(out.ledger, losses, comp, gaps, bounds);
    out.final_regret = regret_sum[best];
    out.final_bound = bounds[T - 1];
    out.bound_violated = out.final_regret > out.final_bound + 1e-9;
    (void)potential_log;
    return out;
}

inline RunResult bandit_ew(const ExperimentConfig& cfg) {
    CounterRng rng(cfg.seed, 9);
    const int T = cfg.T, d = cfg.d;
    const double D = cfg.domain_radius;
    ConvexDomain domain = cfg.domain == "box"
                              ? ConvexDomain::centered_box(d, D)
                              : ConvexDomain::ball(D);
    BanditTuning tune = tuned_parameters(d, T, cfg.nu);
    double eta = cfg.eta > 0 ? cfg.eta : tune.eta;
    double gamma = tune.gamma;
    double nu = cfg.nu > 0 ? cfg.nu : d;

    BanditPosterior posterior(domain, d);
    posterior.burn_in(200 * d, rng);
    ExplorationSpec exploration = ExplorationSpec::for_domain(domain, d);
    const bool analytic =
        cfg.bandit_moment == "analytic" &&
        domain.kind() == ConvexDomain::Kind::Ball;

    Vec base = rng.sphere(d);
    Vec g_cum = Vec::Zero(d);
    std::vector<double> losses(T), gaps(T), bounds(T);
    std::vector<Vec> gs(T);
    for (int t = 0; t < T; ++t) {
        Vec g = bandit_linear_gradient(d, D, t, rng, base);
        gs[t] = g;
        Vec w = sample_action(posterior, exploration, gamma, rng);
        double observed = w.dot(g);
        require(std::abs(observed) <= 1.0 + 1e-9,
                "bandit loss outside [-1,1]");
        losses[t] = observed;
        Mat s = analytic
                    ? mixture_second_moment_exact(posterior, exploration, gamma)
                    : second_moment(posterior, exploration, gamma,
                                    cfg.bandit_moment_samples, rng);
        Vec g_tilde = estimate_loss_vector(w, observed, s);
        gaps[t] = eta * g_tilde.dot(s * g_tilde);  // analysis-side gap bound
        posterior.shift_natural(-eta * g_tilde, rng);
        g_cum += g;
        bounds[t] = bounds::bandit(d, t + 1, nu);
    }
    // Exact linear comparator over the ball / box.
    Vec u_star;
    if (domain.kind() == ConvexDomain::Kind::Ball) {
        u_star = g_cum.norm() > 0 ? Vec(-D * g_cum / g_cum.norm())
                                  : Vec(Vec::Zero(d));
    } else {
        u_star = Vec(-D * g_cum.array().sign());
    }
    std::vector<double> comp(T);
    double comp_total = 0.0;
    for (int t = 0; t < T; ++t) {
        comp[t] = u_star.dot(gs[t]);
        comp_total += comp[t];
    }

    RunResult out;
    detail::fill_ledger(out.ledger, losses, comp, gaps, bounds);
    double total = 0.0;
    for (double l : losses) total += l;
    out.final_regret = total - comp_total;
    out.final_bound = bounds::bandit(d, T, nu);
    out.bound_violated = out.final_regret > out.final_bound;
    return out;
}

}  // namespace runners

// ---------------------------------------------------------------------------
// Orchestration and file emission.
// ---------------------------------------------------------------------------

inline RunResult run_experiment(const ExperimentConfig& cfg) {
    auto start = std::chrono::steady_clock::now();
    RunResult out;
    const std::string& a = cfg.algorithm;
    if (a == "kt") out = runners::kt(cfg);
    else if (a == "egpm") out = runners::egpm(cfg);
    else if (a == "gd-lazy") out = runners::gd(cfg, Flavor::Lazy);
    else if (a == "gd-greedy" || a == "gd") out = runners::gd(cfg, Flavor::Greedy);
    else if (a == "md-poisson") out = runners::md_poisson(cfg);
    else if (a == "sc-gd") out = runners::strongly_convex(cfg);
    else if (a == "ons") out = runners::ons(cfg);
    else if (a == "quad-ew") out = runners::quad_ew(cfg);
    else if (a == "iprod")
        out = runners::adaptive_experts(cfg, runners::AdaptiveAlgo::IProd);
    else if (a == "squint")
        out = runners::adaptive_experts(cfg, runners::AdaptiveAlgo::Squint);
    else if (a == "coinbetting")
        out = runners::adaptive_experts(cfg, runners::AdaptiveAlgo::CoinBetting);
    else if (a == "bandit-ew") out = runners::bandit_ew(cfg);
    else throw config_error("unknown algorithm: " + a);
    out.runtime_sec =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    return out;
}

namespace detail {

inline std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace detail

// Writes ledger.csv (bit-stable for equal configs), regret.svg and a flat
// summary.txt report.
inline void emit_outputs(const RunResult& result, const ExperimentConfig& cfg,
                         const std::string& dir) {
    require(!result.ledger.rows.empty(), "cannot emit an empty ledger");
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (!fs::is_directory(dir)) throw error("unwritable output path: " + dir);

    {
        std::ofstream csv(fs::path(dir) / "ledger.csv");
        if (!csv) throw error("unwritable output path: " + dir);
        csv << "t,loss,cum_loss,comparator_cum_loss,regret,mix_gap,bound\n";
        double cum = 0.0, comp_cum = 0.0;
        for (const auto& row : result.ledger.rows) {
            cum += row.learner_loss;
            comp_cum = cum - row.cum_regret;
            csv << row.t << ',' << detail::fmt17(row.learner_loss) << ','
                << detail::fmt17(cum) << ',' << detail::fmt17(comp_cum) << ','
                << detail::fmt17(row.cum_regret) << ','
                << detail::fmt17(row.mix_gap) << ','
                << detail::fmt17(row.bound_value) << '\n';
        }
    }
    {
        // Regret and bound curves as a standalone SVG.
        const auto& rows = result.ledger.rows;
        const double W = 720, H = 420, ml = 60, mb = 40;
        double ymax = 1e-12, ymin = 0.0;
        for (const auto& r : rows) {
            if (std::isfinite(r.bound_value))
                ymax = std::max(ymax, r.bound_value);
            ymax = std::max(ymax, r.cum_regret);
            ymin = std::min(ymin, r.cum_regret);
        }
        auto x_of = [&](int t) {
            return ml + (W - ml - 10) * (double(t) / rows.size());
        };
        auto y_of = [&](double v) {
            return (H - mb) - (H - mb - 10) * ((v - ymin) / (ymax - ymin));
        };
        auto polyline = [&](auto&& get) {
            std::ostringstream p;
            for (const auto& r : rows) {
                double v = get(r);
                if (!std::isfinite(v)) continue;
                p << x_of(r.t) << ',' << y_of(v) << ' ';
            }
            return p.str();
        };
        std::ofstream svg(fs::path(dir) / "regret.svg");
        svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W
            << "' height='" << H << "'>\n"
            << "<rect width='100%' height='100%' fill='white'/>\n"
            << "<line x1='" << ml << "' y1='" << H - mb << "' x2='" << W - 10
            << "' y2='" << H - mb << "' stroke='black'/>\n"
            << "<line x1='" << ml << "' y1='10' x2='" << ml << "' y2='"
            << H - mb << "' stroke='black'/>\n"
            << "<polyline fill='none' stroke='steelblue' stroke-width='1.5' points='"
            << polyline([](const LedgerRow& r) { return r.cum_regret; })
            << "'/>\n"
            << "<polyline fill='none' stroke='firebrick' stroke-width='1.5' "
               "stroke-dasharray='6 3' points='"
            << polyline([](const LedgerRow& r) { return r.bound_value; })
            << "'/>\n"
            << "<text x='" << ml + 10
            << "' y='24' font-family='sans-serif' font-size='13' "
               "fill='steelblue'>regret</text>\n"
            << "<text x='" << ml + 70
            << "' y='24' font-family='sans-serif' font-size='13' "
               "fill='firebrick'>bound</text>\n"
            << "<text x='" << (W / 2)
            << "' y='" << H - 8
            << "' font-family='sans-serif' font-size='13'>t</text>\n"
            << "</svg>\n";
    }
    {
        std::ofstream summary(fs::path(dir) / "summary.txt");
        summary << "algorithm = " << cfg.algorithm << '\n'
                << "d = " << cfg.d << '\n'
                << "T = " << cfg.T << '\n'
                << "seed = " << cfg.seed << '\n'
                << "final_regret = " << detail::fmt17(result.final_regret)
                << '\n'
                << "final_bound = " << detail::fmt17(result.final_bound)
                << '\n'
                << "slack = "
                << detail::fmt17(result.final_bound - result.final_regret)
                << '\n'
                << "bound_violated = " << (result.bound_violated ? 1 : 0)
                << '\n'
                << "runtime_sec = " << result.runtime_sec << '\n';
    }
}

}  // namespace ewkit
