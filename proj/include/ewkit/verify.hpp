#pragma once

#include <chrono>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "adaptive.hpp"
#include "bandit.hpp"
#include "bounds.hpp"
#include "common.hpp"
#include "ew_core.hpp"
#include "expfam.hpp"
#include "harness.hpp"
#include "rng.hpp"
#include "surrogates.hpp"

namespace ewkit {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

namespace verify_detail {

class Timer {
   public:
    Timer() : start_(std::chrono::steady_clock::now()) {}
    double sec() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                             start_)
            .count();
    }

   private:
    std::chrono::steady_clock::time_point start_;
};

inline std::string fmt(double v) {
    std::ostringstream s;
    s.precision(6);
    s << v;
    return s.str();
}

}  // namespace verify_detail

// ---------------------------------------------------------------------------
// Criterion 1: first-order methods are EW posterior means.
// 200+ rounds, 20 seeds each, tolerances 1e-8 .. 1e-12.
// ---------------------------------------------------------------------------

inline CheckResult check_gd_is_ew() {
    verify_detail::Timer timer;
    double worst = 0.0;
    const int T = 200, d = 3;
    const double sigma2 = 1.7, D = 1.0;
    ConvexDomain domain = ConvexDomain::ball(D);
    for (int seed = 1; seed <= 20; ++seed) {
        for (Flavor flavor : {Flavor::Lazy, Flavor::Greedy}) {
            CounterRng rng(seed, 11);
            std::vector<double> etas;
            for (int t = 1; t <= T; ++t) etas.push_back(0.3 / std::sqrt(double(t)));
            LearnerState ew(GaussianState::isotropic(Vec::Zero(d), sigma2),
                            Schedule::sequence(etas), flavor);
            Vec w = Vec::Zero(d), g_sum = Vec::Zero(d);
            Vec drift = rng.sphere(d);
            for (int t = 1; t <= T; ++t) {
                worst = std::max(worst, (posterior_mean(ew) - w).norm());
                Vec g = iid_linear_gradient(d, 1.0, rng, drift);
                g_sum += g;
                w = gd_step(w, g, etas[t - 1] * sigma2, domain, flavor, g_sum,
                            Vec::Zero(d));
                ew = ew_update(ew, LinearSurrogate(g), domain);
            }
            worst = std::max(worst, (posterior_mean(ew) - w).norm());
        }
    }
    return {"gd-matches-ew-posterior-mean", worst < 1e-10,
            "max deviation " + verify_detail::fmt(worst) + ", " +
                verify_detail::fmt(timer.sec()) + "s"};
}

inline CheckResult check_egpm_is_ew() {
    verify_detail::Timer timer;
    double worst = 0.0;
    const int T = 200, d = 4;
    const double M = 1.3, eta = 0.21;
    ConvexDomain domain = ConvexDomain::all_space();
    for (int seed = 1; seed <= 20; ++seed) {
        CounterRng rng(seed, 12);
        Vec drift = rng.sphere(d);
        LearnerState ew(DiscreteAtoms::signed_basis(d, M),
                        Schedule::constant(eta), Flavor::Greedy);
        EgpmWeights w = EgpmWeights::uniform(d);
        for (int t = 1; t <= T; ++t) {
            worst = std::max(
                worst, (posterior_mean(ew) - M * w.prediction()).norm());
            Vec g = iid_linear_gradient(d, 1.0, rng, drift);
            w = egpm_step(w.plus, w.minus, M * g, eta);
            ew = ew_update(ew, LinearSurrogate(g), domain);
        }
    }
    return {"eg-plus-minus-matches-ew-on-signed-atoms", worst < 1e-12,
            "max deviation " + verify_detail::fmt(worst) + ", " +
                verify_detail::fmt(timer.sec()) + "s"};
}

inline CheckResult check_md_is_ew() {
    verify_detail::Timer timer;
    double worst_gauss = 0.0, worst_poisson = 0.0;
    const int T = 200, d = 3;
    const double sigma2 = 0.8, eta = 0.07;
    for (int seed = 1; seed <= 20; ++seed) {
        {
            // Gaussian carrier: MD == GD == EW posterior mean, ball domain.
            CounterRng rng(seed, 13);
            Vec drift = rng.sphere(d);
            ConvexDomain domain = ConvexDomain::ball(1.0);
            BregmanPair carrier = BregmanPair::gaussian(sigma2);
            LearnerState ew(GaussianState::isotropic(Vec::Zero(d), sigma2),
                            Schedule::constant(eta), Flavor::Greedy);
            Vec w = Vec::Zero(d);
            for (int t = 1; t <= T; ++t) {
                worst_gauss =
                    std::max(worst_gauss, (posterior_mean(ew) - w).norm());
                Vec g = iid_linear_gradient(d, 1.0, rng, drift);
                w = md_step(w, g, eta, carrier, domain, Flavor::Greedy);
                ew = ew_update(ew, LinearSurrogate(g), domain);
            }
        }
        {
            // Poisson carrier on a positive box.
            CounterRng rng(seed, 14);
            Vec drift = rng.sphere(d);
            ConvexDomain domain = ConvexDomain::box(Vec::Constant(d, 0.05),
                                                    Vec::Constant(d, 3.0));
            BregmanPair carrier = BregmanPair::poisson();
            LearnerState ew(PoissonProductState(Vec::Ones(d)),
                            Schedule::constant(eta), Flavor::Greedy);
            Vec w = Vec::Ones(d);
            for (int t = 1; t <= T; ++t) {
                worst_poisson =
                    std::max(worst_poisson, (posterior_mean(ew) - w).norm());
                Vec g = iid_linear_gradient(d, 1.0, rng, drift);
                w = md_step(w, g, eta, carrier, domain, Flavor::Greedy);
                ew = ew_update(ew, LinearSurrogate(g), domain);
            }
        }
    }
    double worst = std::max(worst_gauss, worst_poisson);
    return {"mirror-descent-matches-ew", worst_gauss < 1e-12 && worst_poisson < 1e-8,
            "gaussian carrier " + verify_detail::fmt(worst_gauss) +
                ", poisson carrier " + verify_detail::fmt(worst_poisson) + ", " +
                verify_detail::fmt(timer.sec()) + "s (worst " +
                verify_detail::fmt(worst) + ")"};
}

inline CheckResult check_quadratic_recursion_is_ew() {
    verify_detail::Timer timer;
    double worst = 0.0;
    const int T = 200, d = 3;
    const double sigma2 = 1.2, eta = 0.4;
    for (int seed = 1; seed <= 20; ++seed) {
        for (bool constrained : {false, true}) {
            ConvexDomain domain = constrained ? ConvexDomain::ball(0.8)
                                              : ConvexDomain::all_space();
            // Lazy agrees with the closed-form recursion only while the
            // projection never binds, so lazy runs unconstrained.
            Flavor flavor = constrained ? Flavor::Greedy : Flavor::Lazy;
            CounterRng rng(seed, 15);
            LearnerState ew(GaussianState::isotropic(Vec::Zero(d), sigma2),
                            Schedule::constant(eta), flavor);
            QuadEWState q(Vec::Zero(d), sigma2 * Mat::Identity(d, d), eta,
                          flavor);
            for (int t = 1; t <= T; ++t) {
                worst = std::max(worst, (posterior_mean(ew) - q.mean()).norm());
                Vec g = 0.3 * rng.normal_vec(d);
                Vec v = rng.sphere(d);
                Mat m = 0.5 * (v * v.transpose());
                Vec anchor = q.flavor() == Flavor::Greedy ? q.mean() : q.raw_mean();
                QuadraticSurrogate s(g, m, anchor);
                q = quad_ew_step(q, s, domain);
                ew = ew_update(ew, s, domain);
            }
        }
    }
    return {"quadratic-recursion-matches-ew", worst < 1e-9,
            "max deviation " + verify_detail::fmt(worst) + ", " +
                verify_detail::fmt(timer.sec()) + "s"};
}

inline CheckResult check_kt_is_beta_ew() {
    verify_detail::Timer timer;
    double worst = 0.0;
    const int T = 300;
    ConvexDomain domain = ConvexDomain::all_space();
    for (int seed = 1; seed <= 20; ++seed) {
        CounterRng rng(seed, 16);
        for (Flavor flavor : {Flavor::Lazy, Flavor::Greedy}) {
            CounterRng seq(seed, 17);
            LearnerState ew(BetaState(0.5, 0.5), Schedule::constant(1.0),
                            flavor);
            int ones = 0;
            for (int t = 1; t <= T; ++t) {
                worst = std::max(worst, std::abs(posterior_mean(ew)[0] -
                                                 kt_predict(ones, t)));
                int x = seq.uniform() < 0.4 ? 1 : 0;
                ones += x;
                ew = ew_update(ew, LogLossSurrogate(x), domain);
            }
        }
        (void)rng;
    }
    return {"kt-predictor-matches-beta-ew", worst < 1e-12,
            "max deviation " + verify_detail::fmt(worst) + ", " +
                verify_detail::fmt(timer.sec()) + "s"};
}

// ---------------------------------------------------------------------------
// Criterion 2: KT log-loss regret <= ln(2 sqrt T), 100 sequences.
// ---------------------------------------------------------------------------

inline CheckResult check_kt_bound() {
    verify_detail::Timer timer;
    const int T = 1000;
    double worst_slack = kInf;
    bool ok = true;
    for (int seed = 1; seed <= 100; ++seed) {
        ExperimentConfig cfg;
        cfg.algorithm = "kt";
        cfg.T = T;
        cfg.seed = seed;
        RunResult r = run_experiment(cfg);
        if (r.bound_violated) ok = false;
        worst_slack = std::min(worst_slack, r.final_bound - r.final_regret);
    }
    return {"kt-regret-within-log-bound", ok,
            "100 sequences, min slack " + verify_detail::fmt(worst_slack) +
                ", " + verify_detail::fmt(timer.sec()) + "s"};
}

// ---------------------------------------------------------------------------
// Criterion 3: EG+- regret <= G M sqrt(2 T ln 2d) at the tuned rate.
// ---------------------------------------------------------------------------

inline CheckResult check_egpm_bound() {
    verify_detail::Timer timer;
    bool ok = true;
    double worst_slack = kInf;
    for (int d : {2, 50}) {
        for (int seed = 1; seed <= 20; ++seed) {
            ExperimentConfig cfg;
            cfg.algorithm = "egpm";
            cfg.d = d;
            cfg.T = 1000;
            cfg.seed = seed;
            RunResult r = run_experiment(cfg);
            if (r.bound_violated) ok = false;
            worst_slack = std::min(worst_slack, r.final_bound - r.final_regret);
        }
    }
    return {"egpm-regret-within-tuned-bound", ok,
            "d in {2,50}, 20 seeds, min slack " +
                verify_detail::fmt(worst_slack) + ", " +
                verify_detail::fmt(timer.sec()) + "s"};
}

// ---------------------------------------------------------------------------
// Criterion 4: quadratic-surrogate bounds (generic, strongly convex, ONS).
// ---------------------------------------------------------------------------

inline CheckResult check_quadratic_bounds() {
    verify_detail::Timer timer;
    bool ok = true;
    std::ostringstream detail;
    for (const char* algo : {"quad-ew", "sc-gd", "ons"}) {
        double worst_slack = kInf;
        for (int seed = 1; seed <= 20; ++seed) {
            ExperimentConfig cfg;
            cfg.algorithm = algo;
            cfg.d = 5;
            cfg.T = 2000;
            cfg.seed = seed;
            RunResult r = run_experiment(cfg);
            if (r.bound_violated) ok = false;
            worst_slack = std::min(worst_slack, r.final_bound - r.final_regret);
        }
        detail << algo << " min slack " << verify_detail::fmt(worst_slack)
               << "; ";
    }
    detail << verify_detail::fmt(timer.sec()) << "s";
    return {"quadratic-surrogate-regret-bounds", ok, detail.str()};
}

// Also part of criterion 4's support: GD bound soundness on both flavors.
inline CheckResult check_gd_bounds() {
    verify_detail::Timer timer;
    bool ok = true;
    double worst_slack = kInf;
    for (const char* algo : {"gd-lazy", "gd-greedy", "md-poisson"}) {
        for (int seed = 1; seed <= 20; ++seed) {
            ExperimentConfig cfg;
            cfg.algorithm = algo;
            cfg.d = 4;
            cfg.T = 1000;
            cfg.seed = seed;
            RunResult r = run_experiment(cfg);
            if (r.bound_violated) ok = false;
            worst_slack = std::min(worst_slack, r.final_bound - r.final_regret);
        }
    }
    return {"first-order-regret-bounds", ok,
            "min slack " + verify_detail::fmt(worst_slack) + ", " +
                verify_detail::fmt(timer.sec()) + "s"};
}

// ---------------------------------------------------------------------------
// Criterion 5: adaptive experts. Potential invariants at 1e-10, the
// variance-rate bound at every grid rate against point-mass and two-expert
// comparator mixtures, and the coin-betting bound. 50 seeds.
// ---------------------------------------------------------------------------

inline CheckResult check_adaptive_experts() {
    verify_detail::Timer timer;
    bool ok = true;
    double worst_potential = 0.0;   // |E[1 + eta r] - 1| for iprod
    double worst_squint = 0.0;      // most negative squint mix loss
    double worst_slack = kInf;
    std::ostringstream why;
    for (int seed = 1; seed <= 50 && ok; ++seed) {
        for (int d : {2, 10}) {
            for (int T : {100, 1000}) {
                CounterRng rng(seed, 21);
                int favored = rng.uniform_int(d);
                bool low_var = (seed % 2) == 0;
                EtaGridPosterior iprod = EtaGridPosterior::make(d, T);
                EtaGridPosterior squint = EtaGridPosterior::make(d, T);
                CoinBettingState cb(d, T);
                Vec r_iprod = Vec::Zero(d), v_iprod = Vec::Zero(d);
                Vec r_squint = Vec::Zero(d), v_squint = Vec::Zero(d);
                Vec r_cb = Vec::Zero(d);
                for (int t = 1; t <= T; ++t) {
                    Vec g = low_var
                                ? experts_low_variance_losses(d, rng, favored)
                                : experts_bounded_losses(d, rng, favored);
                    {
                        Vec w = iprod_weights(iprod);
                        Vec r = instantaneous_regrets(w, g);
                        double m = iprod.mix_loss([&](double eta, int i) {
                            return std::log1p(eta * r[i]);
                        });
                        worst_potential =
                            std::max(worst_potential, std::abs(m));
                        iprod_update(iprod, r);
                        r_iprod += r;
                        v_iprod += r.cwiseProduct(r);
                    }
                    {
                        Vec w = iprod_weights(squint);
                        Vec r = instantaneous_regrets(w, g);
                        double m = squint.mix_loss([&](double eta, int i) {
                            return eta * r[i] - eta * eta * r[i] * r[i];
                        });
                        worst_squint = std::min(worst_squint, m);
                        squint_update(squint, r);
                        r_squint += r;
                        v_squint += r.cwiseProduct(r);
                    }
                    {
                        Vec w = cb.weights();
                        Vec r = instantaneous_regrets(w, g);
                        r_cb += r;
                        cb.step(g);
                    }
                }
                // Bound check per grid rate, point mass on the best expert
                // and a uniform mixture over the top two.
                auto grid_bound_holds = [&](const EtaGridPosterior& post,
                                            const Vec& r_sum, const Vec& v_sum) {
                    std::vector<int> order(d);
                    for (int i = 0; i < d; ++i) order[i] = i;
                    std::sort(order.begin(), order.end(), [&](int a, int b) {
                        return r_sum[a] > r_sum[b];
                    });
                    struct Hat {
                        double r, v, kl;
                    };
                    std::vector<Hat> hats;
                    hats.push_back({r_sum[order[0]], v_sum[order[0]],
                                    std::log(double(d))});
                    if (d >= 2) {
                        hats.push_back(
                            {0.5 * (r_sum[order[0]] + r_sum[order[1]]),
                             0.5 * (v_sum[order[0]] + v_sum[order[1]]),
                             std::log(d / 2.0)});
                    }
                    for (const Hat& h : hats) {
                        for (int k = 0; k < post.grid().size(); ++k) {
                            double es = post.grid()[k];
                            double b = bounds::iprod_special(
                                es, h.v, h.kl,
                                post.gamma_mass(es / 2.0, es));
                            if (h.r > b + 1e-9) return false;
                            worst_slack = std::min(worst_slack, b - h.r);
                        }
                    }
                    return true;
                };
                if (!grid_bound_holds(iprod, r_iprod, v_iprod)) {
                    ok = false;
                    why << "iprod bound violated seed " << seed << " d " << d
                        << " T " << T << "; ";
                }
                if (!grid_bound_holds(squint, r_squint, v_squint)) {
                    ok = false;
                    why << "squint bound violated seed " << seed << " d " << d
                        << " T " << T << "; ";
                }
                double cb_bound =
                    bounds::coin_betting(T, std::log(double(d)));
                if (r_cb.maxCoeff() > cb_bound + 1e-9) {
                    ok = false;
                    why << "coin-betting bound violated seed " << seed << " d "
                        << d << " T " << T << "; ";
                }
                worst_slack =
                    std::min(worst_slack, cb_bound - r_cb.maxCoeff());
            }
        }
    }
    if (worst_potential > 1e-10) {
        ok = false;
        why << "iprod potential drift " << verify_detail::fmt(worst_potential)
            << "; ";
    }
    if (worst_squint < -1e-10) {
        ok = false;
        why << "squint potential increased by "
            << verify_detail::fmt(-worst_squint) << "; ";
    }
    why << "potential drift " << verify_detail::fmt(worst_potential)
        << ", min bound slack " << verify_detail::fmt(worst_slack) << ", "
        << verify_detail::fmt(timer.sec()) << "s";
    return {"adaptive-experts-potentials-and-bounds", ok, why.str()};
}

// ---------------------------------------------------------------------------
// Criterion 6: bandit EW. Estimator unbiasedness and the exploration moment
// identity at Monte-Carlo tolerance, the second-moment floor, and the regret
// bound over 20 replicates (mean must hold; an individual run may exceed the
// bound by < 2x and is flagged, not failed).
// ---------------------------------------------------------------------------

inline CheckResult check_bandit_estimator() {
    verify_detail::Timer timer;
    std::ostringstream why;
    bool ok = true;
    const int d = 2;
    const double D = 1.0;
    ConvexDomain domain = ConvexDomain::ball(D);
    ExplorationSpec exploration = ExplorationSpec::for_domain(domain, d);
    CounterRng rng(7, 31);

    // Exploration second moment: E_R[w w'] = H / d.
    {
        const int n = 100000;
        Mat s = Mat::Zero(d, d);
        for (int i = 0; i < n; ++i) {
            Vec w = exploration.sample(rng);
            s += w * w.transpose();
        }
        s /= n;
        double err = (s - exploration.second_moment()).cwiseAbs().maxCoeff();
        if (err > 5e-3) {
            ok = false;
            why << "exploration moment error " << verify_detail::fmt(err)
                << "; ";
        } else {
            why << "exploration moment error " << verify_detail::fmt(err)
                << "; ";
        }
    }

    // Unbiasedness of the loss-vector estimate under the exact mixture
    // second moment, and the gamma/d floor on that moment.
    {
        BanditPosterior posterior(domain, d);
        Vec theta(d);
        theta << 3.0, -2.0;
        posterior.shift_natural(theta, rng);
        BanditTuning tune = tuned_parameters(d, 10000);
        Mat s = mixture_second_moment_exact(posterior, exploration, tune.gamma);
        Eigen::SelfAdjointEigenSolver<Mat> es(s);
        double floor =
            (tune.gamma / d) *
            Eigen::SelfAdjointEigenSolver<Mat>(exploration.john_matrix())
                .eigenvalues()
                .minCoeff();
        if (es.eigenvalues().minCoeff() < floor - 1e-12) {
            ok = false;
            why << "second moment below gamma/d floor; ";
        }
        Vec g(d);
        g << 0.6, -0.5;
        const int n = 100000;
        Vec mean = Vec::Zero(d);
        for (int i = 0; i < n; ++i) {
            Vec w = sample_action(posterior, exploration, tune.gamma, rng);
            mean += estimate_loss_vector(w, w.dot(g), s);
        }
        mean /= n;
        double err = (mean - g).cwiseAbs().maxCoeff();
        why << "estimator bias " << verify_detail::fmt(err) << "; ";
        if (err > 0.02) {
            ok = false;
            why << "estimator biased beyond MC tolerance; ";
        }
    }
    why << verify_detail::fmt(timer.sec()) << "s";
    return {"bandit-estimator-unbiased-and-floored", ok, why.str()};
}

inline CheckResult check_bandit_regret() {
    verify_detail::Timer timer;
    const int replicates = 20;
    double sum_regret = 0.0;
    double bound = 0.0;
    int flagged = 0;
    bool ok = true;
    std::ostringstream why;
    for (int seed = 1; seed <= replicates; ++seed) {
        ExperimentConfig cfg;
        cfg.algorithm = "bandit-ew";
        cfg.d = 2;
        cfg.T = 10000;
        cfg.seed = seed;
        cfg.bandit_moment = "analytic";
        RunResult r = run_experiment(cfg);
        sum_regret += r.final_regret;
        bound = r.final_bound;
        if (r.final_regret > r.final_bound) {
            if (r.final_regret < 2.0 * r.final_bound) {
                ++flagged;
            } else {
                ok = false;
                why << "seed " << seed << " regret "
                    << verify_detail::fmt(r.final_regret) << " >= 2x bound; ";
            }
        }
    }
    double mean_regret = sum_regret / replicates;
    if (mean_regret > bound) {
        ok = false;
        why << "mean regret above bound; ";
    }
    why << "mean regret " << verify_detail::fmt(mean_regret) << " vs bound "
        << verify_detail::fmt(bound) << ", " << flagged
        << " runs flagged above bound (<2x), " << verify_detail::fmt(timer.sec())
        << "s";
    return {"bandit-mean-regret-within-bound", ok, why.str()};
}

// ---------------------------------------------------------------------------
// Criterion 7: numeric oracles. Quadrature gap vs closed form, Monte-Carlo
// Gaussian divergence, and two analytic inequalities swept over grids.
// ---------------------------------------------------------------------------

inline CheckResult check_numeric_oracles() {
    verify_detail::Timer timer;
    bool ok = true;
    std::ostringstream why;

    // Quadrature fallback agrees with the linear closed form, d = 1 and 2.
    {
        double worst = 0.0;
        CounterRng rng(3, 41);
        for (int d : {1, 2}) {
            for (int rep = 0; rep < 5; ++rep) {
                Vec mean = rng.normal_vec(d);
                Mat a = Mat::NullaryExpr(
                    d, d, [&](int, int) { return rng.normal(); });
                Mat cov = a * a.transpose() + 0.5 * Mat::Identity(d, d);
                GaussianState g(mean, cov);
                Vec grad = 0.5 * rng.normal_vec(d);
                double eta = 0.3;
                double closed = 0.5 * eta * grad.dot(cov * grad);
                SurrogateLoss loss{LinearSurrogate(grad)};
                double quad = detail::gaussian_quadrature_gap(g, loss, eta);
                worst = std::max(worst, std::abs(quad - closed));
            }
        }
        why << "quadrature-vs-closed-form " << verify_detail::fmt(worst)
            << "; ";
        if (worst > 1e-6) ok = false;
    }

    // Monte-Carlo oracle for the Gaussian divergence.
    {
        CounterRng rng(5, 42);
        Vec mq(2), mp(2);
        mq << 0.4, -0.2;
        mp << 0.0, 0.1;
        Mat cq(2, 2), cp(2, 2);
        cq << 1.0, 0.3, 0.3, 0.7;
        cp << 1.5, -0.2, -0.2, 1.1;
        GaussianState q(mq, cq), p(mp, cp);
        double exact = kl_gaussian(q, p);
        Eigen::LLT<Mat> lq(cq);
        Mat l = lq.matrixL();
        auto logdet = [](const Mat& c) {
            return 2.0 * Mat(c.llt().matrixL())
                             .diagonal()
                             .array()
                             .log()
                             .sum();
        };
        double mc = 0.0;
        const int n = 1000000;
        for (int i = 0; i < n; ++i) {
            Vec w = mq + l * rng.normal_vec(2);
            Vec dq = w - mq, dp = w - mp;
            double log_q = -0.5 * dq.dot(q.precision() * dq) - 0.5 * logdet(cq);
            double log_p = -0.5 * dp.dot(p.precision() * dp) - 0.5 * logdet(cp);
            mc += log_q - log_p;
        }
        mc /= n;
        double err = std::abs(mc - exact);
        why << "gaussian-divergence-mc-error " << verify_detail::fmt(err)
            << "; ";
        if (err > 1e-2) ok = false;
    }

    // kl(x,y) >= 2 (x-y)^2 on a grid of Bernoulli pairs.
    {
        int violations = 0;
        for (int i = 0; i <= 1000; ++i) {
            for (int j = 0; j <= 1000; ++j) {
                double x = i / 1000.0, y = j / 1000.0;
                double kl = kl_bernoulli(x, y);
                if (kl < 2.0 * (x - y) * (x - y) - 1e-12) ++violations;
            }
        }
        why << "quadratic-lower-bound violations " << violations << "; ";
        if (violations != 0) ok = false;
    }

    // exp(x - x^2) <= 1 + x for x >= -1/2 (the factor domination used by
    // the variance-adaptive updates).
    {
        int violations = 0;
        for (int i = 0; i <= 10000; ++i) {
            double x = -0.5 + 1.0 * i / 10000.0;
            if (std::exp(x - x * x) > 1.0 + x + 1e-12) ++violations;
        }
        why << "factor-domination violations " << violations << "; ";
        if (violations != 0) ok = false;
    }

    why << verify_detail::fmt(timer.sec()) << "s";
    return {"numeric-oracles", ok, why.str()};
}

// ---------------------------------------------------------------------------
// Criterion 8: (eta, sigma^2) -> (c eta, sigma^2 / c) leaves the played
// trajectory unchanged.
// ---------------------------------------------------------------------------

inline CheckResult check_scaling_redundancy() {
    verify_detail::Timer timer;
    double worst = 0.0;
    const int T = 200, d = 3;
    const double eta = 0.15, sigma2 = 1.4;
    ConvexDomain domain = ConvexDomain::ball(1.0);
    for (double c : {0.1, 10.0}) {
        for (int seed = 1; seed <= 10; ++seed) {
            CounterRng rng_a(seed, 51), rng_b(seed, 51);
            Vec drift_a = rng_a.sphere(d), drift_b = rng_b.sphere(d);
            LearnerState a(GaussianState::isotropic(Vec::Zero(d), sigma2),
                           Schedule::constant(eta), Flavor::Greedy);
            LearnerState b(GaussianState::isotropic(Vec::Zero(d), sigma2 / c),
                           Schedule::constant(c * eta), Flavor::Greedy);
            for (int t = 1; t <= T; ++t) {
                worst = std::max(worst,
                                 (posterior_mean(a) - posterior_mean(b)).norm());
                Vec ga = iid_linear_gradient(d, 1.0, rng_a, drift_a);
                Vec gb = iid_linear_gradient(d, 1.0, rng_b, drift_b);
                a = ew_update(a, LinearSurrogate(ga), domain);
                b = ew_update(b, LinearSurrogate(gb), domain);
            }
        }
    }
    return {"rate-variance-scaling-redundancy", worst < 1e-10,
            "max deviation " + verify_detail::fmt(worst) + ", " +
                verify_detail::fmt(timer.sec()) + "s"};
}

// ---------------------------------------------------------------------------
// Suites.
// ---------------------------------------------------------------------------

inline std::vector<CheckResult> verify_core() {
    return {
        check_gd_is_ew(),
        check_egpm_is_ew(),
        check_md_is_ew(),
        check_quadratic_recursion_is_ew(),
        check_kt_is_beta_ew(),
        check_kt_bound(),
        check_egpm_bound(),
        check_gd_bounds(),
        check_quadratic_bounds(),
        check_numeric_oracles(),
        check_scaling_redundancy(),
    };
}

inline std::vector<CheckResult> verify_adaptive() {
    return {check_adaptive_experts()};
}

inline std::vector<CheckResult> verify_bandit() {
    return {check_bandit_estimator(), check_bandit_regret()};
}

inline std::vector<CheckResult> verify_suite(const std::string& suite) {
    std::vector<CheckResult> out;
    auto append = [&](std::vector<CheckResult> v) {
        for (auto& c : v) out.push_back(std::move(c));
    };
    if (suite == "all") {
        append(verify_core());
        append(verify_adaptive());
        append(verify_bandit());
    } else if (suite == "core") {
        append(verify_core());
    } else if (suite == "adaptive") {
        append(verify_adaptive());
    } else if (suite == "bandit") {
        append(verify_bandit());
    } else {
        throw config_error("unknown verify suite: " + suite);
    }
    return out;
}

}  // namespace ewkit
