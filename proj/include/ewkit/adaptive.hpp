#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "common.hpp"

namespace ewkit {

// ---------------------------------------------------------------------------
// Experts setting: losses g_t in [0,1]^d, instantaneous regrets
// r_t(i) = <w_t, g_t> - g_{t,i} in [-1, 1].
// ---------------------------------------------------------------------------

inline Vec instantaneous_regrets(const Vec& w, const Vec& g) {
    require(w.size() == g.size(), "dimension mismatch");
    require(std::abs(w.sum() - 1.0) < 1e-12 && (w.array() >= -1e-12).all(),
            "weights must lie on the simplex");
    double mix = w.dot(g);
    return Vec(Vec::Constant(g.size(), mix) - g);
}

// ---------------------------------------------------------------------------
// Krichevsky-Trofimov forecaster: (ones + 1/2) / t, the Beta(1/2,1/2)
// posterior mean under log loss with learning rate 1.
// ---------------------------------------------------------------------------

inline double kt_predict(int ones_count, int t) {
    require(t >= 1 && ones_count >= 0 && ones_count <= t - 1,
            "need 0 <= ones_count <= t-1");
    return (ones_count + 0.5) / t;
}

// ---------------------------------------------------------------------------
// Joint posterior on (eta, i) over an exponentially spaced eta grid.
// Weights are kept in log space; renormalized every round.
// ---------------------------------------------------------------------------

class EtaGridPosterior {
   public:
    // Grid eta_k = 2^{-k}, k = 1..K with K = 1 + ceil(log2 sqrt(T)) so that
    // eta_min >= 1/sqrt(T); prior gamma(eta_k) proportional to 1/eta_k,
    // expert prior pi (uniform by default).
    static EtaGridPosterior make(int d, int T, Vec pi = Vec()) {
        require(d >= 1 && T >= 1, "need d >= 1, T >= 1");
        int k_max = 1 + static_cast<int>(
                            std::ceil(std::log2(std::sqrt(double(T)))));
        k_max = std::max(k_max, 1);
        std::vector<double> grid;
        for (int k = k_max; k >= 1; --k) grid.push_back(std::pow(2.0, -k));
        EtaGridPosterior p;
        p.grid_ = Vec::Map(grid.data(), static_cast<int>(grid.size()));
        Vec gamma = p.grid_.cwiseInverse();
        gamma /= gamma.sum();
        if (pi.size() == 0) pi = Vec::Constant(d, 1.0 / d);
        require(pi.size() == d && std::abs(pi.sum() - 1.0) < 1e-9,
                "expert prior must be a distribution on d experts");
        p.log_joint_ = Mat(p.grid_.size(), d);
        for (int k = 0; k < p.grid_.size(); ++k)
            for (int i = 0; i < d; ++i)
                p.log_joint_(k, i) = std::log(gamma[k]) + std::log(pi[i]);
        p.gamma_prior_ = gamma;
        p.pi_prior_ = pi;
        return p;
    }

    int experts() const { return static_cast<int>(log_joint_.cols()); }
    const Vec& grid() const { return grid_; }
    const Vec& gamma_prior() const { return gamma_prior_; }
    const Vec& pi_prior() const { return pi_prior_; }

    Mat joint() const {
        Mat w = (log_joint_.array() - log_joint_.maxCoeff()).exp();
        return w / w.sum();
    }

    // Prior mass gamma([eta_star/2, eta_star]) at grid resolution.
    double gamma_mass(double eta_lo, double eta_hi) const {
        double m = 0.0;
        for (int k = 0; k < grid_.size(); ++k)
            if (grid_[k] >= eta_lo - 1e-15 && grid_[k] <= eta_hi + 1e-15)
                m += gamma_prior_[k];
        return m;
    }

    // Multiply each joint weight (eta, i) by the given factor, renormalize.
    template <class FactorFn>
    void tilt(FactorFn&& log_factor) {
        for (int k = 0; k < grid_.size(); ++k)
            for (int i = 0; i < experts(); ++i)
                log_joint_(k, i) += log_factor(grid_[k], i);
        double m = log_joint_.maxCoeff();
        double z = (log_joint_.array() - m).exp().sum();
        log_joint_.array() -= m + std::log(z);
    }

    // -ln E[factor] for the current posterior; feeds the potential ledger.
    template <class FactorFn>
    double mix_loss(FactorFn&& log_factor) const {
        Mat w = joint();
        double e = 0.0;
        for (int k = 0; k < grid_.size(); ++k)
            for (int i = 0; i < experts(); ++i)
                e += w(k, i) * std::exp(log_factor(grid_[k], i));
        return -std::log(e);
    }

   private:
    Vec grid_;
    Mat log_joint_;
    Vec gamma_prior_;
    Vec pi_prior_;
};

// Tilted marginal mean: w_t = E[eta e_i] / E[eta].
inline Vec iprod_weights(const EtaGridPosterior& posterior) {
    Mat w = posterior.joint();
    const Vec& grid = posterior.grid();
    Vec num = Vec::Zero(posterior.experts());
    double denom = 0.0;
    for (int k = 0; k < grid.size(); ++k) {
        for (int i = 0; i < posterior.experts(); ++i) {
            num[i] += grid[k] * w(k, i);
            denom += grid[k] * w(k, i);
        }
    }
    require(denom > 0, "E[eta] must be positive");
    return Vec(num / denom);
}

// iProd update: each joint weight multiplied by (1 + eta r_t(i)).
// Requires grid eta <= 1/2 so 1 + eta r >= 1/2 > 0.
inline void iprod_update(EtaGridPosterior& posterior, const Vec& r) {
    require(r.size() == posterior.experts(), "regret vector size mismatch");
    for (int k = 0; k < posterior.grid().size(); ++k)
        for (int i = 0; i < r.size(); ++i)
            require(1.0 + posterior.grid()[k] * r[i] > 0,
                    "iProd factor nonpositive (eta r <= -1)");
    posterior.tilt([&](double eta, int i) {
        return std::log1p(eta * r[i]);
    });
}

// Squint update: factor exp(eta r - eta^2 r^2); dominated by the iProd
// factor for eta r >= -1/2 (the prod bound).
inline void squint_update(EtaGridPosterior& posterior, const Vec& r) {
    require(r.size() == posterior.experts(), "regret vector size mismatch");
    posterior.tilt([&](double eta, int i) {
        return eta * r[i] - eta * eta * r[i] * r[i];
    });
}

// ---------------------------------------------------------------------------
// Coin Betting for experts: per-expert KT-style learning rates driven by
// running regrets, wealths as unnormalized EW probabilities.
// ---------------------------------------------------------------------------

// Clipped KT rate: max{R_{t-1}(i) / (t - 1 + 2a), 0}. Clipping realizes the
// lazy-EW projection onto {E[eta] >= 0}.
inline double coinbetting_eta(double R_prev, int t, double a) {
    require(t >= 1 && a >= 0.5, "need t >= 1, a >= 1/2");
    return std::max(R_prev / (t - 1 + 2.0 * a), 0.0);
}

class CoinBettingState {
   public:
    // a = T/4 + 1/2 matches the beta(a,a) prior over eta in [-1,1].
    CoinBettingState(int d, int T, Vec pi = Vec(), bool clip_regrets = false)
        : a_(T / 4.0 + 0.5), clip_regrets_(clip_regrets) {
        require(d >= 1 && T >= 1, "need d >= 1, T >= 1");
        if (pi.size() == 0) pi = Vec::Constant(d, 1.0 / d);
        require(pi.size() == d && std::abs(pi.sum() - 1.0) < 1e-9,
                "prior must be a distribution on d experts");
        pi_ = pi;
        wealth_ = pi;
        running_regret_ = Vec::Zero(d);
        round_ = 1;
    }

    int experts() const { return static_cast<int>(pi_.size()); }
    double shape_a() const { return a_; }
    const Vec& prior() const { return pi_; }
    const Vec& wealth() const { return wealth_; }
    const Vec& running_regret() const { return running_regret_; }
    int round() const { return round_; }

    Vec rates() const {
        Vec eta(experts());
        for (int i = 0; i < experts(); ++i)
            eta[i] = coinbetting_eta(running_regret_[i], round_, a_);
        return eta;
    }

    // Simplex weights for the current round. When every bet is zero (all
    // running regrets nonpositive) the prior pi is emitted.
    Vec weights() const {
        Vec bets = wealth_.cwiseProduct(rates());
        double s = bets.sum();
        if (s <= 0.0) return pi_;
        return Vec(bets / s);
    }

    // Plays weights(), observes the loss vector, updates wealths by the
    // recursion p_{t+1}(i) = p_t(i) + w_t(i) r_t(i).
    Vec step(const Vec& g) {
        require(g.size() == experts(), "loss vector size mismatch");
        Vec w = weights();
        Vec eta = rates();
        Vec bets = wealth_.cwiseProduct(eta);
        double mix = w.dot(g);
        for (int i = 0; i < experts(); ++i) {
            double r = mix - g[i];
            // Optional original-variant behavior: clip the instantaneous
            // regret when the running regret is negative. Default off.
            if (clip_regrets_ && running_regret_[i] < 0.0) r = std::max(r, 0.0);
            wealth_[i] += bets[i] * r;
            running_regret_[i] += r;
        }
        ++round_;
        return w;
    }

   private:
    double a_;
    bool clip_regrets_;
    Vec pi_;
    Vec wealth_;
    Vec running_regret_;
    int round_;
};

}  // namespace ewkit
