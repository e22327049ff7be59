#pragma once

#include <cmath>
#include <utility>

#include "common.hpp"
#include "domain.hpp"
#include "ew_core.hpp"
#include "expfam.hpp"
#include "losses.hpp"

namespace ewkit {

// ---------------------------------------------------------------------------
// Gradient Descent, both flavors. anchor_sum carries sum_{s<=t} g_s for the
// lazy flavor (w_1 is the lazy anchor point).
// ---------------------------------------------------------------------------

inline Vec gd_step(const Vec& w, const Vec& g, double eta,
                   const ConvexDomain& domain, Flavor flavor,
                   const Vec& anchor_sum, const Vec& w1 = Vec()) {
    require(eta > 0, "eta must be positive");
    Vec raw;
    if (flavor == Flavor::Greedy) {
        raw = w - eta * g;
    } else {
        const Vec& origin = w1.size() > 0 ? w1 : Vec(Vec::Zero(w.size()));
        raw = origin - eta * anchor_sum;
    }
    return domain.project(raw);
}

// ---------------------------------------------------------------------------
// EG+- multiplicative update with joint normalization. The prediction is
// w = w+ - w-, which satisfies ||w||_1 <= 1.
// ---------------------------------------------------------------------------

struct EgpmWeights {
    Vec plus;
    Vec minus;

    Vec prediction() const { return plus - minus; }

    static EgpmWeights uniform(int d) {
        return {Vec::Constant(d, 1.0 / (2.0 * d)),
                Vec::Constant(d, 1.0 / (2.0 * d))};
    }
};

inline EgpmWeights egpm_step(const Vec& wplus, const Vec& wminus, const Vec& g,
                             double eta) {
    require(eta > 0, "eta must be positive");
    require((wplus.array() >= 0).all() && (wminus.array() >= 0).all(),
            "weights must be nonnegative");
    require(wplus.sum() + wminus.sum() > 0, "all-zero weights");
    Vec p = wplus.array() * (-eta * g.array()).exp();
    Vec m = wminus.array() * (eta * g.array()).exp();
    double z = p.sum() + m.sum();
    return {Vec(p / z), Vec(m / z)};
}

// Tuned constant rate from the EG+- regret theorem.
inline double egpm_tuned_eta(int d, int T, double M, double G) {
    return std::sqrt(2.0 * std::log(2.0 * d) / (T * M * M * G * G));
}

// ---------------------------------------------------------------------------
// Mirror Descent / FTRL for an explicitly supplied mirror pair. The mirror
// map and its inverse must both be given; no numeric inversion.
// ---------------------------------------------------------------------------

struct MdState {
    Vec w;           // current (projected) point
    Vec theta_lazy;  // accumulated dual point for the lazy flavor
};

inline Vec md_step(const Vec& w, const Vec& g, double eta,
                   const BregmanPair& bregman, const ConvexDomain& domain,
                   Flavor flavor, Vec* theta_lazy = nullptr) {
    require(eta > 0, "eta must be positive");
    Vec theta;
    if (flavor == Flavor::Greedy) {
        theta = bregman.gradFstar(w) - eta * g;
    } else {
        require(theta_lazy != nullptr, "lazy MD needs the accumulated dual");
        *theta_lazy -= eta * g;
        theta = *theta_lazy;
    }
    Vec raw = bregman.gradF(theta);
    require(raw.allFinite(), "mirror map not invertible at this point");
    if (domain.kind() == ConvexDomain::Kind::AllSpace) return raw;
    // Bregman projection. For the Gaussian carrier this is Euclidean; for the
    // Poisson carrier (separable divergence) a box projection is a clip.
    switch (domain.kind()) {
        case ConvexDomain::Kind::Box:
        case ConvexDomain::Kind::Interval:
            return domain.project(raw);
        case ConvexDomain::Kind::Ball:
        case ConvexDomain::Kind::Simplex:
            return domain.project(raw);
        default:
            return raw;
    }
}

// ---------------------------------------------------------------------------
// Fig.-4 recursion: EW with Gaussian prior on quadratic surrogates, constant
// learning rate. Covariance is maintained both as precision and covariance;
// rank-one losses use a Sherman-Morrison update with a periodic full
// re-inversion to cap drift.
// ---------------------------------------------------------------------------

class QuadEWState {
   public:
    QuadEWState(Vec mean, Mat covariance, double eta, Flavor flavor)
        : gauss_(std::move(mean), std::move(covariance)),
          raw_mean_(gauss_.mean()),
          eta_(eta),
          flavor_(flavor) {
        require(eta > 0, "eta must be positive");
    }

    const Vec& mean() const { return gauss_.mean(); }
    const Vec& raw_mean() const { return raw_mean_; }
    const Mat& covariance() const { return gauss_.covariance(); }
    const Mat& precision() const { return gauss_.precision(); }
    double eta() const { return eta_; }
    Flavor flavor() const { return flavor_; }
    int round() const { return round_; }

    friend QuadEWState quad_ew_step(const QuadEWState& state,
                                    const QuadraticSurrogate& loss,
                                    const ConvexDomain& domain);

   private:
    GaussianState gauss_;  // projected mean + shared covariance
    Vec raw_mean_;
    double eta_;
    Flavor flavor_;
    int round_ = 1;
    int rounds_since_reinversion_ = 0;
};

namespace detail {

// Returns the updated covariance for precision + eta * M, preferring a
// rank-one downdate when M = c v v'.
inline Mat covariance_update(const Mat& cov, const Mat& prec_new,
                             const Mat& m, double eta, bool& used_rank_one) {
    used_rank_one = false;
    const int d = static_cast<int>(cov.rows());
    if (m.cwiseAbs().maxCoeff() == 0.0) return cov;
    Eigen::SelfAdjointEigenSolver<Mat> es(m);
    Vec evals = es.eigenvalues();
    // Rank-one iff a single nonzero eigenvalue.
    int nonzero = 0, idx = -1;
    for (int i = 0; i < d; ++i) {
        if (std::abs(evals[i]) > 1e-14 * std::abs(evals.cwiseAbs().maxCoeff())) {
            ++nonzero;
            idx = i;
        }
    }
    if (nonzero == 1 && evals[idx] > 0) {
        Vec v = es.eigenvectors().col(idx);
        double c = eta * evals[idx];
        Vec cv = cov * v;
        double denom = 1.0 + c * v.dot(cv);
        used_rank_one = true;
        return cov - (c / denom) * (cv * cv.transpose());
    }
    Eigen::LLT<Mat> llt(prec_new);
    require(llt.info() == Eigen::Success,
            "precision update made the matrix non-PD");
    Mat out = llt.solve(Mat::Identity(d, d));
    return 0.5 * (out + out.transpose());
}

}  // namespace detail

inline QuadEWState quad_ew_step(const QuadEWState& state,
                                const QuadraticSurrogate& loss,
                                const ConvexDomain& domain) {
    QuadEWState next = state;
    const double eta = state.eta_;
    Mat prec_new = state.precision() + eta * loss.curvature;
    bool rank_one = false;
    Mat cov_new = detail::covariance_update(state.covariance(), prec_new,
                                            loss.curvature, eta, rank_one);
    if (rank_one && ++next.rounds_since_reinversion_ >= 256) {
        Eigen::LLT<Mat> llt(prec_new);
        cov_new = llt.solve(Mat::Identity(prec_new.rows(), prec_new.cols()));
        cov_new = 0.5 * (cov_new + cov_new.transpose());
        next.rounds_since_reinversion_ = 0;
    }
    const Vec& base =
        state.flavor_ == Flavor::Greedy ? state.mean() : state.raw_mean_;
    Vec raw = base - eta * (cov_new * loss.gradient);
    Vec projected = domain.project_mahalanobis(raw, prec_new);
    next.gauss_ = GaussianState(projected, cov_new, prec_new);
    next.raw_mean_ = std::move(raw);
    next.round_ = state.round_ + 1;
    return next;
}

// ---------------------------------------------------------------------------
// Surrogate builders for the two quadratic-loss corollaries.
// ---------------------------------------------------------------------------

// Rank-one ONS curvature M = beta g g' with beta = min{1/(4GB), alpha} / 2.
inline QuadraticSurrogate ons_curvature(const Vec& g, double alpha, double G,
                                        double B, const Vec& anchor) {
    require(alpha > 0 && G > 0 && B > 0, "alpha, G, B must be positive");
    double beta = 0.5 * std::min(1.0 / (4.0 * G * B), alpha);
    return QuadraticSurrogate(g, beta * (g * g.transpose()), anchor);
}

inline double ons_beta(double alpha, double G, double B) {
    return 0.5 * std::min(1.0 / (4.0 * G * B), alpha);
}

// Effective GD rate induced by EW with fixed eta, prior variance sigma^2, and
// strongly convex curvature M_t = alpha I: eta_t = 1 / (1/(eta sigma^2) + alpha t).
inline double strongly_convex_rate(double eta_sigma2, double alpha, int t) {
    require(eta_sigma2 > 0 && alpha > 0 && t >= 1, "inputs must be positive");
    return 1.0 / (1.0 / eta_sigma2 + alpha * t);
}

}  // namespace ewkit
