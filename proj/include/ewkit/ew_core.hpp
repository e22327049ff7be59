#pragma once

#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "common.hpp"
#include "domain.hpp"
#include "expfam.hpp"
#include "losses.hpp"

namespace ewkit {

// ---------------------------------------------------------------------------
// Learning-rate schedules: eta_1 >= eta_2 >= ... >= eta_T > 0.
// A nonincreasing-schedule violation is a construction-time error.
// ---------------------------------------------------------------------------

class Schedule {
   public:
    static Schedule constant(double eta) {
        require(eta > 0, "learning rate must be positive");
        Schedule s;
        s.constant_ = eta;
        return s;
    }

    static Schedule sequence(std::vector<double> values) {
        require(!values.empty(), "empty schedule");
        for (std::size_t i = 0; i < values.size(); ++i) {
            require(values[i] > 0, "learning rates must be positive");
            require(i == 0 || values[i] <= values[i - 1],
                    "schedule must be nonincreasing");
        }
        Schedule s;
        s.values_ = std::move(values);
        return s;
    }

    bool is_constant() const { return values_.empty(); }

    double eta(int t) const {  // 1-based round index
        require(t >= 1, "round index must be >= 1");
        if (is_constant()) return constant_;
        require(t <= static_cast<int>(values_.size()), "schedule exhausted");
        return values_[t - 1];
    }

    double eta_first() const { return eta(1); }

    double eta_last(int T) const { return eta(T); }

   private:
    Schedule() = default;
    double constant_ = 0.0;
    std::vector<double> values_;
};

// ---------------------------------------------------------------------------
// Per-round accounting (Lemma-1 ledger).
// ---------------------------------------------------------------------------

struct LedgerRow {
    int t = 0;
    double learner_loss = 0.0;
    double mix_gap = 0.0;
    double cum_regret = 0.0;  // vs. the run's comparator
    double bound_value = 0.0;
};

struct RegretLedger {
    std::vector<LedgerRow> rows;

    void push(LedgerRow row) {
        require(row.t == static_cast<int>(rows.size()) + 1,
                "ledger rows must be contiguous from t = 1");
        rows.push_back(row);
    }
};

enum class Flavor { Lazy, Greedy };

// ---------------------------------------------------------------------------
// One EW learner: projected posterior P_t, unprojected tilt ~P_t, schedule,
// round counter. Values are immutable; ew_update returns a new state.
// ---------------------------------------------------------------------------

class LearnerState {
   public:
    LearnerState(ExpFamilyPosterior prior, Schedule schedule, Flavor flavor)
        : prior_(prior),
          raw_(prior),
          posterior_(std::move(prior)),
          schedule_(std::move(schedule)),
          flavor_(flavor) {
        if (const auto* g = std::get_if<GaussianState>(&prior_)) {
            lin_gradient_sum_ = Vec::Zero(g->dim());
        } else if (const auto* p = std::get_if<PoissonProductState>(&prior_)) {
            lin_gradient_sum_ = Vec::Zero(p->dim());
        } else if (const auto* d = std::get_if<DiscreteAtoms>(&prior_)) {
            lin_gradient_sum_ = Vec::Zero(d->dim());
        }
    }

    int round() const { return round_; }
    Flavor flavor() const { return flavor_; }
    const Schedule& schedule() const { return schedule_; }
    const ExpFamilyPosterior& prior() const { return prior_; }
    const ExpFamilyPosterior& posterior() const { return posterior_; }
    const ExpFamilyPosterior& raw_posterior() const { return raw_; }

    Vec posterior_mean() const { return posterior_mean_of(posterior_); }

    friend LearnerState ew_update(const LearnerState& state,
                                  const SurrogateLoss& loss,
                                  const ConvexDomain& domain);

   private:
    ExpFamilyPosterior prior_;
    ExpFamilyPosterior raw_;        // ~P_t, pre-projection
    ExpFamilyPosterior posterior_;  // P_t
    Schedule schedule_;
    Flavor flavor_;
    int round_ = 1;

    // Lazy EW is maintained via accumulated sufficient statistics rather
    // than storing past losses (exact for conjugate pairs).
    Vec lin_gradient_sum_;
    double beta_ones_sum_ = 0.0;
    int beta_rounds_ = 0;
    bool saw_quadratic_ = false;
};

inline Vec posterior_mean(const LearnerState& state) {
    return state.posterior_mean();
}

namespace detail {

// Exponential tilt of a Gaussian by exp(-eta * quadratic), carried out in
// natural parameters; exact for any anchor.
inline GaussianState tilt_gaussian(const GaussianState& g, const Vec& grad,
                                   const Mat& curv, const Vec& anchor,
                                   double eta) {
    Mat prec_new = g.precision() + eta * curv;
    Eigen::LLT<Mat> llt(prec_new);
    require(llt.info() == Eigen::Success,
            "precision update made the matrix non-PD");
    Vec theta_new = g.precision() * g.mean() + eta * (curv * anchor - grad);
    Vec mean_new = llt.solve(theta_new);
    Mat cov_new = llt.solve(Mat::Identity(g.dim(), g.dim()));
    cov_new = 0.5 * (cov_new + cov_new.transpose());
    return GaussianState(std::move(mean_new), std::move(cov_new),
                         std::move(prec_new));
}

inline Vec atom_losses(const DiscreteAtoms& d, const Vec& grad) {
    Vec out(d.size());
    for (int i = 0; i < d.size(); ++i) out[i] = d.atoms()[i].dot(grad);
    return out;
}

inline Vec normalize_log_weights(Vec logw) {
    double m = logw.maxCoeff();
    Vec w = (logw.array() - m).exp();
    return Vec(w / w.sum());
}

}  // namespace detail

// One EW round: tilt (greedy: from P_t; lazy: from the prior with accumulated
// losses), then project the mean onto the domain.
inline LearnerState ew_update(const LearnerState& state,
                              const SurrogateLoss& loss,
                              const ConvexDomain& domain) {
    LearnerState next = state;
    const double eta = state.schedule_.eta(state.round_);
    const bool lazy = state.flavor_ == Flavor::Lazy;

    if (const auto* g = std::get_if<GaussianState>(&state.posterior_)) {
        Vec grad;
        Mat curv;
        Vec anchor;
        if (const auto* lin = std::get_if<LinearSurrogate>(&loss)) {
            grad = lin->gradient;
            curv = Mat::Zero(g->dim(), g->dim());
            anchor = Vec::Zero(g->dim());
        } else if (const auto* q = std::get_if<QuadraticSurrogate>(&loss)) {
            require(state.schedule_.is_constant(),
                    "quadratic surrogates require a constant learning rate");
            grad = q->gradient;
            curv = q->curvature;
            anchor = q->anchor;
            next.saw_quadratic_ = true;
        } else {
            throw error("incompatible loss/family pair: Gaussian expects "
                        "linear or quadratic surrogates");
        }
        require(grad.size() == g->dim(), "gradient dimension mismatch");

        GaussianState raw_new = [&] {
            if (!lazy) return detail::tilt_gaussian(*g, grad, curv, anchor, eta);
            if (!next.saw_quadratic_ && !state.saw_quadratic_) {
                // Pure-linear lazy run: re-tilt the prior at the current eta.
                next.lin_gradient_sum_ = state.lin_gradient_sum_ + grad;
                const auto& prior = std::get<GaussianState>(state.prior_);
                return detail::tilt_gaussian(prior, next.lin_gradient_sum_,
                                             curv, anchor, eta);
            }
            // Constant-eta quadratic recursion continues from ~P_t.
            const auto& raw = std::get<GaussianState>(state.raw_);
            return detail::tilt_gaussian(raw, grad, curv, anchor, eta);
        }();
        next.posterior_ = project_mean(raw_new, domain);
        next.raw_ = std::move(raw_new);
    } else if (const auto* p =
                   std::get_if<PoissonProductState>(&state.posterior_)) {
        const auto* lin = std::get_if<LinearSurrogate>(&loss);
        require(lin != nullptr,
                "incompatible loss/family pair: Poisson expects linear losses");
        require(lin->gradient.size() == p->dim(), "gradient dimension mismatch");
        Vec theta_new;
        if (lazy) {
            next.lin_gradient_sum_ = state.lin_gradient_sum_ + lin->gradient;
            theta_new = std::get<PoissonProductState>(state.prior_).natural() -
                        eta * next.lin_gradient_sum_;
        } else {
            theta_new = p->natural() - eta * lin->gradient;
        }
        auto raw_new = PoissonProductState::from_natural(theta_new);
        next.posterior_ = project_mean(raw_new, domain);
        next.raw_ = std::move(raw_new);
    } else if (const auto* d = std::get_if<DiscreteAtoms>(&state.posterior_)) {
        const auto* lin = std::get_if<LinearSurrogate>(&loss);
        require(lin != nullptr,
                "incompatible loss/family pair: discrete atoms expect linear losses");
        Vec logw;
        if (lazy) {
            next.lin_gradient_sum_ = state.lin_gradient_sum_ + lin->gradient;
            const auto& prior = std::get<DiscreteAtoms>(state.prior_);
            logw = prior.weights().array().log().matrix() -
                   eta * detail::atom_losses(prior, next.lin_gradient_sum_);
        } else {
            logw = d->weights().array().log().matrix() -
                   eta * detail::atom_losses(*d, lin->gradient);
        }
        auto raw_new = d->with_weights(detail::normalize_log_weights(logw));
        next.posterior_ = project_mean(raw_new, domain);
        next.raw_ = std::move(raw_new);
    } else if (const auto* b = std::get_if<BetaState>(&state.posterior_)) {
        const auto* ll = std::get_if<LogLossSurrogate>(&loss);
        require(ll != nullptr,
                "incompatible loss/family pair: Beta expects log loss");
        BetaState raw_new = [&] {
            if (lazy) {
                next.beta_ones_sum_ = state.beta_ones_sum_ + ll->outcome;
                next.beta_rounds_ = state.beta_rounds_ + 1;
                const auto& prior = std::get<BetaState>(state.prior_);
                return BetaState(
                    prior.shape_a() + eta * next.beta_ones_sum_,
                    prior.shape_b() +
                        eta * (next.beta_rounds_ - next.beta_ones_sum_),
                    prior.support());
            }
            return BetaState(b->shape_a() + eta * ll->outcome,
                             b->shape_b() + eta * (1 - ll->outcome),
                             b->support());
        }();
        next.posterior_ = project_mean(raw_new, domain);
        next.raw_ = std::move(raw_new);
    }

    next.round_ = state.round_ + 1;
    return next;
}

// ---------------------------------------------------------------------------
// Mixability gap: f_t(w_t) + (1/eta) ln E_{P_t}[exp(-eta f_t(w))].
// ---------------------------------------------------------------------------

namespace detail {

inline double loss_value(const SurrogateLoss& loss, const Vec& w) {
    if (const auto* lin = std::get_if<LinearSurrogate>(&loss))
        return lin->gradient.dot(w);
    if (const auto* q = std::get_if<QuadraticSurrogate>(&loss))
        return q->value(w);
    return std::get<LogLossSurrogate>(loss).value(w[0]);
}

// ln E_{N(mu,Sigma)}[exp(-eta (g'(w-a) + (w-a)'M(w-a)/2))], closed form.
inline double gaussian_log_mgf(const GaussianState& g, const Vec& grad,
                               const Mat& curv, const Vec& anchor,
                               double eta) {
    Mat a_mat = g.precision() + eta * curv;
    Eigen::LLT<Mat> llt(a_mat);
    require(llt.info() == Eigen::Success, "tilted precision not PD");
    Vec b = g.precision() * g.mean() + eta * (curv * anchor - grad);
    auto half_logdet = [](const Eigen::LLT<Mat>& f) {
        return f.matrixL().toDenseMatrix().diagonal().array().log().sum();
    };
    Eigen::LLT<Mat> llt_prec(g.precision());
    double out = 0.5 * b.dot(llt.solve(b)) - half_logdet(llt) +
                 half_logdet(llt_prec) -
                 0.5 * g.mean().dot(g.precision() * g.mean()) -
                 0.5 * eta * anchor.dot(curv * anchor) +
                 eta * grad.dot(anchor);
    return out;
}

// Trapezoid-rule quadrature over +-10 sigma, d <= 2, for pairs without a
// closed form.
inline double gaussian_quadrature_gap(const GaussianState& g,
                                      const SurrogateLoss& loss, double eta) {
    const int d = g.dim();
    require(d <= 2, "quadrature fallback only supported for d <= 2");
    const int n = d == 1 ? 20001 : 601;
    double f_mean = loss_value(loss, g.mean());
    auto integrate = [&](auto&& fn) {
        // Trapezoid over a regular grid in whitened coordinates.
        Eigen::LLT<Mat> llt(g.covariance());
        Mat l = llt.matrixL();
        double total = 0.0;
        if (d == 1) {
            double h = 20.0 / (n - 1);
            for (int i = 0; i < n; ++i) {
                double z = -10.0 + h * i;
                double wgt = (i == 0 || i == n - 1) ? 0.5 : 1.0;
                Vec w = g.mean() + l * Vec::Constant(1, z);
                total += wgt * fn(w) * std::exp(-0.5 * z * z) * h;
            }
            return total / std::sqrt(2.0 * M_PI);
        }
        double h = 20.0 / (n - 1);
        for (int i = 0; i < n; ++i) {
            double zi = -10.0 + h * i;
            double wi = (i == 0 || i == n - 1) ? 0.5 : 1.0;
            for (int j = 0; j < n; ++j) {
                double zj = -10.0 + h * j;
                double wj = (j == 0 || j == n - 1) ? 0.5 : 1.0;
                Vec z(2);
                z << zi, zj;
                Vec w = g.mean() + l * z;
                total += wi * wj * fn(w) *
                         std::exp(-0.5 * z.squaredNorm()) * h * h;
            }
        }
        return total / (2.0 * M_PI);
    };
    // Center at f(w_t) for numerical range, then undo the shift.
    double mgf = integrate([&](const Vec& w) {
        return std::exp(-eta * (loss_value(loss, w) - f_mean));
    });
    return (1.0 / eta) * std::log(mgf);
}

}  // namespace detail

inline double mixability_gap(const LearnerState& state,
                             const SurrogateLoss& loss, double eta) {
    require(eta > 0, "eta must be positive");
    const auto& post = state.posterior();

    if (const auto* g = std::get_if<GaussianState>(&post)) {
        if (const auto* lin = std::get_if<LinearSurrogate>(&loss)) {
            // f(w_t) + (1/eta) ln E[e^{-eta g.w}] = eta g' Sigma g / 2.
            return 0.5 * eta * lin->gradient.dot(g->covariance() * lin->gradient);
        }
        if (const auto* q = std::get_if<QuadraticSurrogate>(&loss)) {
            double f_mean = q->value(g->mean());
            return f_mean + (1.0 / eta) * detail::gaussian_log_mgf(
                                              *g, q->gradient, q->curvature,
                                              q->anchor, eta);
        }
        return detail::gaussian_quadrature_gap(*g, loss, eta);
    }
    if (const auto* d = std::get_if<DiscreteAtoms>(&post)) {
        double f_mean = detail::loss_value(loss, d->mean());
        Vec exponents(d->size());
        for (int i = 0; i < d->size(); ++i)
            exponents[i] = -eta * detail::loss_value(loss, d->atoms()[i]) +
                           std::log(d->weights()[i]);
        double m = exponents.maxCoeff();
        double lse = m + std::log((exponents.array() - m).exp().sum());
        return f_mean + lse / eta;
    }
    if (const auto* b = std::get_if<BetaState>(&post)) {
        const auto* ll = std::get_if<LogLossSurrogate>(&loss);
        require(ll != nullptr && b->support() == BetaState::Support::Unit,
                "Beta mixability gap needs log loss on [0,1]");
        double a = b->shape_a(), bb = b->shape_b();
        double x = ll->outcome;
        double mu = a / (a + bb);
        double f_mean = x == 1.0 ? -std::log(mu) : -std::log(1.0 - mu);
        // ln E[w^{eta x} (1-w)^{eta(1-x)}] = ln B(a + eta x, b + eta(1-x)) - ln B(a, b).
        double log_mgf = std::lgamma(a + eta * x) +
                         std::lgamma(bb + eta * (1.0 - x)) -
                         std::lgamma(a + bb + eta) - std::lgamma(a) -
                         std::lgamma(bb) + std::lgamma(a + bb);
        return f_mean + log_mgf / eta;
    }
    throw error("mixability gap: unsupported loss/family pair");
}

// ---------------------------------------------------------------------------
// Lemma-1 bound evaluator.
//   lazy:   kl_prior / eta_T + sum(gaps)
//   greedy: kl_prior / eta_1 + (1/eta_T - 1/eta_1) kl_max + sum(gaps)
// ---------------------------------------------------------------------------

inline double lemma1_bound(double kl_prior, const std::vector<double>& gaps,
                           const Schedule& schedule,
                           double kl_max_intermediate, Flavor flavor) {
    const int T = static_cast<int>(gaps.size());
    double gap_sum = 0.0;
    for (double g : gaps) gap_sum += g;
    double eta_T = T >= 1 ? schedule.eta(T) : schedule.eta_first();
    if (flavor == Flavor::Lazy) return kl_prior / eta_T + gap_sum;
    double eta_1 = schedule.eta_first();
    return kl_prior / eta_1 +
           (1.0 / eta_T - 1.0 / eta_1) * kl_max_intermediate + gap_sum;
}

}  // namespace ewkit
