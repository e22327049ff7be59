#pragma once

#include <cmath>
#include <utility>

#include "common.hpp"
#include "domain.hpp"
#include "rng.hpp"

namespace ewkit {

// ---------------------------------------------------------------------------
// John's exploration on the two analytic domains:
//   ball radius D:   H = D^2 I, R = uniform on the boundary sphere
//   box  [-c, c]^d:  H = d c^2 I, R = uniform on the 2^d vertices
// Both satisfy E_R[w w'] = H / d.
// ---------------------------------------------------------------------------

class ExplorationSpec {
   public:
    enum class Kind { SphereUniform, VertexUniform };

    static ExplorationSpec for_domain(const ConvexDomain& domain, int dim) {
        ExplorationSpec e;
        e.dim_ = dim;
        switch (domain.kind()) {
            case ConvexDomain::Kind::Ball:
                e.kind_ = Kind::SphereUniform;
                e.scale_ = domain.radius();
                e.h_ = e.scale_ * e.scale_ * Mat::Identity(dim, dim);
                break;
            case ConvexDomain::Kind::Box: {
                double c = domain.hi()[0];
                require((domain.hi().array() == c).all() &&
                            (domain.lo().array() == -c).all(),
                        "box exploration requires a centered cube");
                e.kind_ = Kind::VertexUniform;
                e.scale_ = c;
                e.h_ = dim * c * c * Mat::Identity(dim, dim);
                break;
            }
            default:
                throw error("John's exploration supports ball and centered box only");
        }
        return e;
    }

    Kind kind() const { return kind_; }
    const Mat& john_matrix() const { return h_; }
    Mat second_moment() const { return h_ / dim_; }

    Vec sample(CounterRng& rng) const {
        if (kind_ == Kind::SphereUniform) return rng.sphere(dim_, scale_);
        Vec v(dim_);
        std::uint64_t bits = rng.next_u64();
        for (int i = 0; i < dim_; ++i)
            v[i] = (bits >> i) & 1 ? scale_ : -scale_;
        return v;
    }

   private:
    Kind kind_ = Kind::SphereUniform;
    int dim_ = 0;
    double scale_ = 1.0;
    Mat h_;
};

// ---------------------------------------------------------------------------
// Log-linear posterior dP(w) proportional to exp(<w, theta>) on the domain,
// sampled by hit-and-run with a warm-started chain.
// ---------------------------------------------------------------------------

class BanditPosterior {
   public:
    BanditPosterior(ConvexDomain domain, int dim)
        : domain_(std::move(domain)),
          theta_(Vec::Zero(dim)),
          point_(Vec::Zero(dim)) {
        require(domain_.kind() == ConvexDomain::Kind::Ball ||
                    domain_.kind() == ConvexDomain::Kind::Box,
                "bandit posterior supports ball and box domains");
    }

    const Vec& natural() const { return theta_; }
    const ConvexDomain& domain() const { return domain_; }
    int dim() const { return static_cast<int>(theta_.size()); }

    // theta accumulates -eta * sum of loss estimates. A shift of more than
    // 10% in norm triggers a fresh burn-in of 200 d steps.
    void shift_natural(const Vec& delta, CounterRng& rng) {
        double before = theta_.norm();
        theta_ += delta;
        if (delta.norm() > 0.1 * std::max(before, 1e-12))
            burn_in(200 * dim(), rng);
    }

    // One emitted sample = 50 d hit-and-run steps from the warm chain.
    Vec sample(CounterRng& rng) {
        for (int s = 0; s < 50 * dim(); ++s) step(rng);
        return point_;
    }

    void burn_in(int steps, CounterRng& rng) {
        for (int s = 0; s < steps; ++s) step(rng);
    }

    // Componentwise mean drift between chain halves, in standard errors.
    // Exceeding 3 flags non-convergence.
    double convergence_diagnostic(int n_samples, CounterRng& rng) {
        const int d = dim();
        Mat first(n_samples / 2, d), second(n_samples - n_samples / 2, d);
        for (int i = 0; i < first.rows(); ++i) first.row(i) = sample(rng);
        for (int i = 0; i < second.rows(); ++i) second.row(i) = sample(rng);
        double worst = 0.0;
        for (int j = 0; j < d; ++j) {
            double m1 = first.col(j).mean(), m2 = second.col(j).mean();
            double v1 = (first.col(j).array() - m1).square().sum() /
                        (first.rows() - 1);
            double v2 = (second.col(j).array() - m2).square().sum() /
                        (second.rows() - 1);
            double se = std::sqrt(v1 / first.rows() + v2 / second.rows());
            worst = std::max(worst, std::abs(m1 - m2) / std::max(se, 1e-300));
        }
        return worst;
    }

   private:
    void step(CounterRng& rng) {
        Vec u = rng.sphere(dim());
        auto [lo, hi] = chord(point_, u);
        double kappa = theta_.dot(u);
        double span = hi - lo;
        double s;
        if (std::abs(kappa * span) < 1e-9) {
            s = lo + span * rng.uniform();
        } else {
            // Inverse CDF of density proportional to exp(kappa s) on [lo, hi].
            double v = rng.uniform();
            double a = kappa * span;
            double t;  // position in [0, 1] along the chord
            if (a > 0) {
                // ln((1-v) + v e^a) computed as a + ln(v + (1-v) e^{-a}).
                t = 1.0 + std::log(v + (1.0 - v) * std::exp(-a)) / a;
            } else {
                t = std::log1p(v * std::expm1(a)) / a;
            }
            s = lo + span * std::min(std::max(t, 0.0), 1.0);
        }
        point_ += s * u;
        // Guard against accumulated rounding drifting off the body.
        if (!domain_.contains(point_, 1e-9)) point_ = domain_.project(point_);
    }

    // Intersection of the line {p + s u} with the domain.
    std::pair<double, double> chord(const Vec& p, const Vec& u) const {
        if (domain_.kind() == ConvexDomain::Kind::Ball) {
            double r = domain_.radius();
            double b = p.dot(u);
            double c = p.squaredNorm() - r * r;
            double disc = std::max(b * b - c, 0.0);
            double sq = std::sqrt(disc);
            return {-b - sq, -b + sq};
        }
        double lo = -kInf, hi = kInf;
        for (int i = 0; i < p.size(); ++i) {
            if (std::abs(u[i]) < 1e-300) continue;
            double a = (domain_.lo()[i] - p[i]) / u[i];
            double b = (domain_.hi()[i] - p[i]) / u[i];
            lo = std::max(lo, std::min(a, b));
            hi = std::min(hi, std::max(a, b));
        }
        if (!(lo <= hi)) return {0.0, 0.0};
        return {lo, hi};
    }

    ConvexDomain domain_;
    Vec theta_;
    Vec point_;
};

// Mixture draw: with probability gamma a contact/sphere point, else a
// posterior sample.
inline Vec sample_action(BanditPosterior& posterior,
                         const ExplorationSpec& exploration, double gamma,
                         CounterRng& rng) {
    require(gamma > 0 && gamma < 1, "gamma must lie in (0,1)");
    if (rng.uniform() < gamma) return exploration.sample(rng);
    return posterior.sample(rng);
}

// ---------------------------------------------------------------------------
// Second moment of the mixture Q = (1-gamma) P + gamma R.
// ---------------------------------------------------------------------------

// Monte-Carlo estimate of E_P[w w'] plus the exact exploration part. Raises
// if the result falls below half the guaranteed floor (gamma/d) lambda_min(H),
// which signals gamma-undersupply rather than sampling noise.
inline Mat second_moment(BanditPosterior& posterior,
                         const ExplorationSpec& exploration, double gamma,
                         int n_samples, CounterRng& rng) {
    require(n_samples >= 1000, "need at least 10^3 samples");
    const int d = posterior.dim();
    Mat s_post = Mat::Zero(d, d);
    for (int i = 0; i < n_samples; ++i) {
        Vec w = posterior.sample(rng);
        s_post += w * w.transpose();
    }
    s_post /= n_samples;
    Mat s = (1.0 - gamma) * s_post + gamma * exploration.second_moment();
    s = 0.5 * (s + s.transpose());
    Eigen::SelfAdjointEigenSolver<Mat> es(s);
    double floor = 0.5 * (gamma / d) *
                   Eigen::SelfAdjointEigenSolver<Mat>(exploration.john_matrix())
                       .eigenvalues()
                       .minCoeff();
    if (es.eigenvalues().minCoeff() < floor)
        throw numeric_error("second-moment estimate below the gamma/d floor "
                            "(under-sampling)");
    // Ridge floor absorbs statistical noise only.
    Vec evals = es.eigenvalues().cwiseMax(1e-10);
    return es.eigenvectors() * evals.asDiagonal() *
           es.eigenvectors().transpose();
}

// Exact second moment (and mean) of the log-linear density on a ball, by 1-d
// quadrature along the theta axis; conditional cross-sections are uniform
// balls. Used for the exact-S estimator regime and as a test oracle.
struct BallMoments {
    Vec mean;
    Mat second_moment;
};

inline BallMoments ball_log_linear_moments(const Vec& theta, double radius,
                                           int n_points = 4001) {
    const int d = static_cast<int>(theta.size());
    double kappa = theta.norm();
    if (kappa < 1e-14) {
        return {Vec::Zero(d),
                Mat(radius * radius / (d + 2.0) * Mat::Identity(d, d))};
    }
    Vec u = theta / kappa;
    // Weight along s: exp(kappa (s - D)) (D^2 - s^2)^{(d-1)/2}, trapezoid.
    double z = 0.0, m1 = 0.0, m2 = 0.0;
    double h = 2.0 * radius / (n_points - 1);
    for (int i = 0; i < n_points; ++i) {
        double s = -radius + h * i;
        double cross = std::pow(std::max(radius * radius - s * s, 0.0),
                                0.5 * (d - 1));
        double w = std::exp(kappa * (s - radius)) * cross;
        if (i == 0 || i == n_points - 1) w *= 0.5;
        z += w;
        m1 += w * s;
        m2 += w * s * s;
    }
    m1 /= z;
    m2 /= z;
    double perp = (radius * radius - m2) / (d + 1.0);
    Mat uu = u * u.transpose();
    BallMoments out;
    out.mean = m1 * u;
    out.second_moment = m2 * uu + perp * (Mat::Identity(d, d) - uu);
    return out;
}

inline Mat mixture_second_moment_exact(const BanditPosterior& posterior,
                                       const ExplorationSpec& exploration,
                                       double gamma) {
    require(posterior.domain().kind() == ConvexDomain::Kind::Ball,
            "exact mixture moment only available for ball domains");
    BallMoments bm = ball_log_linear_moments(posterior.natural(),
                                             posterior.domain().radius());
    Mat s = (1.0 - gamma) * bm.second_moment +
            gamma * exploration.second_moment();
    return 0.5 * (s + s.transpose());
}

// ---------------------------------------------------------------------------
// Unbiased loss-vector estimate g~ = observed * S^{-1} w_t.
// ---------------------------------------------------------------------------

inline Vec estimate_loss_vector(const Vec& w_t, double observed,
                                const Mat& s) {
    require(std::abs(observed) <= 1.0 + 1e-12,
            "observed loss must be bounded by 1");
    Eigen::LLT<Mat> llt(s);
    require(llt.info() == Eigen::Success, "second-moment matrix singular");
    return observed * llt.solve(w_t);
}

// ---------------------------------------------------------------------------
// Tuned parameters: eta = sqrt(nu ln T / (3 d T)) with nu = d by default,
// gamma = eta d (capped at 1/2; error if >= 1 before the cap).
// ---------------------------------------------------------------------------

struct BanditTuning {
    double eta;
    double gamma;
};

inline BanditTuning tuned_parameters(int d, int T, double nu = -1.0) {
    require(T >= 2, "need T >= 2");
    if (nu <= 0) nu = d;
    double eta = std::sqrt(nu * std::log(double(T)) / (3.0 * d * T));
    double gamma = eta * d;
    if (gamma >= 1.0)
        throw config_error("tuned gamma >= 1; horizon T too small");
    return {eta, std::min(gamma, 0.5)};
}

}  // namespace ewkit
