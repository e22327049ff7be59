#pragma once

#include <functional>
#include <utility>
#include <variant>
#include <vector>

#include "common.hpp"
#include "domain.hpp"

namespace ewkit {

// ---------------------------------------------------------------------------
// Posterior states for the four supported families.
// ---------------------------------------------------------------------------

class GaussianState {
   public:
    GaussianState(Vec mean, Mat covariance)
        : mean_(std::move(mean)), cov_(std::move(covariance)) {
        validate_cov();
        precision_ = invert(cov_);
    }

    GaussianState(Vec mean, Mat covariance, Mat precision)
        : mean_(std::move(mean)),
          cov_(std::move(covariance)),
          precision_(std::move(precision)) {
        validate_cov();
        double err = (precision_ * cov_ - Mat::Identity(dim(), dim()))
                         .cwiseAbs()
                         .maxCoeff();
        require(err < 1e-9, "precision * covariance != identity");
    }

    static GaussianState isotropic(Vec mean, double sigma2) {
        const int d = static_cast<int>(mean.size());
        return GaussianState(std::move(mean), sigma2 * Mat::Identity(d, d),
                             (1.0 / sigma2) * Mat::Identity(d, d));
    }

    int dim() const { return static_cast<int>(mean_.size()); }
    const Vec& mean() const { return mean_; }
    const Mat& covariance() const { return cov_; }
    const Mat& precision() const { return precision_; }

    GaussianState with_mean(Vec m) const {
        GaussianState out(*this);
        out.mean_ = std::move(m);
        return out;
    }

   private:
    static Mat invert(const Mat& cov) {
        Eigen::SelfAdjointEigenSolver<Mat> es(cov);
        double lmin = es.eigenvalues().minCoeff();
        double lmax = es.eigenvalues().maxCoeff();
        require(lmin > 0, "covariance not positive definite");
        // Degenerate covariances are rejected, never regularized.
        require(lmax / lmin <= 1e12, "covariance condition number exceeds 1e12");
        return es.eigenvectors() *
               es.eigenvalues().cwiseInverse().asDiagonal() *
               es.eigenvectors().transpose();
    }

    void validate_cov() const {
        require(mean_.size() >= 1, "dimension must be >= 1");
        require(cov_.rows() == cov_.cols() && cov_.rows() == mean_.size(),
                "covariance shape mismatch");
        require((cov_ - cov_.transpose()).cwiseAbs().maxCoeff() < 1e-12,
                "covariance not symmetric");
    }

    Vec mean_;
    Mat cov_;
    Mat precision_;
};

// Product of independent Poissons; natural parameter theta_i = ln(rate_i).
class PoissonProductState {
   public:
    explicit PoissonProductState(Vec rates) : rates_(std::move(rates)) {
        require((rates_.array() > 0).all(), "Poisson rates must be positive");
    }

    int dim() const { return static_cast<int>(rates_.size()); }
    const Vec& rates() const { return rates_; }
    Vec mean() const { return rates_; }
    Vec natural() const { return rates_.array().log(); }

    static PoissonProductState from_natural(const Vec& theta) {
        return PoissonProductState(theta.array().exp());
    }

   private:
    Vec rates_;
};

// Beta(a, b) on [0, 1], or mapped to eta in [-1, 1] via (1 + eta)/2.
class BetaState {
   public:
    enum class Support { Unit, Symmetric };

    BetaState(double a, double b, Support support = Support::Unit)
        : a_(a), b_(b), support_(support) {
        require(a > 0 && b > 0, "Beta shapes must be positive");
    }

    double shape_a() const { return a_; }
    double shape_b() const { return b_; }
    Support support() const { return support_; }

    double mean() const {
        double m = a_ / (a_ + b_);
        return support_ == Support::Unit ? m : 2.0 * m - 1.0;
    }

   private:
    double a_, b_;
    Support support_;
};

// Finitely supported distribution on points in R^d.
class DiscreteAtoms {
   public:
    DiscreteAtoms(std::vector<Vec> atoms, Vec weights)
        : atoms_(std::move(atoms)), weights_(std::move(weights)) {
        require(!atoms_.empty(), "need at least one atom");
        require(static_cast<int>(atoms_.size()) == weights_.size(),
                "atom/weight count mismatch");
        require((weights_.array() >= 0).all(), "weights must be nonnegative");
        double s = weights_.sum();
        require(s > 0, "weights must not all be zero");
        require((weights_ / s - weights_).cwiseAbs().maxCoeff() < 1e-12,
                "weights must be normalized");
    }

    int dim() const { return static_cast<int>(atoms_[0].size()); }
    int size() const { return static_cast<int>(atoms_.size()); }
    const std::vector<Vec>& atoms() const { return atoms_; }
    const Vec& weights() const { return weights_; }

    Vec mean() const {
        Vec m = Vec::Zero(dim());
        for (int i = 0; i < size(); ++i) m += weights_[i] * atoms_[i];
        return m;
    }

    DiscreteAtoms with_weights(Vec w) const {
        Vec wn = w / w.sum();
        return DiscreteAtoms(atoms_, wn);
    }

    // Uniform prior on {M e_1, ..., M e_d, -M e_1, ..., -M e_d}.
    static DiscreteAtoms signed_basis(int d, double scale = 1.0) {
        std::vector<Vec> atoms;
        atoms.reserve(2 * d);
        for (int i = 0; i < d; ++i) atoms.push_back(scale * Vec::Unit(d, i));
        for (int i = 0; i < d; ++i) atoms.push_back(-scale * Vec::Unit(d, i));
        return DiscreteAtoms(std::move(atoms),
                             Vec::Constant(2 * d, 1.0 / (2.0 * d)));
    }

   private:
    std::vector<Vec> atoms_;
    Vec weights_;
};

using ExpFamilyPosterior =
    std::variant<GaussianState, PoissonProductState, BetaState, DiscreteAtoms>;

// ---------------------------------------------------------------------------
// Cumulant / conjugate pair for the two constructive carriers.
// ---------------------------------------------------------------------------

struct BregmanPair {
    std::function<double(const Vec&)> F;        // cumulant, of natural theta
    std::function<double(const Vec&)> Fstar;    // conjugate, of mean mu
    std::function<Vec(const Vec&)> gradF;       // theta -> mu
    std::function<Vec(const Vec&)> gradFstar;   // mu -> theta

    double bregman_mean(const Vec& x, const Vec& y) const {
        return Fstar(x) - Fstar(y) - gradFstar(y).dot(x - y);
    }

    double bregman_natural(const Vec& x, const Vec& y) const {
        return F(x) - F(y) - gradF(y).dot(x - y);
    }

    // F(theta) = sigma2/2 ||theta||^2, F*(w) = ||w||^2 / (2 sigma2).
    static BregmanPair gaussian(double sigma2) {
        BregmanPair p;
        p.F = [sigma2](const Vec& th) { return 0.5 * sigma2 * th.squaredNorm(); };
        p.Fstar = [sigma2](const Vec& w) { return w.squaredNorm() / (2.0 * sigma2); };
        p.gradF = [sigma2](const Vec& th) { return Vec(sigma2 * th); };
        p.gradFstar = [sigma2](const Vec& w) { return Vec(w / sigma2); };
        return p;
    }

    // F(theta) = sum exp(theta_i), F*(w) = sum w_i (ln w_i - 1).
    static BregmanPair poisson() {
        BregmanPair p;
        p.F = [](const Vec& th) { return th.array().exp().sum(); };
        p.Fstar = [](const Vec& w) {
            return (w.array() * (w.array().log() - 1.0)).sum();
        };
        p.gradF = [](const Vec& th) { return Vec(th.array().exp()); };
        p.gradFstar = [](const Vec& w) { return Vec(w.array().log()); };
        return p;
    }
};

// ---------------------------------------------------------------------------
// Divergences.
// ---------------------------------------------------------------------------

inline double kl_gaussian(const GaussianState& q, const GaussianState& p) {
    require(q.dim() == p.dim(), "kl_gaussian: dimension mismatch");
    const int d = q.dim();
    Mat a = p.precision() * q.covariance();
    Vec diff = q.mean() - p.mean();
    double logdet_ratio =
        -p.covariance().llt().matrixL().toDenseMatrix().diagonal().array().log().sum() * 2.0 +
        q.covariance().llt().matrixL().toDenseMatrix().diagonal().array().log().sum() * 2.0;
    // logdet_ratio = ln det(Sigma_q) - ln det(Sigma_p)
    return 0.5 * (-logdet_ratio + a.trace() + diff.dot(p.precision() * diff) - d);
}

// Bernoulli KL; infinite divergence reported as +infinity, never thrown,
// so ledgers can record it.
inline double kl_bernoulli(double x, double y) {
    require(x >= 0.0 && x <= 1.0, "kl_bernoulli: x outside [0,1]");
    require(y >= 0.0 && y <= 1.0, "kl_bernoulli: y outside [0,1]");
    if (y == 0.0) return x == 0.0 ? 0.0 : kInf;
    if (y == 1.0) return x == 1.0 ? 0.0 : kInf;
    double out = 0.0;
    if (x > 0.0) out += x * std::log(x / y);
    if (x < 1.0) out += (1.0 - x) * std::log((1.0 - x) / (1.0 - y));
    return out;
}

inline double unnormalized_relative_entropy(const Vec& w, const Vec& u) {
    require(w.size() == u.size(), "dimension mismatch");
    require((w.array() > 0).all() && (u.array() > 0).all(),
            "entries must be positive");
    return (w.array() * (w.array() / u.array()).log() - w.array() + u.array())
        .sum();
}

inline double kl_poisson_product(const PoissonProductState& q,
                                 const PoissonProductState& p) {
    return unnormalized_relative_entropy(q.rates(), p.rates());
}

inline double kl_discrete(const DiscreteAtoms& q, const DiscreteAtoms& p) {
    require(q.size() == p.size(), "kl_discrete: support mismatch");
    double out = 0.0;
    for (int i = 0; i < q.size(); ++i) {
        double qi = q.weights()[i], pi = p.weights()[i];
        if (qi == 0.0) continue;
        if (pi == 0.0) return kInf;
        out += qi * std::log(qi / pi);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Mean-constrained projection: the same-family member whose mean is the
// Bregman/Mahalanobis projection of the input mean onto the domain.
// ---------------------------------------------------------------------------

inline GaussianState project_mean(const GaussianState& s,
                                  const ConvexDomain& domain) {
    // Covariance is unchanged by the projection.
    if (domain.kind() == ConvexDomain::Kind::Simplex) {
        // Only supported for isotropic covariance, where the Mahalanobis
        // metric reduces to Euclidean.
        Mat diag_dev = s.covariance() -
                       s.covariance()(0, 0) * Mat::Identity(s.dim(), s.dim());
        require(diag_dev.cwiseAbs().maxCoeff() < 1e-12,
                "simplex projection requires isotropic covariance");
        return s.with_mean(domain.project(s.mean()));
    }
    return s.with_mean(domain.project_mahalanobis(s.mean(), s.precision()));
}

inline PoissonProductState project_mean(const PoissonProductState& s,
                                        const ConvexDomain& domain) {
    switch (domain.kind()) {
        case ConvexDomain::Kind::AllSpace:
            return s;
        case ConvexDomain::Kind::Box:
        case ConvexDomain::Kind::Interval: {
            // The unnormalized-relative-entropy Bregman projection onto a box
            // is separable, hence coordinatewise clipping (to the positive
            // part of the box).
            Vec lo = domain.lo().cwiseMax(1e-300);
            require((domain.hi().array() > 0).all(),
                    "Poisson projection: box must intersect the positive orthant");
            Vec m = s.rates().cwiseMax(lo).cwiseMin(domain.hi());
            return PoissonProductState(m);
        }
        default:
            throw error("unsupported domain for Poisson mean projection");
    }
}

inline BetaState project_mean(const BetaState& s, const ConvexDomain& domain) {
    require(domain.kind() == ConvexDomain::Kind::Interval ||
                domain.kind() == ConvexDomain::Kind::AllSpace,
            "unsupported domain for Beta mean projection");
    if (domain.kind() == ConvexDomain::Kind::AllSpace) return s;
    double m = s.mean();
    double clipped = std::clamp(m, domain.lo()[0], domain.hi()[0]);
    if (clipped == m) return s;
    // Mean-clipping: keep the total count a+b, move mass to hit the target
    // mean exactly (exact for the one-sided constraint E[eta] >= 0).
    double total = s.shape_a() + s.shape_b();
    double p = s.support() == BetaState::Support::Unit ? clipped
                                                       : 0.5 * (1.0 + clipped);
    p = std::clamp(p, 1e-12, 1.0 - 1e-12);
    return BetaState(p * total, (1.0 - p) * total, s.support());
}

inline DiscreteAtoms project_mean(const DiscreteAtoms& s,
                                  const ConvexDomain& domain) {
    require(domain.kind() == ConvexDomain::Kind::AllSpace ||
                domain.contains(s.mean()),
            "unsupported family/domain pair: discrete atoms with binding constraint");
    return s;
}

inline ExpFamilyPosterior project_mean(const ExpFamilyPosterior& s,
                                       const ConvexDomain& domain) {
    return std::visit(
        [&](const auto& st) -> ExpFamilyPosterior {
            return project_mean(st, domain);
        },
        s);
}

inline Vec posterior_mean_of(const ExpFamilyPosterior& s) {
    return std::visit(
        [](const auto& st) -> Vec {
            using T = std::decay_t<decltype(st)>;
            if constexpr (std::is_same_v<T, BetaState>) {
                return Vec::Constant(1, st.mean());
            } else {
                return st.mean();
            }
        },
        s);
}

}  // namespace ewkit
