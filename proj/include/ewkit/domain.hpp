#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

#include "common.hpp"

namespace ewkit {

// The action set W. Projections of mean vectors come in two metrics:
// Euclidean and Mahalanobis (precision-weighted), the latter used when a
// posterior carries a non-spherical covariance.
class ConvexDomain {
   public:
    enum class Kind { AllSpace, Ball, Box, Simplex, Interval };

    static ConvexDomain all_space() { return ConvexDomain(Kind::AllSpace); }

    static ConvexDomain ball(double radius) {
        require(radius > 0, "ball radius must be positive");
        ConvexDomain d(Kind::Ball);
        d.radius_ = radius;
        return d;
    }

    static ConvexDomain box(Vec lo, Vec hi) {
        require(lo.size() == hi.size(), "box bounds dimension mismatch");
        require((lo.array() <= hi.array()).all(), "box bounds inverted");
        ConvexDomain d(Kind::Box);
        d.lo_ = std::move(lo);
        d.hi_ = std::move(hi);
        return d;
    }

    static ConvexDomain centered_box(int dim, double half_width) {
        return box(Vec::Constant(dim, -half_width), Vec::Constant(dim, half_width));
    }

    static ConvexDomain simplex() { return ConvexDomain(Kind::Simplex); }

    static ConvexDomain interval(double lo, double hi) {
        require(lo <= hi, "interval bounds inverted");
        ConvexDomain d(Kind::Interval);
        d.lo_ = Vec::Constant(1, lo);
        d.hi_ = Vec::Constant(1, hi);
        return d;
    }

    Kind kind() const { return kind_; }
    double radius() const { return radius_; }
    const Vec& lo() const { return lo_; }
    const Vec& hi() const { return hi_; }

    bool contains(const Vec& w, double tol = 1e-12) const {
        switch (kind_) {
            case Kind::AllSpace:
                return true;
            case Kind::Ball:
                return w.norm() <= radius_ + tol;
            case Kind::Box:
                return (w.array() >= lo_.array() - tol).all() &&
                       (w.array() <= hi_.array() + tol).all();
            case Kind::Simplex:
                return (w.array() >= -tol).all() && std::abs(w.sum() - 1.0) <= tol;
            case Kind::Interval:
                return w.size() == 1 && w[0] >= lo_[0] - tol && w[0] <= hi_[0] + tol;
        }
        return false;
    }

    Vec project(const Vec& w) const {
        switch (kind_) {
            case Kind::AllSpace:
                return w;
            case Kind::Ball: {
                double n = w.norm();
                return n <= radius_ ? w : Vec((radius_ / n) * w);
            }
            case Kind::Box:
                return w.cwiseMax(lo_).cwiseMin(hi_);
            case Kind::Simplex:
                return project_simplex(w);
            case Kind::Interval:
                return w.cwiseMax(lo_).cwiseMin(hi_);
        }
        return w;
    }

    // argmin_{w in W} (w - target)' P (w - target) for PD precision P.
    // Ball: bisection on the dual multiplier; box: cyclic coordinate
    // minimization; both to tolerance 1e-10.
    Vec project_mahalanobis(const Vec& target, const Mat& precision) const {
        switch (kind_) {
            case Kind::AllSpace:
                return target;
            case Kind::Interval:
            case Kind::Box:
                return box_mahalanobis(target, precision);
            case Kind::Ball:
                return ball_mahalanobis(target, precision);
            case Kind::Simplex:
                throw error("Mahalanobis projection onto the simplex is unsupported");
        }
        return target;
    }

   private:
    explicit ConvexDomain(Kind k) : kind_(k) {}

    static Vec project_simplex(const Vec& w) {
        // Sort-based Euclidean projection.
        std::vector<double> u(w.data(), w.data() + w.size());
        std::sort(u.begin(), u.end(), std::greater<double>());
        double css = 0.0, tau = 0.0;
        int rho = 0;
        for (int i = 0; i < static_cast<int>(u.size()); ++i) {
            css += u[i];
            double t = (css - 1.0) / (i + 1);
            if (u[i] - t > 0) {
                rho = i + 1;
                tau = t;
            }
        }
        (void)rho;
        Vec out = (w.array() - tau).cwiseMax(0.0);
        return out;
    }

    Vec ball_mahalanobis(const Vec& target, const Mat& precision) const {
        if (target.norm() <= radius_) return target;
        const int d = static_cast<int>(target.size());
        // Isotropic precision: the metric is Euclidean and the projection is
        // an exact radial scaling.
        if ((precision - precision(0, 0) * Mat::Identity(d, d))
                .cwiseAbs()
                .maxCoeff() == 0.0) {
            return Vec((radius_ / target.norm()) * target);
        }
        Vec rhs = precision * target;
        auto solve = [&](double lam) {
            Mat a = precision + lam * Mat::Identity(d, d);
            return Vec(a.llt().solve(rhs));
        };
        // ||w(lam)|| is decreasing in lam; find a bracket then bisect.
        double lo = 0.0;
        double hi = std::max(1.0, rhs.norm() / radius_);
        while (solve(hi).norm() > radius_) hi *= 2.0;
        for (int it = 0; it < 300; ++it) {
            double mid = 0.5 * (lo + hi);
            Vec w = solve(mid);
            if (std::abs(w.norm() - radius_) < 1e-13 * radius_) return w;
            (w.norm() > radius_ ? lo : hi) = mid;
        }
        return solve(0.5 * (lo + hi));
    }

    Vec box_mahalanobis(const Vec& target, const Mat& precision) const {
        Vec w = target.cwiseMax(lo_).cwiseMin(hi_);
        const int d = static_cast<int>(w.size());
        // Cyclic coordinate minimization of the quadratic; each coordinate
        // step is a clipped exact 1-d minimizer.
        for (int sweep = 0; sweep < 10000; ++sweep) {
            double max_change = 0.0;
            for (int i = 0; i < d; ++i) {
                double grad = precision.row(i).dot(w - target);
                double step = grad / precision(i, i);
                double wi = std::clamp(w[i] - step, lo_[i], hi_[i]);
                max_change = std::max(max_change, std::abs(wi - w[i]));
                w[i] = wi;
            }
            if (max_change < 1e-10) break;
        }
        return w;
    }

    Kind kind_;
    double radius_ = 0.0;
    Vec lo_, hi_;
};

}  // namespace ewkit
