#pragma once

#include <utility>
#include <variant>

#include "common.hpp"

namespace ewkit {

// Linearized loss l(w) = <w, g>.
struct LinearSurrogate {
    Vec gradient;
    double scale_bound = kInf;  // declared G (context decides the norm)

    explicit LinearSurrogate(Vec g, double bound = kInf)
        : gradient(std::move(g)), scale_bound(bound) {
        require(gradient.allFinite(), "linear surrogate gradient not finite");
    }
};

// Quadratic lower bound l(w) = <w - anchor, g> + (w - anchor)' M (w - anchor) / 2.
struct QuadraticSurrogate {
    Vec gradient;
    Mat curvature;
    Vec anchor;

    QuadraticSurrogate(Vec g, Mat m, Vec w)
        : gradient(std::move(g)), curvature(std::move(m)), anchor(std::move(w)) {
        require(gradient.size() == anchor.size() &&
                    curvature.rows() == gradient.size() &&
                    curvature.cols() == gradient.size(),
                "quadratic surrogate shape mismatch");
        Eigen::SelfAdjointEigenSolver<Mat> es(curvature);
        require(es.eigenvalues().minCoeff() >= -1e-10,
                "curvature matrix not PSD");
    }

    double value(const Vec& w) const {
        Vec d = w - anchor;
        return gradient.dot(d) + 0.5 * d.dot(curvature * d);
    }
};

// Log loss on a binary outcome: l(w) = -x ln w - (1 - x) ln(1 - w), w scalar.
struct LogLossSurrogate {
    int outcome;  // 0 or 1

    explicit LogLossSurrogate(int x) : outcome(x) {
        require(x == 0 || x == 1, "log-loss outcome must be 0 or 1");
    }

    double value(double w) const {
        return outcome == 1 ? -std::log(w) : -std::log(1.0 - w);
    }
};

using SurrogateLoss =
    std::variant<LinearSurrogate, QuadraticSurrogate, LogLossSurrogate>;

}  // namespace ewkit
