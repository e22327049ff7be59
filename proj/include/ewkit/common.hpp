#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace ewkit {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Construction-time or runtime contract violations (bad schedules,
// unsupported family/domain pairs, dimension mismatches, ...).
struct error : std::runtime_error {
    explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid experiment configuration (maps to CLI exit code 2).
struct config_error : error {
    explicit config_error(const std::string& msg) : error(msg) {}
};

// Numeric or sampler diagnostic failure (maps to CLI exit code 3).
struct numeric_error : error {
    explicit numeric_error(const std::string& msg) : error(msg) {}
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw error(msg);
}

}  // namespace ewkit
