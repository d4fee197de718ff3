#pragma once

// Dense Levenberg-Marquardt with Marquardt diagonal scaling. Small parameter
// counts only (normal equations solved by LDLT).

#include <Eigen/Dense>
#include <functional>

namespace femsyn::detail {

struct LmProblem {
    /// Fills residuals r (and the Jacobian when J != nullptr) at parameters p.
    std::function<void(const Eigen::VectorXd& p, Eigen::VectorXd& r, Eigen::MatrixXd* J)> eval;
    Eigen::Index residual_count = 0;
};

struct LmOptions {
    double rel_tol = 1e-10;  ///< relative step size at convergence
    int max_iterations = 500;
};

struct LmResult {
    Eigen::VectorXd params;
    double rss = 0.0;
    int iterations = 0;
    bool converged = false;
};

LmResult levenberg_marquardt(const LmProblem& problem, Eigen::VectorXd p0,
                             const LmOptions& opts);

}  // namespace femsyn::detail
