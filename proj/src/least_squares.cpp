#include "least_squares.hpp"

#include <algorithm>
#include <cmath>

namespace femsyn::detail {

LmResult levenberg_marquardt(const LmProblem& problem, Eigen::VectorXd p0,
                             const LmOptions& opts) {
    const Eigen::Index m = problem.residual_count;
    const Eigen::Index k = p0.size();
    Eigen::VectorXd r(m), r_trial(m);
    Eigen::MatrixXd J(m, k);

    LmResult out;
    out.params = std::move(p0);
    problem.eval(out.params, r, &J);
    out.rss = r.squaredNorm();

    double lambda = 1e-3;
    constexpr double kLambdaMax = 1e16;

    for (int it = 0; it < opts.max_iterations; ++it) {
        out.iterations = it + 1;
        const Eigen::MatrixXd JtJ = J.transpose() * J;
        const Eigen::VectorXd g = J.transpose() * r;
        Eigen::VectorXd diag = JtJ.diagonal().cwiseMax(1e-30);

        bool accepted = false;
        while (!accepted) {
            Eigen::MatrixXd H = JtJ;
            H.diagonal() += lambda * diag;
            const Eigen::VectorXd step = H.ldlt().solve(-g);
            const Eigen::VectorXd trial = out.params + step;
            problem.eval(trial, r_trial, nullptr);
            const double rss_trial = r_trial.squaredNorm();

            if (std::isfinite(rss_trial) && rss_trial <= out.rss) {
                const double rel_step = step.norm() / (out.params.norm() + opts.rel_tol);
                out.params = trial;
                out.rss = rss_trial;
                lambda = std::max(lambda * 0.1, 1e-12);
                accepted = true;
                if (rel_step <= opts.rel_tol || rss_trial == 0.0) {
                    out.converged = true;
                    return out;
                }
            } else {
                lambda *= 10.0;
                // No descent is possible any more: the current point is a
                // minimum to working precision.
                if (lambda > kLambdaMax) {
                    out.converged = true;
                    return out;
                }
            }
        }
        problem.eval(out.params, r, &J);
    }
    return out;
}

}  // namespace femsyn::detail
