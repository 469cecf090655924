#pragma once
#include <functional>
#include <vector>

namespace ats {

// Box-constrained Levenberg-Marquardt with a forward-difference Jacobian
// (relative step 1e-5). Minimizes |r(x)|^2; covariance of the estimates is
// (J'J)^{-1} * mse at the solution.
struct LmOptions {
    std::vector<double> lower;
    std::vector<double> upper;
    int max_iter = 200;
    double ftol = 1e-10; // on the mean squared residual
    double rel_step = 1e-5;
};

struct LmResult {
    std::vector<double> x;
    double mse = 0.0; // |r|^2 / n
    std::vector<std::vector<double>> covariance;
    bool converged = false;
    int iterations = 0;
    int n_residuals = 0;
};

using ResidualFn = std::function<std::vector<double>(const std::vector<double>&)>;

LmResult levenberg_marquardt(const ResidualFn& fn, std::vector<double> x0,
                             const LmOptions& opts);

// Dense solve with partial pivoting, sized for the tiny systems used here.
std::vector<double> solve_dense(std::vector<std::vector<double>> a, std::vector<double> b);

} // namespace ats
