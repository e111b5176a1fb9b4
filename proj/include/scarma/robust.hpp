#pragma once

#include <vector>

#include <Eigen/Dense>

namespace scarma {

struct RobustFit {
    Eigen::VectorXd coef;
    std::vector<double> objective;  // Huber objective per sweep, final value appended
    int iterations = 0;
    bool degenerate_scale = false;  // initial residual scale was zero; plain LS returned
};

// Huber M-estimate of y ~ X coef by iteratively reweighted least squares.
// The tuning constant is 1.345 times the MAD-based scale of the initial
// least-squares residuals and is held fixed across sweeps. `who` names the
// caller in error messages.
RobustFit huber_linear_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const char* who);

}  // namespace scarma
