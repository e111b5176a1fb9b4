#include "scarma/robust.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>

#include "scarma/errors.hpp"

namespace scarma {

namespace {

double huber_loss(double r, double k) {
    const double a = std::abs(r);
    return a <= k ? 0.5 * r * r : k * a - 0.5 * k * k;
}

}  // namespace

RobustFit huber_linear_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const char* who) {
    const Eigen::Index n = X.rows();
    const Eigen::Index k = X.cols();

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    qr.setThreshold(1e-10);
    if (qr.rank() < k) throw EstimationError(std::string(who) + ": rank-deficient design");
    Eigen::VectorXd coef = qr.solve(y);

    RobustFit fit;
    const double scale = std::max(1.0, y.cwiseAbs().maxCoeff());

    // Robustness scale from the initial residuals, held fixed.
    Eigen::VectorXd r = y - X * coef;
    std::vector<double> abs_r(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) abs_r[static_cast<std::size_t>(i)] = std::abs(r[i]);
    std::nth_element(abs_r.begin(), abs_r.begin() + n / 2, abs_r.end());
    const double mad = abs_r[static_cast<std::size_t>(n / 2)];
    const double sigma = mad / 0.6745;

    if (sigma <= 1e-12 * scale) {
        fit.coef = coef;
        fit.degenerate_scale = true;
        return fit;
    }

    const double kh = 1.345 * sigma;
    for (int it = 0; it < 50; ++it) {
        double obj = 0.0;
        Eigen::VectorXd w(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            obj += huber_loss(r[i], kh);
            const double a = std::abs(r[i]);
            w[i] = a <= kh ? 1.0 : kh / a;
        }
        fit.objective.push_back(obj);

        const Eigen::VectorXd sw = w.cwiseSqrt();
        const Eigen::VectorXd next =
            (sw.asDiagonal() * X).colPivHouseholderQr().solve(sw.asDiagonal() * y);
        const double step = (next - coef).cwiseAbs().maxCoeff();
        coef = next;
        r = y - X * coef;
        fit.iterations = it + 1;
        if (step < 1e-10 * (1.0 + coef.cwiseAbs().maxCoeff())) break;
    }
    double obj = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) obj += huber_loss(r[i], kh);
    fit.objective.push_back(obj);

    fit.coef = coef;
    return fit;
}

}  // namespace scarma
