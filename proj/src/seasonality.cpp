#include "scarma/seasonality.hpp"

#include <cmath>
#include <cstddef>
#include <numbers>

#include <Eigen/Dense>

#include "scarma/errors.hpp"
#include "scarma/robust.hpp"

namespace scarma {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

int coefficient_count(LoadMode mode) { return mode == LoadMode::base ? 6 : 4; }

Eigen::RowVectorXd design_row(LoadMode mode, double t) {
    Eigen::RowVectorXd row(coefficient_count(mode));
    const double wy = kTwoPi / yearly_period(mode);
    row[0] = 1.0;
    row[1] = t;
    row[2] = std::cos(wy * t);
    row[3] = std::sin(wy * t);
    if (mode == LoadMode::base) {
        const double ww = kTwoPi / 7.0;
        row[4] = std::cos(ww * t);
        row[5] = std::sin(ww * t);
    }
    return row;
}

}  // namespace

double yearly_period(LoadMode mode) { return mode == LoadMode::base ? 365.0 : 261.0; }

SeasonalityParams::SeasonalityParams(LoadMode mode, std::vector<double> c)
    : mode(mode), c(std::move(c)) {
    if (static_cast<int>(this->c.size()) != coefficient_count(mode))
        throw InfeasibleError("SeasonalityParams: coefficient count does not match the mode");
    for (const double v : this->c)
        if (!std::isfinite(v)) throw InfeasibleError("SeasonalityParams: non-finite coefficient");
}

double eval_seasonality(const SeasonalityParams& params, double t) {
    const Eigen::RowVectorXd row = design_row(params.mode, t);
    double out = 0.0;
    for (int j = 0; j < row.size(); ++j) out += row[j] * params.c[static_cast<std::size_t>(j)];
    return out;
}

SeasonalityFit fit_seasonality(std::span<const double> t, std::span<const double> s,
                               LoadMode mode) {
    if (t.size() != s.size()) throw DataError("fit_seasonality: mismatched series lengths");
    const int k = coefficient_count(mode);
    const auto n = static_cast<Eigen::Index>(t.size());
    if (n < 2 * k) throw EstimationError("fit_seasonality: too few observations for the design");
    for (std::size_t i = 0; i < t.size(); ++i)
        if (!std::isfinite(t[i]) || !std::isfinite(s[i]))
            throw DataError("fit_seasonality: non-finite observation");

    Eigen::MatrixXd X(n, k);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        X.row(i) = design_row(mode, t[static_cast<std::size_t>(i)]);
        y[i] = s[static_cast<std::size_t>(i)];
    }

    const RobustFit robust = huber_linear_fit(X, y, "fit_seasonality");

    SeasonalityFit fit;
    fit.short_history = (t.back() - t.front()) < 2.0 * yearly_period(mode);
    fit.objective = robust.objective;
    fit.iterations = robust.iterations;
    fit.params = SeasonalityParams(
        mode, std::vector<double>(robust.coef.data(), robust.coef.data() + k));
    return fit;
}

}  // namespace scarma
