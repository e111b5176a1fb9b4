#include "scarma/pricing.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "scarma/errors.hpp"

namespace scarma {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Vector unit_ep(int p) {
    Vector ep = Vector::Zero(p);
    ep[p - 1] = 1.0;
    return ep;
}

Vector model_b(const CarmaParams& model) {
    Vector b(model.p);
    for (int j = 0; j < model.p; ++j) b[j] = model.b[static_cast<std::size_t>(j)];
    return b;
}

void require_stationary(const CarmaParams& model, const char* where) {
    const StationarityReport rep = check_stationarity(model);
    if (!rep.stationary)
        throw InfeasibleError(std::string(where) + ": non-stationary model: " + rep.detail);
}

// Antiderivative of one harmonic pair c_cos cos(w t) + c_sin sin(w t).
double harmonic_integral(double c_cos, double c_sin, double w, double lo, double hi) {
    return (c_cos * (std::sin(w * hi) - std::sin(w * lo)) -
            c_sin * (std::cos(w * hi) - std::cos(w * lo))) /
           w;
}

}  // namespace

double driver_level_coeff(const CarmaParams& model) {
    require_stationary(model, "driver_level_coeff");
    const Matrix A = companion_matrix(model);
    return model_b(model).dot(A.partialPivLu().solve(unit_ep(model.p)));
}

MeasureChange make_measure_change(double theta_Z, double theta_L, double eq_Z1, double eq_L1,
                                  const CarmaParams& model) {
    if (theta_L > 0.0)
        throw InfeasibleError("make_measure_change: tempering parameter must be nonpositive");
    MeasureChange mc;
    mc.theta_Z = theta_Z;
    mc.theta_L = theta_L;
    mc.eq_Z1 = eq_Z1;
    mc.eq_L1 = eq_L1;
    mc.c_const = -driver_level_coeff(model) * eq_L1;
    return mc;
}

void validate_measure_change(const MeasureChange& mc, const CarmaParams& model) {
    const double expect = -driver_level_coeff(model) * mc.eq_L1;
    if (std::abs(mc.c_const - expect) > 1e-8 * std::max(1.0, std::abs(expect)))
        throw InfeasibleError(
            "validate_measure_change: c_const is inconsistent with eq_L1 through the model");
}

MeasureChange measure_from_thetas(double theta_Z, double theta_L, const NigParams& z_law,
                                  const StableParams& driver, const CarmaParams& model) {
    if (theta_L > 0.0)
        throw InfeasibleError("measure_from_thetas: tempering parameter must be nonpositive");
    const double eq_Z1 = nig_mean(esscher_shift_nig(z_law, theta_Z));
    const double eq_L1 =
        driver.mu + (theta_L < 0.0 ? tempered_mean_shift(driver, theta_L) : 0.0);
    return make_measure_change(theta_Z, theta_L, eq_Z1, eq_L1, model);
}

double seasonal_integral_average(const SeasonalityParams& params, double T1, double T2) {
    if (!(T1 < T2)) throw DataError("seasonal_integral_average: empty delivery interval");
    const double len = T2 - T1;
    const auto& c = params.c;
    double out = c[0] + c[1] * 0.5 * (T1 + T2);
    const double wy = kTwoPi / yearly_period(params.mode);
    out += harmonic_integral(c[2], c[3], wy, T1, T2) / len;
    if (params.mode == LoadMode::base)
        out += harmonic_integral(c[4], c[5], kTwoPi / 7.0, T1, T2) / len;
    return out;
}

double seasonal_delivery_average(const SeasonalityParams& params, double T1, double T2) {
    if (!(T1 < T2)) throw DataError("seasonal_delivery_average: empty delivery interval");
    const auto first = static_cast<long>(std::ceil(T1));
    const auto last = static_cast<long>(std::ceil(T2));  // exclusive
    if (last <= first) throw DataError("seasonal_delivery_average: no delivery days in interval");
    double sum = 0.0;
    for (long d = first; d < last; ++d) sum += eval_seasonality(params, static_cast<double>(d));
    return sum / static_cast<double>(last - first);
}

double futures_price_fixed(const MarketSnapshot& snap, double tau, const CarmaParams& model,
                           const MeasureChange& mc) {
    if (tau < snap.t) throw DataError("futures_price_fixed: maturity precedes the quote date");
    if (snap.x_t.size() != model.p)
        throw InfeasibleError("futures_price_fixed: state dimension does not match the model");
    require_stationary(model, "futures_price_fixed");

    const double dt = tau - snap.t;
    const Matrix A = companion_matrix(model);
    const Matrix E = matrix_exp(A, dt);
    const Vector b = model_b(model);
    const Vector ep = unit_ep(model.p);
    const Vector mean_load = A.partialPivLu().solve((E - Matrix::Identity(model.p, model.p)) * ep);
    return eval_seasonality(snap.seasonality, tau) + snap.z_t + b.dot(E * snap.x_t) +
           dt * mc.eq_Z1 + b.dot(mean_load) * mc.eq_L1;
}

double swap_price(const MarketSnapshot& snap, double T1, double T2, const CarmaParams& model,
                  const MeasureChange& mc) {
    if (!(snap.t <= T1 && T1 < T2))
        throw DataError("swap_price: need t <= T1 < T2 for a live delivery period");
    if (snap.x_t.size() != model.p)
        throw InfeasibleError("swap_price: state dimension does not match the model");
    require_stationary(model, "swap_price");

    const double len = T2 - T1;
    const Matrix A = companion_matrix(model);
    const auto lu = A.partialPivLu();
    const Matrix Ediff = matrix_exp(A, T2 - snap.t) - matrix_exp(A, T1 - snap.t);
    const Vector b = model_b(model);
    const Vector ep = unit_ep(model.p);

    const double carma = b.dot(lu.solve(Ediff * snap.x_t)) / len;
    const double z_drift = (0.5 * (T1 + T2) - snap.t) * mc.eq_Z1;
    const double driver = (b.dot(lu.solve(lu.solve(Ediff * ep))) / len - b.dot(lu.solve(ep))) *
                          mc.eq_L1;
    return seasonal_integral_average(snap.seasonality, T1, T2) + snap.z_t + carma + z_drift +
           driver;
}

double swap_driver_mean_term(const CarmaParams& model, double u, double v, double m) {
    if (!(v > 0.0)) throw DataError("swap_driver_mean_term: delivery length must be positive");
    require_stationary(model, "swap_driver_mean_term");
    const Matrix A = companion_matrix(model);
    const auto lu = A.partialPivLu();
    const Matrix Ediff = matrix_exp(A, u + 0.5 * v) - matrix_exp(A, u - 0.5 * v);
    const Vector b = model_b(model);
    const Vector ep = unit_ep(model.p);
    return (b.dot(lu.solve(lu.solve(Ediff * ep))) / v - b.dot(lu.solve(ep))) * m;
}

double theoretical_risk_premium(double u, double v, const CarmaParams& model, double driver_shift,
                                double eq_Z1) {
    return swap_driver_mean_term(model, u, v, driver_shift) + u * eq_Z1;
}

double risk_premium_error(std::span<const double> empirical, std::span<const double> theoretical) {
    if (empirical.size() != theoretical.size())
        throw DataError("risk_premium_error: curves are not on the same grid");
    double sum = 0.0;
    for (std::size_t i = 0; i < empirical.size(); ++i) {
        const double d = empirical[i] - theoretical[i];
        sum += d * d;
    }
    return sum;
}

}  // namespace scarma
