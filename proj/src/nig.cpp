#include "scarma/nig.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <string>

#include <gsl/gsl_sf_bessel.h>

#include "scarma/errors.hpp"
#include "scarma/numerics.hpp"

namespace scarma {

namespace {

constexpr double kPi = 3.14159265358979323846;

double steep(const NigParams& p) { return std::sqrt(p.alpha * p.alpha - p.beta * p.beta); }

// Michael-Schucany-Haas draw from IG(mean, shape). The smaller candidate
// root is computed in rationalized form so it stays positive for large
// chi-square draws instead of cancelling to zero.
double sample_inverse_gaussian(double mean, double shape, Rng& rng) {
    std::normal_distribution<double> n01;
    std::uniform_real_distribution<double> u01;
    const double nu = n01(rng);
    const double w = mean * nu * nu;
    const double r = std::sqrt(w * (w + 4.0 * shape));
    const double x = mean * (r - w) / (r + w);
    if (u01(rng) <= mean / (mean + x)) return x;
    return mean * mean / x;
}

}  // namespace

NigParams::NigParams(double alpha_, double beta_, double delta_, double mu_)
    : alpha(alpha_), beta(beta_), delta(delta_), mu(mu_) {
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        throw InfeasibleError("NigParams: alpha must be positive and finite");
    if (!(std::abs(beta) < alpha))
        throw InfeasibleError("NigParams: require |beta| < alpha");
    if (!(delta > 0.0) || !std::isfinite(delta))
        throw InfeasibleError("NigParams: delta must be positive and finite");
    if (!std::isfinite(mu)) throw InfeasibleError("NigParams: mu must be finite");
}

double nig_log_density(const NigParams& p, double x) {
    const double dx = x - p.mu;
    const double s = std::sqrt(p.delta * p.delta + dx * dx);
    const double as = p.alpha * s;
    // K1(as) = k1_scaled * e^{-as}; the scaled value never under/overflows
    // for feasible parameters, so the log stays finite.
    const double k1_scaled = gsl_sf_bessel_K1_scaled(as);
    return std::log(p.alpha * p.delta / kPi) + p.delta * steep(p) + p.beta * dx +
           std::log(k1_scaled) - as - std::log(s);
}

double nig_mean(const NigParams& p) { return p.mu + p.delta * p.beta / steep(p); }

double sample_nig(const NigParams& p, Rng& rng) {
    const double g = steep(p);
    const double v = sample_inverse_gaussian(p.delta / g, p.delta * p.delta, rng);
    std::normal_distribution<double> n01;
    return p.mu + p.beta * v + std::sqrt(v) * n01(rng);
}

std::vector<double> sample_nig(const NigParams& p, std::size_t n, Rng& rng) {
    std::vector<double> out(n);
    for (auto& x : out) x = sample_nig(p, rng);
    return out;
}

NigParams esscher_shift_nig(const NigParams& p, double theta_Z) {
    const double shifted = p.beta + theta_Z;
    if (!(std::abs(shifted) < p.alpha)) {
        std::ostringstream msg;
        msg << "esscher_shift_nig: tilt " << theta_Z << " moves beta to " << shifted
            << " outside (-alpha, alpha) with alpha = " << p.alpha;
        throw InfeasibleError(msg.str());
    }
    return NigParams(p.alpha, shifted, p.delta, p.mu);
}

double solve_theta_Z(const NigParams& p, double target_mean) {
    if (!std::isfinite(target_mean))
        throw InfeasibleError("solve_theta_Z: target mean must be finite");
    const double a = p.alpha;
    const auto mean_at = [&](double u) { return p.mu + p.delta * u / std::sqrt(a * a - u * u); };

    // The mean is strictly increasing in the tilted asymmetry u = beta + theta
    // and sweeps all of (mean_at(-edge), mean_at(edge)); targets beyond the
    // numerically representable edge are rejected rather than clamped.
    const double edge = a * (1.0 - 1e-14);
    if (!(target_mean > mean_at(-edge)) || !(target_mean < mean_at(edge))) {
        std::ostringstream msg;
        msg << "solve_theta_Z: target mean " << target_mean
            << " is outside the attainable range for alpha = " << a << ", delta = " << p.delta;
        throw InfeasibleError(msg.str());
    }

    double u = num::bisect_root([&](double v) { return mean_at(v) - target_mean; }, -edge, edge,
                                1e-14);
    for (int i = 0; i < 3; ++i) {
        const double resid = mean_at(u) - target_mean;
        if (std::abs(resid) <= 1e-12 * std::max(1.0, std::abs(target_mean))) break;
        const double slope = p.delta * a * a / std::pow(a * a - u * u, 1.5);
        u = std::clamp(u - resid / slope, -edge, edge);
    }
    if (!(std::abs(mean_at(u) - target_mean) <= 1e-10)) {
        std::ostringstream msg;
        msg << "solve_theta_Z: root polish left residual "
            << std::abs(mean_at(u) - target_mean) << " above 1e-10";
        throw EstimationError(msg.str());
    }
    return u - p.beta;
}

NigParams fit_nig_zero_mean(std::span<const double> increments) {
    const std::size_t n = increments.size();
    if (n < 200)
        throw EstimationError("fit_nig_zero_mean: need at least 200 observations, got " +
                              std::to_string(n));
    for (double x : increments)
        if (!std::isfinite(x)) throw EstimationError("fit_nig_zero_mean: non-finite observation");

    double m1 = 0.0;
    for (double x : increments) m1 += x;
    m1 /= static_cast<double>(n);
    double m2 = 0.0;
    double m4 = 0.0;
    for (double x : increments) {
        const double d = x - m1;
        m2 += d * d;
        m4 += d * d * d * d;
    }
    m2 /= static_cast<double>(n);
    m4 /= static_cast<double>(n);
    if (!(m2 > 0.0)) throw EstimationError("fit_nig_zero_mean: degenerate sample (zero variance)");

    // Symmetric moment start: excess kurtosis 3/(alpha delta) and variance
    // delta/alpha pin the scale pair; the kurtosis is floored because the
    // NIG family only reaches the Gaussian value 0 in the limit.
    const double kurt = std::max(m4 / (m2 * m2) - 3.0, 0.05);
    const double alpha0 = std::sqrt(3.0 / (kurt * m2));
    const double delta0 = m2 * alpha0;

    // Log-scales are squashed into wide sample-scaled brackets. Nearly
    // Gaussian data pushes alpha toward infinity along a likelihood ridge;
    // the logistic flattens that ridge so the simplex can contract instead
    // of chasing it.
    const double scale = std::sqrt(m2);
    const double la_lo = std::log(1e-6 / scale), la_hi = std::log(1e6 / scale);
    const double ld_lo = std::log(1e-8 * scale), ld_hi = std::log(1e8 * scale);
    const auto squash = [](double t, double lo, double hi) {
        return lo + (hi - lo) / (1.0 + std::exp(-t));
    };
    const auto unsquash = [](double v, double lo, double hi) {
        const double f = (v - lo) / (hi - lo);
        return std::log(f / (1.0 - f));
    };

    const auto unpack = [&](const std::vector<double>& t) {
        const double alpha = std::exp(squash(t[0], la_lo, la_hi));
        const double beta = alpha * std::tanh(t[1]);
        const double delta = std::exp(squash(t[2], ld_lo, ld_hi));
        const double g = std::sqrt(alpha * alpha - beta * beta);
        return NigParams(alpha, beta, delta, -delta * beta / g);
    };

    const auto neg_log_lik = [&](const std::vector<double>& t) {
        const NigParams cand = unpack(t);
        double nll = 0.0;
        for (double x : increments) nll -= nig_log_density(cand, x);
        return std::isfinite(nll) ? nll : 1e300;
    };

    const std::vector<double> start = {unsquash(std::log(alpha0), la_lo, la_hi), 0.0,
                                       unsquash(std::log(delta0), ld_lo, ld_hi)};
    const std::vector<double> step = {0.1, 0.3, 0.1};
    const num::SimplexResult res = num::nelder_mead(neg_log_lik, start, step, 1e-7, 2000);
    if (!res.converged) {
        std::ostringstream msg;
        msg << "fit_nig_zero_mean: simplex did not converge within " << res.iterations
            << " iterations (objective " << res.fmin << ")";
        throw EstimationError(msg.str());
    }
    return unpack(res.x);
}

}  // namespace scarma
