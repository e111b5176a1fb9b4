#include "scarma/stable.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "scarma/errors.hpp"

namespace scarma {

namespace {
constexpr double kPi = std::numbers::pi;
}

StableParams::StableParams(double alpha_, double beta_, double gamma_, double mu_)
    : alpha(alpha_), beta(beta_), gamma(gamma_), mu(mu_) {
    if (!(alpha > 0.0) || alpha > 2.0)
        throw InfeasibleError("stable: alpha must lie in (0, 2], got " + std::to_string(alpha));
    if (std::abs(alpha - 1.0) < 1e-10)
        throw InfeasibleError("stable: alpha = 1 (logarithmic case) is unsupported");
    if (!(beta >= -1.0 && beta <= 1.0))
        throw InfeasibleError("stable: beta must lie in [-1, 1], got " + std::to_string(beta));
    if (!(gamma > 0.0))
        throw InfeasibleError("stable: gamma must be positive, got " + std::to_string(gamma));
    if (!std::isfinite(mu))
        throw InfeasibleError("stable: mu must be finite");
}

std::complex<double> stable_char_exponent(const StableParams& p, double z) {
    if (z == 0.0) return {0.0, 0.0};
    const double sign = z > 0.0 ? 1.0 : -1.0;
    const double scale = std::pow(p.gamma * std::abs(z), p.alpha);
    const double skew = p.beta * std::tan(0.5 * kPi * p.alpha);
    return {-scale, scale * skew * sign + p.mu * z};
}

namespace {

double sample_stable_std(double alpha, double beta, Rng& rng) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double v = kPi * (unif(rng) - 0.5);       // uniform on (-pi/2, pi/2)
    const double w = -std::log(1.0 - unif(rng));    // unit exponential
    const double t = std::tan(0.5 * kPi * alpha);
    const double b = std::atan(beta * t) / alpha;
    const double s = std::pow(1.0 + beta * beta * t * t, 0.5 / alpha);
    return s * std::sin(alpha * (v + b)) / std::pow(std::cos(v), 1.0 / alpha) *
           std::pow(std::cos(v - alpha * (v + b)) / w, (1.0 - alpha) / alpha);
}

}  // namespace

double sample_stable(const StableParams& p, Rng& rng) {
    return p.gamma * sample_stable_std(p.alpha, p.beta, rng) + p.mu;
}

std::vector<double> sample_stable(const StableParams& p, std::size_t n, Rng& rng) {
    std::vector<double> out(n);
    for (auto& x : out) x = sample_stable(p, rng);
    return out;
}

std::pair<double, double> stable_c_pm(const StableParams& p) {
    const double total = std::pow(p.gamma, p.alpha);
    return {0.5 * (1.0 + p.beta) * total, 0.5 * (1.0 - p.beta) * total};
}

double tempered_mean_shift(const StableParams& p, double theta) {
    if (!(p.alpha > 1.0 && p.alpha < 2.0))
        throw InfeasibleError("tempered_mean_shift: requires alpha in (1, 2)");
    if (!(theta < 0.0))
        throw InfeasibleError("tempered_mean_shift: tempering exponent must be negative");
    const auto [c_plus, c_minus] = stable_c_pm(p);
    return std::tgamma(1.0 - p.alpha) * std::pow(-theta, p.alpha - 1.0) * (c_plus - c_minus);
}

double solve_theta_L(const StableParams& p, double target_shift) {
    if (!(p.alpha > 1.0 && p.alpha < 2.0))
        throw InfeasibleError("solve_theta_L: requires alpha in (1, 2)");
    if (!std::isfinite(target_shift))
        throw InfeasibleError("solve_theta_L: target shift must be finite");
    const auto [c_plus, c_minus] = stable_c_pm(p);
    const double denom = std::tgamma(1.0 - p.alpha) * (c_plus - c_minus);
    if (denom == 0.0)
        throw InfeasibleError("solve_theta_L: beta = 0 pins the mean shift at zero");
    const double ratio = target_shift / denom;
    if (!(ratio > 0.0))
        throw InfeasibleError(
            "solve_theta_L: shift " + std::to_string(target_shift) +
            " has the wrong sign for skew beta = " + std::to_string(p.beta));
    return -std::pow(ratio, 1.0 / (p.alpha - 1.0));
}

}  // namespace scarma
