#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "scarma/numerics.hpp"
#include "scarma/rng.hpp"

namespace scarma {

// Strictly stable law in the tan(pi alpha / 2) parameterization:
//   log E e^{izL(1)} = -gamma^alpha |z|^alpha (1 - i beta sign(z) tan(pi alpha/2)) + i mu z.
// alpha = 1 needs a logarithmic correction term and is rejected at
// construction. For alpha > 1 the mean exists and equals mu.
struct StableParams {
    double alpha;  // stability index, in (0, 2], != 1
    double beta;   // skewness, in [-1, 1]
    double gamma;  // scale, > 0
    double mu;     // location

    StableParams(double alpha, double beta, double gamma, double mu);
};

// Exponentially tempered tail data: tilting exponent together with the
// one-sided Levy intensities it acts on.
struct TemperedTail {
    double theta;    // tempering exponent, < 0
    double c_plus;   // upward jump intensity
    double c_minus;  // downward jump intensity
};

// Characteristic exponent phi with E e^{izL(t)} = e^{t phi(z)}.
std::complex<double> stable_char_exponent(const StableParams& p, double z);

// Chambers-Mallows-Stuck draw(s). Each variate consumes exactly two
// uniforms, so parallel streams stay reproducible.
double sample_stable(const StableParams& p, Rng& rng);
std::vector<double> sample_stable(const StableParams& p, std::size_t n, Rng& rng);

// One-sided tail intensities (c_plus, c_minus) = (1 +- beta)/2 * gamma^alpha.
std::pair<double, double> stable_c_pm(const StableParams& p);

// Mean shift E_Q[L(1)] - E[L(1)] produced by tempering both jump tails with
// e^{theta |x|}, theta < 0: Gamma(1-alpha) (-theta)^{alpha-1} (c_+ - c_-).
// Requires alpha in (1, 2).
double tempered_mean_shift(const StableParams& p, double theta);

// Inverse of tempered_mean_shift in theta: the negative tempering exponent
// achieving the requested shift. Throws InfeasibleError when the shift has
// the wrong sign for the skew or the skew is zero.
double solve_theta_L(const StableParams& p, double target_shift);

// --- density and estimation, restricted to alpha in (1, 2) ---

// Standardized density f(x; alpha, beta, 1, 0) through the non-oscillatory
// inversion integral (series expansions near the origin and in the tails).
// Absolute accuracy around 1e-9.
double stable_pdf_std(double alpha, double beta, double x);

// Batch evaluator for one (alpha, beta) pair: cubic spline of the
// standardized log-density on an asinh-spaced grid, asymptotic series
// beyond it. Also carries the CDF and quantile function.
class StableDensity {
public:
    StableDensity(double alpha, double beta);

    double alpha() const { return alpha_; }
    double beta() const { return beta_; }
    double log_pdf_std(double x) const;
    double pdf_std(double x) const { return std::exp(log_pdf_std(x)); }
    double cdf_std(double x) const;
    double quantile_std(double p) const;

private:
    double tail_log_pdf(double x) const;

    double alpha_ = 0.0;
    double beta_ = 0.0;
    double cut_ = 0.0;  // |x| beyond which the tail series takes over
    num::Spline log_pdf_;
    std::vector<double> s_nodes_;    // asinh(x) grid
    std::vector<double> cdf_nodes_;  // CDF at the grid nodes
};

struct StableFit {
    StableParams params;
    double log_likelihood;  // NaN when only the quantile stage ran
    int iterations;
    bool ml_refined;
};

// Quantile-matching initialization (numerically built lookup tables)
// refined by maximum likelihood over the batch density. quantile_only
// skips the likelihood stage. Requires at least 200 observations.
StableFit estimate_stable(std::span<const double> x, bool quantile_only = false);

}  // namespace scarma
