#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "scarma/rng.hpp"

namespace scarma {

// Normal inverse Gaussian law for increments of the long-term factor:
// the variance-mean mixture mu + beta V + sqrt(V) N(0,1) with an
// inverse-Gaussian subordinator V.
struct NigParams {
    double alpha;  // tail heaviness, > 0
    double beta;   // asymmetry, |beta| < alpha
    double delta;  // scale, > 0
    double mu;     // location

    NigParams(double alpha, double beta, double delta, double mu);
};

// Log-density via the order-1 modified Bessel function of the second kind.
double nig_log_density(const NigParams& p, double x);

// mu + delta beta / sqrt(alpha^2 - beta^2)
double nig_mean(const NigParams& p);

// One draw / n i.i.d. draws through the subordinated-normal representation.
double sample_nig(const NigParams& p, Rng& rng);
std::vector<double> sample_nig(const NigParams& p, std::size_t n, Rng& rng);

// Exponential tilting by e^{theta x}: again NIG, with beta shifted to
// beta + theta. Requires |beta + theta| < alpha for the tilt to integrate.
NigParams esscher_shift_nig(const NigParams& p, double theta_Z);

// The tilt exponent theta with nig_mean(esscher_shift_nig(p, theta)) equal
// to target_mean, to 1e-10 absolute; bracketed root solve plus polish.
double solve_theta_Z(const NigParams& p, double target_mean);

// Maximum likelihood constrained to the zero-mean manifold, where the
// location is eliminated through mu = -delta beta / sqrt(alpha^2 - beta^2).
// Needs at least 200 observations.
NigParams fit_nig_zero_mean(std::span<const double> increments);

}  // namespace scarma
