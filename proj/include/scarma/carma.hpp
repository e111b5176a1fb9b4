#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "scarma/rng.hpp"
#include "scarma/stable.hpp"

namespace scarma {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Controller-canonical CARMA(p,q) structure: state dX = AX dt + e_p dL,
// observation Y = b*X, with A the companion matrix of a_1..a_p.
struct CarmaParams {
    int p;
    int q;
    std::vector<double> a;  // a_1..a_p
    std::vector<double> b;  // b_0..b_{p-1}; b_q = 1, b_j = 0 for j > q

    CarmaParams(int p, int q, std::vector<double> a, std::vector<double> b);
};

struct StationarityReport {
    bool stationary = false;  // distinct, negative real parts, coprime
    bool distinct = false;
    bool negative_real_parts = false;
    bool coprime = false;
    std::vector<std::complex<double>> lambda;  // sorted by decreasing real part
    double min_separation = 0.0;               // relative pairwise eigenvalue gap
    double max_real_part = 0.0;
    std::string detail;
};

Matrix companion_matrix(const CarmaParams& params);
Matrix companion_matrix(const std::vector<double>& a);

// All eigenvalues with multiplicity, sorted by decreasing real part
// (ties by imaginary part).
std::vector<std::complex<double>> eigenvalues(const Matrix& A);

StationarityReport check_stationarity(const CarmaParams& params);

// e^{At} by eigendecomposition; scaling-and-squaring fallback when the
// spectrum is too close to repeated for a stable eigenbasis.
Matrix matrix_exp(const Matrix& A, double t);

// Residue weights kappa_i = b(lambda_i)/a'(lambda_i) of the kernel
// g(t) = sum_i kappa_i e^{lambda_i t}, ordered like eigenvalues().
std::vector<std::complex<double>> carma_kernel_weights(const CarmaParams& params);

struct CarmaPath {
    std::vector<double> times;   // observation times, starting at 0
    std::vector<Vector> states;  // X at those times
    std::vector<double> y;       // b*X
};

// Euler scheme on the fine grid with stable increments of scale
// gamma fine_step^{1/alpha}; observations kept every obs_step. Starts from
// x0 when given, otherwise from zero with a burn-in of 10/|max Re lambda|
// time units discarded before t = 0.
CarmaPath simulate_carma(const CarmaParams& params, const StableParams& driver,
                         double horizon, double fine_step, double obs_step, Rng& rng,
                         const std::optional<Vector>& x0 = std::nullopt);

// Least-squares AR(p) fit of y_n on its p lags, no intercept.
std::vector<double> estimate_arma_ar(std::span<const double> y, int p);

struct ArRoots {
    std::vector<std::complex<double>> lambda;  // sorted by decreasing real part
    std::vector<double> a;                     // a_1..a_p
};

// Maps discrete AR coefficients phi to continuous-time eigenvalues
// lambda_i = log(w_i)/h, where w_i are the roots of
// w^p - phi_1 w^{p-1} - ... - phi_p, then recovers a by expanding
// prod(lambda - lambda_i).
ArRoots ar_from_arma_roots(const std::vector<double>& phi, double h);

// Stationary state covariance Sigma at unit driver-variance scale, the
// solution of A Sigma + Sigma A* + e_p e_p* = 0.
Matrix stationary_state_cov(const std::vector<double>& a);

// Stationary autocovariance b*e^{A|s|} Sigma b (unit driver-variance scale).
double carma_autocov(const CarmaParams& params, double s);
double carma_autocorr(const CarmaParams& params, double s);

// Least-absolute-deviation fit of the free MA coefficients b_0..b_{q-1}
// against an empirical autocorrelation over lags h, 2h, ..., Kh.
std::vector<double> estimate_ma_b(const std::vector<double>& a, int q,
                                  std::span<const double> empirical_acf, double h);

struct NoiseSeries {
    std::vector<double> eps;
    double h = 1.0;
};

// Applies prod_i (1 - e^{lambda_i h} B) to y, yielding the discrete
// innovations eps_n for n = p..N-1.
NoiseSeries recover_noise(std::span<const double> y, const std::vector<std::complex<double>>& lambda,
                          double h);

// Stable law of the recovered innovations for the (2,1) model: eps_n is a
// difference of two independent stable integrals with kernels built from
// kappa_i and lambda_i over one grid cell. Only p=2, q=1 is supported.
StableParams epsilon_stable_params(const CarmaParams& params, const StableParams& driver,
                                   double h);

// Exact inverse of epsilon_stable_params on the driver parameters.
StableParams map_epsilon_to_L(const StableParams& eps_params, const CarmaParams& params,
                              double h);

}  // namespace scarma
