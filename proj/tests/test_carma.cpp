#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "scarma/carma.hpp"
#include "scarma/errors.hpp"
#include "scarma/rng.hpp"
#include "scarma/stable.hpp"

using scarma::CarmaParams;
using scarma::EstimationError;
using scarma::InfeasibleError;
using scarma::Matrix;
using scarma::Rng;
using scarma::StableParams;
using scarma::Vector;

namespace {

// Fitted two-factor models, base and peak data sets.
const CarmaParams kBase(2, 1, {1.4854, 0.0911}, {0.2861, 1.0});
const CarmaParams kPeak(2, 1, {2.3335, 0.2263}, {0.6127, 1.0});
const StableParams kBaseL(1.6524, 0.3911, 6.4072, 0.0566);

// Cofactor-expansion determinant, independent of any library factorization.
double det_cofactor(const Matrix& m) {
    const int n = static_cast<int>(m.rows());
    if (n == 1) return m(0, 0);
    double acc = 0.0;
    for (int j = 0; j < n; ++j) {
        Matrix minor(n - 1, n - 1);
        for (int r = 1; r < n; ++r)
            for (int c = 0, cc = 0; c < n; ++c)
                if (c != j) minor(r - 1, cc++) = m(r, c);
        acc += (j % 2 == 0 ? 1.0 : -1.0) * m(0, j) * det_cofactor(minor);
    }
    return acc;
}

// Roots of x^2 + a1 x + a2 by the quadratic formula.
std::pair<std::complex<double>, std::complex<double>> quadratic_roots(double a1, double a2) {
    const std::complex<double> disc = std::sqrt(std::complex<double>(a1 * a1 - 4.0 * a2, 0.0));
    return {(-a1 + disc) / 2.0, (-a1 - disc) / 2.0};
}

CarmaParams random_stationary_21(Rng& rng) {
    std::uniform_real_distribution<double> u01;
    const double l1 = -(0.02 + 0.48 * u01(rng));
    const double l2 = -(0.8 + 2.2 * u01(rng));
    const double b0 = 0.05 + 1.5 * u01(rng);
    return CarmaParams(2, 1, {-(l1 + l2), l1 * l2}, {b0, 1.0});
}

}  // namespace

TEST_CASE("carma parameter validation") {
    CHECK_NOTHROW(CarmaParams(1, 0, {0.4}, {1.0}));
    CHECK_THROWS_AS(CarmaParams(0, 0, {}, {}), InfeasibleError);
    CHECK_THROWS_AS(CarmaParams(2, 2, {1.0, 0.1}, {0.5, 1.0}), InfeasibleError);
    CHECK_THROWS_AS(CarmaParams(2, 1, {1.0}, {0.5, 1.0}), InfeasibleError);
    CHECK_THROWS_AS(CarmaParams(2, 1, {1.0, 0.1}, {0.5, 0.9}), InfeasibleError);  // b_q != 1
    CHECK_THROWS_AS(CarmaParams(3, 1, {1.0, 0.1, 0.01}, {0.5, 1.0, 0.2}), InfeasibleError);
    CHECK_THROWS_AS(CarmaParams(2, 1, {std::nan(""), 0.1}, {0.5, 1.0}), InfeasibleError);
}

TEST_CASE("companion matrix layout and characteristic polynomial") {
    const Matrix a1 = companion_matrix(CarmaParams(1, 0, {0.5}, {1.0}));
    CHECK(a1(0, 0) == doctest::Approx(-0.5));

    const Matrix ab = companion_matrix(kBase);
    CHECK(ab(0, 0) == 0.0);
    CHECK(ab(0, 1) == 1.0);
    CHECK(ab(1, 0) == doctest::Approx(-0.0911));
    CHECK(ab(1, 1) == doctest::Approx(-1.4854));

    // det(A - xI) = (-1)^p (x^p + a_1 x^{p-1} + ... + a_p) at sample points.
    const std::vector<std::vector<double>> coeff_sets = {
        {1.4854, 0.0911}, {0.9, 0.2, 0.05}, {1.2, 0.4, 0.1, 0.02}};
    for (const auto& a : coeff_sets) {
        const Matrix A = scarma::companion_matrix(a);
        const int p = static_cast<int>(a.size());
        for (const double x : {0.3, -0.7, 1.1, 2.3, -1.9}) {
            double poly = 1.0;
            for (int k = 0; k < p; ++k) poly = poly * x + a[static_cast<std::size_t>(k)];
            poly *= (p % 2 == 0 ? 1.0 : -1.0);
            const Matrix shifted = A - x * Matrix::Identity(p, p);
            CHECK(det_cofactor(shifted) == doctest::Approx(poly).epsilon(1e-10));
        }
    }
}

TEST_CASE("eigenvalue fixtures") {
    const auto lb = scarma::eigenvalues(companion_matrix(kBase));
    CHECK(std::abs(lb[0].real() - (-0.0641)) < 1e-4);
    CHECK(std::abs(lb[1].real() - (-1.4213)) < 1e-4);
    CHECK(std::abs(lb[0].imag()) < 1e-12);
    CHECK(std::abs(lb[1].imag()) < 1e-12);

    // Peak: checked against the quadratic formula; the smaller root sits
    // 2.2e-4 away from its widely quoted two-sided rounding, so the analytic
    // value is the reference here.
    const auto lp = scarma::eigenvalues(companion_matrix(kPeak));
    const auto [r1, r2] = quadratic_roots(2.3335, 0.2263);
    CHECK(std::abs(lp[0] - r1) < 1e-10);
    CHECK(std::abs(lp[1] - r2) < 1e-10);
    CHECK(std::abs(lp[0].real() - (-0.1014)) < 1e-4);
}

TEST_CASE("stationarity checks") {
    CHECK(scarma::check_stationarity(kBase).stationary);
    CHECK(scarma::check_stationarity(kPeak).stationary);

    const auto bad_sign = scarma::check_stationarity(CarmaParams(2, 1, {-1.0, 0.25}, {0.5, 1.0}));
    CHECK_FALSE(bad_sign.stationary);
    CHECK_FALSE(bad_sign.negative_real_parts);

    const auto repeated = scarma::check_stationarity(CarmaParams(2, 1, {2.0, 1.0}, {0.5, 1.0}));
    CHECK_FALSE(repeated.stationary);
    CHECK_FALSE(repeated.distinct);

    // b(z) = 1 + z shares the root -1 with a(z) = (z+1)(z+2).
    const auto common = scarma::check_stationarity(CarmaParams(2, 1, {3.0, 2.0}, {1.0, 1.0}));
    CHECK_FALSE(common.stationary);
    CHECK_FALSE(common.coprime);
    CHECK(common.distinct);
    CHECK(common.negative_real_parts);
}

TEST_CASE("matrix exponential against truncated series") {
    const Matrix A = companion_matrix(kBase);
    CHECK((scarma::matrix_exp(A, 0.0) - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() == 0.0);

    const Matrix s1 = scarma::matrix_exp(companion_matrix(CarmaParams(1, 0, {0.7}, {1.0})), 2.0);
    CHECK(s1(0, 0) == doctest::Approx(std::exp(-1.4)).epsilon(1e-12));

    const auto taylor = [](const Matrix& m, double t) {
        Matrix term = Matrix::Identity(m.rows(), m.cols());
        Matrix acc = term;
        for (int k = 1; k <= 40; ++k) {
            term = (term * m * t / static_cast<double>(k)).eval();
            acc += term;
        }
        return acc;
    };
    CHECK((scarma::matrix_exp(A, 1.0) - taylor(A, 1.0)).cwiseAbs().maxCoeff() < 1e-10);

    // Near-repeated spectrum goes through the scaling-and-squaring branch.
    const Matrix rep = scarma::companion_matrix(std::vector<double>{2.0, 1.0 - 1e-12});
    CHECK((scarma::matrix_exp(rep, 1.5) - taylor(rep, 1.5)).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("matrix exponential semigroup property") {
    Rng rng = scarma::make_rng(20260819, 21);
    std::uniform_real_distribution<double> u01;
    for (int k = 0; k < 50; ++k) {
        const Matrix A = companion_matrix(random_stationary_21(rng));
        const double s = 5.0 * u01(rng);
        const double t = 5.0 * u01(rng);
        const Matrix lhs = scarma::matrix_exp(A, s) * scarma::matrix_exp(A, t);
        const Matrix rhs = scarma::matrix_exp(A, s + t);
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("kernel residue weights") {
    const auto kb = scarma::carma_kernel_weights(kBase);
    CHECK(std::abs(kb[0].real() - 0.1636) < 1e-4);
    CHECK(std::abs(kb[1].real() - 0.8364) < 1e-4);
    const auto kp = scarma::carma_kernel_weights(kPeak);
    CHECK(std::abs(kp[0].real() - 0.2400) < 1e-4);
    CHECK(std::abs(kp[1].real() - 0.7600) < 1e-4);
    // For q = p-1 the residues of b(z)/a(z) sum to the leading MA coefficient.
    CHECK((kb[0] + kb[1]).real() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs((kb[0] + kb[1]).imag()) < 1e-14);
}

TEST_CASE("euler simulation decays like the flow on zero noise") {
    const StableParams quiet(1.6524, 0.0, 1e-14, 0.0);
    Rng rng = scarma::make_rng(20260819, 22);
    Vector x0(2);
    x0 << 1.0, -0.5;
    const auto path = scarma::simulate_carma(kBase, quiet, 5.0, 0.001, 1.0, rng, x0);
    REQUIRE(path.times.size() == 6);
    CHECK(path.states[0] == x0);
    const Matrix A = companion_matrix(kBase);
    for (std::size_t i = 1; i < path.times.size(); ++i) {
        const Vector exact = scarma::matrix_exp(A, path.times[i]) * x0;
        CHECK((path.states[i] - exact).cwiseAbs().maxCoeff() < 0.02);
    }
}

TEST_CASE("simulated observations match the model autocorrelation") {
    Rng rng = scarma::make_rng(20260819, 23);
    const auto path = scarma::simulate_carma(kBase, kBaseL, 1461.0, 0.01, 1.0, rng);
    for (int lag = 1; lag <= 5; ++lag) {
        const double rho = scarma::carma_autocorr(kBase, static_cast<double>(lag));
        // Heavy-tailed sampling band at n = 1461.
        CHECK(std::abs(oracle::acf(path.y, lag) - rho) < 0.15);
    }
    Rng rng2 = scarma::make_rng(20260819, 24);
    const auto longer = scarma::simulate_carma(kBase, kBaseL, 100000.0, 0.01, 1.0, rng2);
    for (int lag = 1; lag <= 5; ++lag) {
        const double rho = scarma::carma_autocorr(kBase, static_cast<double>(lag));
        CHECK(std::abs(oracle::acf(longer.y, lag) - rho) < 0.1);
    }
}

TEST_CASE("gaussian driver reproduces the stationary variance") {
    const StableParams gauss(2.0, 0.0, 0.7, 0.0);
    Rng rng = scarma::make_rng(20260819, 25);
    const auto path = scarma::simulate_carma(kBase, gauss, 20000.0, 0.01, 1.0, rng);
    const double target = 2.0 * 0.7 * 0.7 * scarma::carma_autocov(kBase, 0.0);
    CHECK(std::abs(oracle::variance(path.y) - target) < 0.2 * target);
}

TEST_CASE("simulation rejects bad configurations") {
    Rng rng = scarma::make_rng(20260819, 26);
    const CarmaParams unstable(2, 1, {-1.0, 0.25}, {0.5, 1.0});
    CHECK_THROWS_AS(scarma::simulate_carma(unstable, kBaseL, 10.0, 0.01, 1.0, rng),
                    InfeasibleError);
    CHECK_THROWS_AS(scarma::simulate_carma(kBase, kBaseL, 10.0, 0.3, 1.0, rng), InfeasibleError);
    CHECK_THROWS_AS(scarma::simulate_carma(kBase, kBaseL, 10.0, 2.0, 1.0, rng), InfeasibleError);
}

TEST_CASE("autoregressive fit recovers discrete dynamics") {
    Rng rng = scarma::make_rng(20260819, 27);
    const StableParams noise(1.7, 0.0, 1.0, 0.0);
    // Roots 0.6 and 0.5, comfortably away from the AR/MA cancellation region.
    std::vector<double> y(100000, 0.0);
    for (std::size_t n = 2; n < y.size(); ++n)
        y[n] = 1.1 * y[n - 1] - 0.3 * y[n - 2] + sample_stable(noise, rng);
    const auto phi = scarma::estimate_arma_ar(y, 2);
    CHECK(std::abs(phi[0] - 1.1) < 0.05);
    CHECK(std::abs(phi[1] - (-0.3)) < 0.05);

    // AR(1) keeps the plain lag regression.
    std::vector<double> y1(100000, 0.0);
    for (std::size_t n = 1; n < y1.size(); ++n)
        y1[n] = 0.8 * y1[n - 1] + sample_stable(noise, rng);
    const auto phi1 = scarma::estimate_arma_ar(y1, 1);
    CHECK(std::abs(phi1[0] - 0.8) < 0.01);

    // A white series has no autoregressive part to estimate.
    const auto iid = sample_stable(noise, 100000, rng);
    const auto phi0 = scarma::estimate_arma_ar(iid, 2);
    CHECK(std::abs(phi0[0]) < 0.02);
    CHECK(std::abs(phi0[1]) < 0.02);

    CHECK_THROWS_AS(scarma::estimate_arma_ar(std::vector<double>(500, 3.0), 2), EstimationError);
    CHECK_THROWS_AS(scarma::estimate_arma_ar(std::vector<double>{1.0, 2.0}, 2), EstimationError);
}

TEST_CASE("embedding roots map back to eigenvalues") {
    const auto scalar = scarma::ar_from_arma_roots({std::exp(-1.0)}, 1.0);
    CHECK(scalar.lambda[0].real() == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(scalar.a[0] == doctest::Approx(1.0).epsilon(1e-12));

    const double w1 = std::exp(-0.0641), w2 = std::exp(-1.4213);
    const auto table = scarma::ar_from_arma_roots({w1 + w2, -w1 * w2}, 1.0);
    CHECK(std::abs(table.a[0] - 1.4854) < 1e-4);
    CHECK(std::abs(table.a[1] - 0.0911) < 1e-4);

    // Identity on lambda through exact discrete coefficients, real pair and
    // complex-conjugate pair.
    const auto check_round_trip = [](std::complex<double> l1, std::complex<double> l2, double h) {
        const std::complex<double> e1 = std::exp(l1 * h), e2 = std::exp(l2 * h);
        const double phi1 = (e1 + e2).real();
        const double phi2 = -(e1 * e2).real();
        const auto rt = scarma::ar_from_arma_roots({phi1, phi2}, h);
        CHECK(std::abs(rt.lambda[0] - l1) < 1e-10);
        CHECK(std::abs(rt.lambda[1] - l2) < 1e-10);
    };
    check_round_trip({-0.0641, 0.0}, {-1.4213, 0.0}, 1.0);
    check_round_trip({-0.3, 0.9}, {-0.3, -0.9}, 1.0);
    check_round_trip({-0.0641, 0.0}, {-1.4213, 0.0}, 0.5);

    // Halving h doubles every lambda at fixed discrete roots.
    const auto full = scarma::ar_from_arma_roots({w1 + w2, -w1 * w2}, 1.0);
    const auto half = scarma::ar_from_arma_roots({w1 + w2, -w1 * w2}, 0.5);
    CHECK(half.lambda[0].real() == doctest::Approx(2.0 * full.lambda[0].real()).epsilon(1e-12));
    CHECK(half.lambda[1].real() == doctest::Approx(2.0 * full.lambda[1].real()).epsilon(1e-12));

    CHECK_THROWS_AS(scarma::ar_from_arma_roots({1.0, 0.0}, 1.0), EstimationError);
    CHECK_THROWS_AS(scarma::ar_from_arma_roots({1.0, -0.25}, 1.0), EstimationError);
}

TEST_CASE("stationary autocovariance") {
    CHECK(scarma::carma_autocorr(kBase, 0.0) == doctest::Approx(1.0).epsilon(1e-14));

    const CarmaParams ou(1, 0, {0.8}, {1.0});
    for (const double s : {0.5, 1.0, 3.0})
        CHECK(scarma::carma_autocorr(ou, s) == doctest::Approx(std::exp(-0.8 * s)).epsilon(1e-10));

    Rng rng = scarma::make_rng(20260819, 28);
    for (int k = 0; k < 50; ++k) {
        const CarmaParams params = k == 0 ? kBase : random_stationary_21(rng);
        const Matrix sigma = scarma::stationary_state_cov(params.a);
        const Matrix A = companion_matrix(params);
        Matrix rhs = Matrix::Zero(2, 2);
        rhs(1, 1) = 1.0;
        const Matrix residual = A * sigma + sigma * A.transpose() + rhs;
        CHECK(residual.cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("autocorrelation of a gaussian-driven path matches the model") {
    const StableParams gauss(2.0, 0.0, 1.0, 0.0);
    Rng rng = scarma::make_rng(20260819, 29);
    const auto path = scarma::simulate_carma(kBase, gauss, 20000.0, 0.01, 1.0, rng);
    for (int lag = 1; lag <= 3; ++lag)
        CHECK(std::abs(oracle::acf(path.y, lag) -
                       scarma::carma_autocorr(kBase, static_cast<double>(lag))) < 0.05);
}

TEST_CASE("moving-average fit from autocorrelations") {
    const auto fixed = scarma::estimate_ma_b({0.8}, 0, std::vector<double>{0.4, 0.2}, 1.0);
    CHECK(fixed == std::vector<double>{1.0});

    // Noiseless inverse problem: the model's own autocorrelation pins b0.
    std::vector<double> rho(20);
    for (int k = 1; k <= 20; ++k)
        rho[static_cast<std::size_t>(k - 1)] = scarma::carma_autocorr(kBase, static_cast<double>(k));
    const auto b = scarma::estimate_ma_b(kBase.a, 1, rho, 1.0);
    CHECK(std::abs(b[0] - 0.2861) < 1e-4);
    CHECK(b[1] == 1.0);

    // Simulated series: recover b0 from the empirical autocorrelation.
    Rng rng = scarma::make_rng(20260819, 30);
    const auto path = scarma::simulate_carma(kBase, kBaseL, 100000.0, 0.01, 1.0, rng);
    std::vector<double> rho_hat(20);
    for (int k = 1; k <= 20; ++k) rho_hat[static_cast<std::size_t>(k - 1)] = oracle::acf(path.y, k);
    const auto b_hat = scarma::estimate_ma_b(kBase.a, 1, rho_hat, 1.0);
    CHECK(std::abs(b_hat[0] - 0.2861) < 0.1);

    CHECK_THROWS_AS(scarma::estimate_ma_b({-1.0, 0.25}, 1, rho, 1.0), EstimationError);
    CHECK_THROWS_AS(scarma::estimate_ma_b({0.8}, 0, std::vector<double>{}, 1.0), EstimationError);
}

TEST_CASE("noise recovery is the exact inverse of the recursion") {
    Rng rng = scarma::make_rng(20260819, 31);
    std::normal_distribution<double> n01;
    const double l1 = -0.0641, l2 = -1.4213;
    const double phi1 = std::exp(l1) + std::exp(l2);
    const double phi2 = -std::exp(l1 + l2);
    std::vector<double> eps(5000), y(5000, 0.0);
    for (auto& e : eps) e = n01(rng);
    for (std::size_t n = 2; n < y.size(); ++n)
        y[n] = phi1 * y[n - 1] + phi2 * y[n - 2] + eps[n];
    const auto rec = scarma::recover_noise(y, {{l1, 0.0}, {l2, 0.0}}, 1.0);
    REQUIRE(rec.eps.size() == y.size() - 2);
    for (std::size_t i = 0; i < rec.eps.size(); ++i)
        CHECK(std::abs(rec.eps[i] - eps[i + 2]) < 1e-12);
}

TEST_CASE("recovered innovations are p-dependent") {
    Rng rng = scarma::make_rng(20260819, 32);
    const auto path = scarma::simulate_carma(kBase, kBaseL, 20000.0, 0.01, 1.0, rng);
    const auto lam = scarma::eigenvalues(companion_matrix(kBase));
    const auto rec = scarma::recover_noise(path.y, lam, 1.0);
    for (int lag = 3; lag <= 6; ++lag) CHECK(std::abs(oracle::acf(rec.eps, lag)) < 0.1);
}

TEST_CASE("gaussian innovation variance matches the kernel quadrature") {
    const StableParams gauss(2.0, 0.0, 1.0, 0.0);
    Rng rng = scarma::make_rng(20260819, 33);
    const auto path = scarma::simulate_carma(kBase, gauss, 20000.0, 0.01, 1.0, rng);
    const auto lam = scarma::eigenvalues(companion_matrix(kBase));
    const auto rec = scarma::recover_noise(path.y, lam, 1.0);

    // Var(eps) = 2 gamma^2 (int_0^1 G1^2 + G2^2), with the one-cell kernels
    // written out literally and the residues kappa_i = b(lambda_i)/a'(lambda_i)
    // computed by hand.
    const double l1 = lam[0].real(), l2 = lam[1].real();
    const double k1 = (0.2861 + l1) / (2.0 * l1 + 1.4854);
    const double k2 = (0.2861 + l2) / (2.0 * l2 + 1.4854);
    const auto g1 = [&](double w) { return k1 * std::exp(l1 * w) + k2 * std::exp(l2 * w); };
    const auto g2 = [&](double w) {
        return k1 * std::exp(l2) * std::exp(l1 * w) + k2 * std::exp(l1) * std::exp(l2 * w);
    };
    const double target =
        2.0 * oracle::simpson([&](double w) { return g1(w) * g1(w) + g2(w) * g2(w); }, 0.0, 1.0, 400);
    CHECK(std::abs(oracle::variance(rec.eps) - target) < 0.05 * target);
}

TEST_CASE("innovation law round trip") {
    Rng rng = scarma::make_rng(20260819, 34);
    std::uniform_real_distribution<double> u01;
    for (int k = 0; k < 40; ++k) {
        const CarmaParams params = random_stationary_21(rng);
        const StableParams driver(1.1 + 0.85 * u01(rng), -0.9 + 1.8 * u01(rng),
                                  0.2 + 5.0 * u01(rng), -1.0 + 2.0 * u01(rng));
        const auto eps = scarma::epsilon_stable_params(params, driver, 1.0);
        const auto back = scarma::map_epsilon_to_L(eps, params, 1.0);
        CAPTURE(k);
        CHECK(std::abs(back.alpha - driver.alpha) < 1e-12);
        CHECK(std::abs(back.beta - driver.beta) < 1e-8);
        CHECK(std::abs(back.gamma - driver.gamma) < 1e-8 * driver.gamma);
        CHECK(std::abs(back.mu - driver.mu) < 1e-8 * std::max(1.0, std::abs(driver.mu)));
    }

    // Positive kernels shrink the skewness: the two stable integrals pull in
    // opposite directions, so |beta_eps| < |beta_L| with matching sign.
    const auto eps_b = scarma::epsilon_stable_params(kBase, kBaseL, 1.0);
    CHECK(eps_b.alpha == kBaseL.alpha);
    CHECK(eps_b.beta > 0.0);
    CHECK(eps_b.beta < kBaseL.beta);
    CHECK(eps_b.gamma > 0.0);

    const CarmaParams p30(3, 1, {1.0, 0.3, 0.02}, {0.4, 1.0, 0.0});
    CHECK_THROWS_AS(scarma::epsilon_stable_params(p30, kBaseL, 1.0), InfeasibleError);
    CHECK_THROWS_AS(scarma::map_epsilon_to_L(kBaseL, p30, 1.0), InfeasibleError);
}

TEST_CASE("innovation scale matches a simulated path") {
    Rng rng = scarma::make_rng(20260819, 35);
    const auto path = scarma::simulate_carma(kBase, kBaseL, 30000.0, 0.01, 1.0, rng);
    const auto lam = scarma::eigenvalues(companion_matrix(kBase));
    const auto rec = scarma::recover_noise(path.y, lam, 1.0);
    const auto fit = scarma::estimate_stable(rec.eps);
    const auto eps_law = scarma::epsilon_stable_params(kBase, kBaseL, 1.0);
    CAPTURE(fit.params.alpha);
    CAPTURE(fit.params.gamma);
    CHECK(std::abs(fit.params.alpha - eps_law.alpha) < 0.1);
    CHECK(std::abs(fit.params.gamma - eps_law.gamma) < 0.1 * eps_law.gamma);
    CHECK(std::abs(fit.params.beta - eps_law.beta) < 0.2);
    CHECK(std::abs(fit.params.mu - eps_law.mu) < 0.15);

    const auto driver_hat = scarma::map_epsilon_to_L(fit.params, kBase, 1.0);
    CHECK(std::abs(driver_hat.alpha - kBaseL.alpha) < 0.1);
    CHECK(std::abs(driver_hat.gamma - kBaseL.gamma) < 0.15 * kBaseL.gamma);
    CHECK(std::abs(driver_hat.beta - kBaseL.beta) < 0.35);
}

TEST_CASE("carma embedding round trip from a simulated path") {
    Rng rng = scarma::make_rng(20260819, 36);
    const auto path = scarma::simulate_carma(kBase, kBaseL, 100000.0, 0.01, 1.0, rng);
    const auto phi = scarma::estimate_arma_ar(path.y, 2);
    const auto roots = scarma::ar_from_arma_roots(phi, 1.0);
    CHECK(std::abs(roots.lambda[0].real() - (-0.0641)) < 0.05);
    CHECK(std::abs(roots.lambda[1].real() - (-1.4213)) < 0.05);
}
