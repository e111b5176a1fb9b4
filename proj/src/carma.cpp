#include "scarma/carma.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_fft_real.h>
#include <unsupported/Eigen/MatrixFunctions>

#include "scarma/errors.hpp"
#include "scarma/numerics.hpp"

namespace scarma {

namespace {

using Complex = std::complex<double>;

void sort_by_real_desc(std::vector<Complex>& v) {
    std::sort(v.begin(), v.end(), [](const Complex& l, const Complex& r) {
        if (l.real() != r.real()) return l.real() > r.real();
        return l.imag() > r.imag();
    });
}

// Relative minimal pairwise gap, in units of the largest magnitude.
double relative_separation(const std::vector<Complex>& v) {
    double scale = 0.0;
    for (const Complex& z : v) scale = std::max(scale, std::abs(z));
    if (scale == 0.0) return 0.0;
    double sep = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = i + 1; j < v.size(); ++j)
            sep = std::min(sep, std::abs(v[i] - v[j]));
    return v.size() < 2 ? std::numeric_limits<double>::infinity() : sep / scale;
}

Complex poly_eval(const std::vector<double>& coeffs_low_first, Complex z) {
    Complex acc(0.0, 0.0);
    for (std::size_t j = coeffs_low_first.size(); j-- > 0;)
        acc = acc * z + coeffs_low_first[j];
    return acc;
}

// Expand prod_i (x - r_i) into monic coefficients (x^p + c_1 x^{p-1} + ... + c_p),
// requiring the imaginary residue to cancel.
std::vector<double> expand_monic_real(const std::vector<Complex>& roots,
                                      const char* caller) {
    std::vector<Complex> poly = {Complex(1.0, 0.0)};
    for (const Complex& r : roots) {
        std::vector<Complex> next(poly.size() + 1, Complex(0.0, 0.0));
        for (std::size_t j = 0; j < poly.size(); ++j) {
            next[j] += poly[j];
            next[j + 1] -= poly[j] * r;
        }
        poly = std::move(next);
    }
    std::vector<double> out(roots.size());
    for (std::size_t k = 1; k < poly.size(); ++k) {
        if (std::abs(poly[k].imag()) > 1e-8 * std::max(1.0, std::abs(poly[k].real()))) {
            std::ostringstream msg;
            msg << caller << ": eigenvalues do not form conjugate pairs (imaginary residue "
                << poly[k].imag() << " in coefficient " << k << ")";
            throw EstimationError(msg.str());
        }
        out[k - 1] = poly[k].real();
    }
    return out;
}

Vector b_vector(const CarmaParams& params) {
    Vector b(params.p);
    for (int j = 0; j < params.p; ++j) b[j] = params.b[static_cast<std::size_t>(j)];
    return b;
}

// Stationary state covariance at unit driver-variance scale:
// A Sigma + Sigma A* + e_p e_p* = 0 via the Kronecker-vectorized system.
Matrix lyapunov_state_cov(const std::vector<double>& a) {
    const Matrix A = companion_matrix(a);
    const int p = static_cast<int>(A.rows());
    Matrix M = Matrix::Zero(p * p, p * p);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j)
            for (int k = 0; k < p; ++k) {
                M(i + p * j, k + p * j) += A(i, k);  // (I kron A) vec
                M(i + p * j, i + p * k) += A(j, k);  // (A kron I) vec
            }
    Vector rhs = Vector::Zero(p * p);
    rhs[(p - 1) + p * (p - 1)] = -1.0;
    const Eigen::FullPivLU<Matrix> lu(M);
    if (!lu.isInvertible())
        throw EstimationError("carma_autocov: singular Lyapunov system (eigenvalue sum zero?)");
    const Vector sigma_vec = lu.solve(rhs);
    Matrix sigma(p, p);
    for (int j = 0; j < p; ++j)
        for (int i = 0; i < p; ++i) sigma(i, j) = sigma_vec[i + p * j];
    return sigma;
}

void require_stationary_ar(const std::vector<double>& a, const char* caller) {
    const auto lam = eigenvalues(companion_matrix(a));
    double max_re = -std::numeric_limits<double>::infinity();
    for (const Complex& l : lam) max_re = std::max(max_re, l.real());
    if (!(max_re < 0.0) || relative_separation(lam) <= 1e-8) {
        std::ostringstream msg;
        msg << caller << ": AR part is not stationary with distinct eigenvalues"
            << " (max real part " << max_re << ", relative separation "
            << relative_separation(lam) << ")";
        throw EstimationError(msg.str());
    }
}

struct KernelIntegrals {
    double abs_pow = 0.0;  // int |G1|^alpha + |G2|^alpha
    double sgn_pow = 0.0;  // int G1^<alpha> - G2^<alpha>
    double lin = 0.0;      // int G1 - G2
};

double signed_pow(double x, double alpha) {
    return x >= 0.0 ? std::pow(x, alpha) : -std::pow(-x, alpha);
}

// One-cell kernels of the recovered (2,1) innovation: eps over cell n is
// int_0^h G1 dL minus an independent copy weighted by G2.
KernelIntegrals kernel_integrals(const CarmaParams& params, double alpha, double h) {
    const auto lam = eigenvalues(companion_matrix(params.a));
    const auto kap = carma_kernel_weights(params);
    const Complex e1h = std::exp(lam[0] * h);
    const Complex e2h = std::exp(lam[1] * h);
    const auto g1 = [&](double w) {
        return (kap[0] * std::exp(lam[0] * w) + kap[1] * std::exp(lam[1] * w)).real();
    };
    const auto g2 = [&](double w) {
        return (kap[0] * e2h * std::exp(lam[0] * w) + kap[1] * e1h * std::exp(lam[1] * w)).real();
    };
    KernelIntegrals out;
    out.abs_pow = num::gauss_legendre(
        [&](double w) { return std::pow(std::abs(g1(w)), alpha) + std::pow(std::abs(g2(w)), alpha); },
        0.0, h, 64);
    out.sgn_pow = num::gauss_legendre(
        [&](double w) { return signed_pow(g1(w), alpha) - signed_pow(g2(w), alpha); }, 0.0, h, 64);
    out.lin = num::gauss_legendre([&](double w) { return g1(w) - g2(w); }, 0.0, h, 64);
    return out;
}

void require_two_one(const CarmaParams& params, const char* caller) {
    if (params.p != 2 || params.q != 1)
        throw InfeasibleError(std::string(caller) +
                              ": innovation law implemented for the (2,1) model only");
}

double sample_acf(std::span<const double> y, int lag) {
    const std::size_t n = y.size();
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= static_cast<double>(n);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = y[i] - mean;
        den += d * d;
        if (i + static_cast<std::size_t>(lag) < n)
            num += d * (y[i + static_cast<std::size_t>(lag)] - mean);
    }
    return num / den;
}

// Levinson chart between partial correlations in (-1,1) and the coefficients
// of a polynomial 1 - c_1 z - ... - c_k z^k with all roots outside the unit
// circle. poly_to_pac returns empty when the input falls off the chart.
std::vector<double> pac_to_poly(const std::vector<double>& r) {
    std::vector<double> c;
    for (std::size_t k = 0; k < r.size(); ++k) {
        std::vector<double> next(k + 1);
        next[k] = r[k];
        for (std::size_t j = 0; j < k; ++j) next[j] = c[j] - r[k] * c[k - 1 - j];
        c = std::move(next);
    }
    return c;
}

std::vector<double> poly_to_pac(std::vector<double> c) {
    std::vector<double> r(c.size());
    for (std::size_t k = c.size(); k-- > 0;) {
        r[k] = c[k];
        if (!(std::abs(r[k]) < 0.999)) return {};
        std::vector<double> prev(k);
        const double d = 1.0 - r[k] * r[k];
        for (std::size_t j = 0; j < k; ++j) prev[j] = (c[j] + r[k] * c[k - 1 - j]) / d;
        c = std::move(prev);
    }
    return r;
}

// Whittle fit of an ARMA(p, p-1): minimize sum_j I(w_j) |phi(e^-iw)|^2 / |theta(e^-iw)|^2
// over the periodogram frequencies. Stationarity and invertibility are kept by
// optimizing partial correlations through tanh. Returns the AR coefficients.
std::vector<double> whittle_ar(std::span<const double> y, int p) {
    const int q = p - 1;
    const std::size_t n = y.size();

    // A white series carries no autoregression; report the trivial polynomial
    // instead of wandering the AR/MA cancellation ridge.
    double corr_peak = 0.0;
    for (int s = 1; s <= 20; ++s) corr_peak = std::max(corr_peak, std::abs(sample_acf(y, s)));
    if (corr_peak < 0.03) return std::vector<double>(static_cast<std::size_t>(p), 0.0);

    std::vector<double> data(y.begin(), y.end());
    double mean = 0.0;
    for (double v : data) mean += v;
    mean /= static_cast<double>(n);
    for (double& v : data) v -= mean;

    gsl_fft_real_wavetable* wavetable = gsl_fft_real_wavetable_alloc(n);
    gsl_fft_real_workspace* workspace = gsl_fft_real_workspace_alloc(n);
    int fft_status = GSL_ENOMEM;
    if (wavetable != nullptr && workspace != nullptr)
        fft_status = gsl_fft_real_transform(data.data(), 1, n, wavetable, workspace);
    if (wavetable != nullptr) gsl_fft_real_wavetable_free(wavetable);
    if (workspace != nullptr) gsl_fft_real_workspace_free(workspace);
    if (fft_status != 0)
        throw EstimationError("estimate_arma_ar: periodogram transform failed");

    // Half-complex layout: coefficient j sits at (data[2j-1], data[2j]).
    const std::size_t m = (n - 1) / 2;
    std::vector<double> pgram(m);
    Matrix cos_t(m, p), sin_t(m, p);
    for (std::size_t j = 1; j <= m; ++j) {
        const double re = data[2 * j - 1], im = data[2 * j];
        pgram[j - 1] = re * re + im * im;
        const double w = 2.0 * M_PI * static_cast<double>(j) / static_cast<double>(n);
        for (int k = 1; k <= p; ++k) {
            cos_t(static_cast<long>(j - 1), k - 1) = std::cos(k * w);
            sin_t(static_cast<long>(j - 1), k - 1) = std::sin(k * w);
        }
    }

    const auto objective = [&](const std::vector<double>& t) {
        std::vector<double> r_ar(static_cast<std::size_t>(p));
        for (int k = 0; k < p; ++k) r_ar[static_cast<std::size_t>(k)] = std::tanh(t[static_cast<std::size_t>(k)]);
        const std::vector<double> phi = pac_to_poly(r_ar);
        std::vector<double> r_ma(static_cast<std::size_t>(q));
        for (int k = 0; k < q; ++k)
            r_ma[static_cast<std::size_t>(k)] = 0.995 * std::tanh(t[static_cast<std::size_t>(p + k)]);
        const std::vector<double> cm = pac_to_poly(r_ma);

        double s = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            double ar_re = 1.0, ar_im = 0.0;
            for (int k = 0; k < p; ++k) {
                ar_re -= phi[static_cast<std::size_t>(k)] * cos_t(static_cast<long>(j), k);
                ar_im += phi[static_cast<std::size_t>(k)] * sin_t(static_cast<long>(j), k);
            }
            double ma_re = 1.0, ma_im = 0.0;
            for (int k = 0; k < q; ++k) {
                ma_re -= cm[static_cast<std::size_t>(k)] * cos_t(static_cast<long>(j), k);
                ma_im += cm[static_cast<std::size_t>(k)] * sin_t(static_cast<long>(j), k);
            }
            s += pgram[j] * (ar_re * ar_re + ar_im * ar_im) / (ma_re * ma_re + ma_im * ma_im);
        }
        return s;
    };

    // Start from the autocorrelation recursion beyond the moving-average
    // horizon (valid at lags >= p), mapped into the chart; zeros on failure.
    std::vector<double> start(static_cast<std::size_t>(p + q), 0.0);
    {
        const int K = 25;
        std::vector<double> rho(static_cast<std::size_t>(K + 1));
        rho[0] = 1.0;
        for (int s = 1; s <= K; ++s) rho[static_cast<std::size_t>(s)] = sample_acf(y, s);
        Matrix X(K - p + 1, p);
        Vector t(K - p + 1);
        for (int s = p; s <= K; ++s) {
            t[s - p] = rho[static_cast<std::size_t>(s)];
            for (int k = 1; k <= p; ++k) X(s - p, k - 1) = rho[static_cast<std::size_t>(s - k)];
        }
        const Vector guess = X.colPivHouseholderQr().solve(t);
        const auto pac = poly_to_pac(std::vector<double>(guess.data(), guess.data() + p));
        if (!pac.empty())
            for (int k = 0; k < p; ++k)
                start[static_cast<std::size_t>(k)] = std::atanh(std::clamp(pac[static_cast<std::size_t>(k)], -0.95, 0.95));
    }

    // A single simplex run can stall on the heavy-tailed periodograms this
    // estimator sees; restarting from the incumbent with a fresh simplex
    // recovers those cases without loosening the tolerance.
    num::SimplexResult result;
    std::vector<double> from = start;
    double width = 0.3;
    int spent = 0;
    for (int round = 0; round < 4; ++round) {
        result = num::nelder_mead(objective, from,
                                  std::vector<double>(static_cast<std::size_t>(p + q), width),
                                  1e-10, 4000);
        spent += result.iterations;
        if (result.converged) break;
        from = result.x;
        width *= 0.5;
    }
    if (!result.converged)
        throw EstimationError("estimate_arma_ar: spectral objective did not converge after " +
                              std::to_string(spent) + " iterations");
    std::vector<double> r_ar(static_cast<std::size_t>(p));
    for (int k = 0; k < p; ++k) r_ar[static_cast<std::size_t>(k)] = std::tanh(result.x[static_cast<std::size_t>(k)]);
    return pac_to_poly(r_ar);
}

}  // namespace

CarmaParams::CarmaParams(int p_, int q_, std::vector<double> a_, std::vector<double> b_)
    : p(p_), q(q_), a(std::move(a_)), b(std::move(b_)) {
    if (p < 1) throw InfeasibleError("CarmaParams: p must be at least 1");
    if (q < 0 || q >= p) throw InfeasibleError("CarmaParams: require 0 <= q < p");
    if (a.size() != static_cast<std::size_t>(p))
        throw InfeasibleError("CarmaParams: a must have p entries");
    if (b.size() != static_cast<std::size_t>(p))
        throw InfeasibleError("CarmaParams: b must have p entries");
    for (double v : a)
        if (!std::isfinite(v)) throw InfeasibleError("CarmaParams: non-finite AR coefficient");
    for (double v : b)
        if (!std::isfinite(v)) throw InfeasibleError("CarmaParams: non-finite MA coefficient");
    if (std::abs(b[static_cast<std::size_t>(q)] - 1.0) > 1e-12)
        throw InfeasibleError("CarmaParams: b_q must equal 1");
    for (int j = q + 1; j < p; ++j)
        if (std::abs(b[static_cast<std::size_t>(j)]) > 1e-12)
            throw InfeasibleError("CarmaParams: b_j must vanish for j > q");
}

Matrix companion_matrix(const std::vector<double>& a) {
    const int p = static_cast<int>(a.size());
    Matrix A = Matrix::Zero(p, p);
    for (int i = 0; i + 1 < p; ++i) A(i, i + 1) = 1.0;
    for (int j = 0; j < p; ++j) A(p - 1, j) = -a[static_cast<std::size_t>(p - 1 - j)];
    return A;
}

Matrix companion_matrix(const CarmaParams& params) { return companion_matrix(params.a); }

std::vector<Complex> eigenvalues(const Matrix& A) {
    if (A.rows() != A.cols()) throw InfeasibleError("eigenvalues: matrix must be square");
    const Eigen::EigenSolver<Matrix> es(A, false);
    std::vector<Complex> out(static_cast<std::size_t>(A.rows()));
    for (int i = 0; i < A.rows(); ++i) out[static_cast<std::size_t>(i)] = es.eigenvalues()[i];
    sort_by_real_desc(out);
    return out;
}

StationarityReport check_stationarity(const CarmaParams& params) {
    StationarityReport rep;
    rep.lambda = eigenvalues(companion_matrix(params));
    rep.min_separation = relative_separation(rep.lambda);
    rep.max_real_part = -std::numeric_limits<double>::infinity();
    for (const Complex& l : rep.lambda) rep.max_real_part = std::max(rep.max_real_part, l.real());
    rep.distinct = rep.min_separation > 1e-8;
    rep.negative_real_parts = rep.max_real_part < 0.0;

    // a(z), b(z) coprime: no eigenvalue may be a root of b.
    rep.coprime = true;
    std::vector<double> b_low(params.b.begin(), params.b.end());
    double b_scale = 0.0;
    for (double v : b_low) b_scale = std::max(b_scale, std::abs(v));
    for (const Complex& l : rep.lambda)
        if (std::abs(poly_eval(b_low, l)) < 1e-10 * std::max(1.0, b_scale)) rep.coprime = false;

    rep.stationary = rep.distinct && rep.negative_real_parts && rep.coprime;
    std::ostringstream detail;
    detail << (rep.stationary ? "stationary" : "not stationary") << ": eigenvalues";
    for (const Complex& l : rep.lambda) detail << " (" << l.real() << "," << l.imag() << ")";
    if (!rep.distinct) detail << "; repeated spectrum (relative separation " << rep.min_separation << ")";
    if (!rep.negative_real_parts) detail << "; max real part " << rep.max_real_part << " >= 0";
    if (!rep.coprime) detail << "; a(z) and b(z) share a root";
    rep.detail = detail.str();
    return rep;
}

Matrix matrix_exp(const Matrix& A, double t) {
    if (A.rows() != A.cols()) throw InfeasibleError("matrix_exp: matrix must be square");
    if (t == 0.0) return Matrix::Identity(A.rows(), A.cols());
    const Eigen::EigenSolver<Matrix> es(A);
    std::vector<Complex> lam(static_cast<std::size_t>(A.rows()));
    for (int i = 0; i < A.rows(); ++i) lam[static_cast<std::size_t>(i)] = es.eigenvalues()[i];
    if (relative_separation(lam) > 1e-6) {
        const Eigen::MatrixXcd V = es.eigenvectors();
        Eigen::VectorXcd d(A.rows());
        for (int i = 0; i < A.rows(); ++i) d[i] = std::exp(es.eigenvalues()[i] * t);
        const Eigen::MatrixXcd E = V * d.asDiagonal() * V.inverse();
        if (E.allFinite()) return E.real();
    }
    return (A * t).exp();  // scaling-and-squaring for near-repeated spectra
}

std::vector<Complex> carma_kernel_weights(const CarmaParams& params) {
    const auto lam = eigenvalues(companion_matrix(params));
    std::vector<double> b_low(params.b.begin(), params.b.end());
    std::vector<Complex> out(lam.size());
    for (std::size_t i = 0; i < lam.size(); ++i) {
        // a'(z) with a(z) = z^p + a_1 z^{p-1} + ... + a_p
        Complex deriv(0.0, 0.0);
        const int p = params.p;
        for (int k = 0; k <= p - 1; ++k) {
            const double coeff = k == 0 ? 1.0 : params.a[static_cast<std::size_t>(k - 1)];
            deriv += coeff * static_cast<double>(p - k) * std::pow(lam[i], p - k - 1);
        }
        out[i] = poly_eval(b_low, lam[i]) / deriv;
    }
    return out;
}

CarmaPath simulate_carma(const CarmaParams& params, const StableParams& driver, double horizon,
                         double fine_step, double obs_step, Rng& rng,
                         const std::optional<Vector>& x0) {
    const StationarityReport rep = check_stationarity(params);
    if (!rep.stationary) throw InfeasibleError("simulate_carma: " + rep.detail);
    if (!(fine_step > 0.0) || !(obs_step >= fine_step))
        throw InfeasibleError("simulate_carma: require 0 < fine_step <= obs_step");
    const double ratio_real = obs_step / fine_step;
    const long ratio = std::lround(ratio_real);
    if (std::abs(ratio_real - static_cast<double>(ratio)) > 1e-9 * ratio_real)
        throw InfeasibleError("simulate_carma: obs_step must be an integer multiple of fine_step");
    const long n_obs = static_cast<long>(std::floor(horizon / obs_step + 1e-9));
    const long n_fine = n_obs * ratio;
    if (n_fine > 500000000L) throw InfeasibleError("simulate_carma: grid exceeds memory budget");

    const Matrix A = companion_matrix(params);
    const Vector b = b_vector(params);
    const int p = params.p;
    const StableParams inc(driver.alpha, driver.beta,
                           driver.gamma * std::pow(fine_step, 1.0 / driver.alpha),
                           driver.mu * fine_step);

    Vector x = Vector::Zero(p);
    if (x0) {
        if (x0->size() != p) throw InfeasibleError("simulate_carma: x0 dimension mismatch");
        x = *x0;
    } else {
        const long burn = static_cast<long>(std::ceil(10.0 / std::abs(rep.max_real_part) / fine_step));
        Vector ax(p);
        for (long k = 0; k < burn; ++k) {
            ax.noalias() = A * x;
            x += fine_step * ax;
            x[p - 1] += sample_stable(inc, rng);
        }
    }

    CarmaPath path;
    path.times.reserve(static_cast<std::size_t>(n_obs) + 1);
    path.states.reserve(static_cast<std::size_t>(n_obs) + 1);
    path.y.reserve(static_cast<std::size_t>(n_obs) + 1);
    const auto record = [&](long obs_index) {
        path.times.push_back(static_cast<double>(obs_index) * obs_step);
        path.states.push_back(x);
        path.y.push_back(b.dot(x));
    };
    record(0);
    Vector ax(p);
    for (long k = 1; k <= n_fine; ++k) {
        ax.noalias() = A * x;
        x += fine_step * ax;
        x[p - 1] += sample_stable(inc, rng);
        if (k % ratio == 0) record(k / ratio);
    }
    return path;
}

std::vector<double> estimate_arma_ar(std::span<const double> y, int p) {
    if (p < 1) throw InfeasibleError("estimate_arma_ar: p must be at least 1");
    const long n = static_cast<long>(y.size());
    if (n < 10L * p)
        throw EstimationError("estimate_arma_ar: need at least 10p observations, got " +
                              std::to_string(n));
    for (double v : y)
        if (!std::isfinite(v)) throw EstimationError("estimate_arma_ar: non-finite observation");
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= static_cast<double>(n);
    double spread = 0.0;
    for (double v : y) spread = std::max(spread, std::abs(v - mean));
    if (spread <= 1e-12 * std::max(1.0, std::abs(mean)))
        throw EstimationError("estimate_arma_ar: constant series carries no dynamics");

    if (p == 1) {
        // An AR(1) observation grid has independent innovations, so the plain
        // lag regression is consistent even without second moments.
        double num = 0.0, den = 0.0;
        for (long i = 1; i < n; ++i) {
            num += y[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(i - 1)];
            den += y[static_cast<std::size_t>(i - 1)] * y[static_cast<std::size_t>(i - 1)];
        }
        if (den <= 0.0) throw EstimationError("estimate_arma_ar: degenerate lag variance");
        return {num / den};
    }
    // For p >= 2 the sampled process is an ARMA(p, p-1): its innovations are
    // serially dependent, which contaminates a regression on adjacent lags.
    // The AR polynomial is fitted through the Whittle periodogram objective
    // instead, which stays consistent for heavy-tailed drivers.
    return whittle_ar(y, p);
}

ArRoots ar_from_arma_roots(const std::vector<double>& phi, double h) {
    if (phi.empty()) throw InfeasibleError("ar_from_arma_roots: empty coefficient vector");
    if (!(h > 0.0)) throw InfeasibleError("ar_from_arma_roots: grid spacing must be positive");
    // Roots w_i of w^p - phi_1 w^{p-1} - ... - phi_p, i.e. the companion of
    // monic coefficients c_k = -phi_k.
    std::vector<double> c(phi.size());
    for (std::size_t k = 0; k < phi.size(); ++k) c[k] = -phi[k];
    const auto w = eigenvalues(companion_matrix(c));
    for (const Complex& wi : w)
        if (std::abs(wi) >= 1.0)
            throw EstimationError(
                "ar_from_arma_roots: embedding root on or outside the stationary region "
                "(|w| >= 1, non-stationary discrete dynamics)");
    if (relative_separation(w) <= 1e-8)
        throw EstimationError("ar_from_arma_roots: repeated embedding roots");

    ArRoots out;
    out.lambda.resize(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) out.lambda[i] = std::log(w[i]) / h;
    sort_by_real_desc(out.lambda);
    out.a = expand_monic_real(out.lambda, "ar_from_arma_roots");
    return out;
}

Matrix stationary_state_cov(const std::vector<double>& a) {
    require_stationary_ar(a, "stationary_state_cov");
    return lyapunov_state_cov(a);
}

double carma_autocov(const CarmaParams& params, double s) {
    const StationarityReport rep = check_stationarity(params);
    if (!rep.stationary) throw InfeasibleError("carma_autocov: " + rep.detail);
    const Matrix sigma = lyapunov_state_cov(params.a);
    const Vector b = b_vector(params);
    const Matrix E = matrix_exp(companion_matrix(params), std::abs(s));
    return b.dot(E * sigma * b);
}

double carma_autocorr(const CarmaParams& params, double s) {
    return carma_autocov(params, s) / carma_autocov(params, 0.0);
}

std::vector<double> estimate_ma_b(const std::vector<double>& a, int q,
                                  std::span<const double> empirical_acf, double h) {
    const int p = static_cast<int>(a.size());
    if (p < 1 || q < 0 || q >= p) throw InfeasibleError("estimate_ma_b: require 0 <= q < p");
    const int K = static_cast<int>(empirical_acf.size());
    if (K < q + 1)
        throw EstimationError("estimate_ma_b: need at least q+1 autocorrelation lags");
    if (!(h > 0.0)) throw InfeasibleError("estimate_ma_b: grid spacing must be positive");
    require_stationary_ar(a, "estimate_ma_b");

    std::vector<double> b(static_cast<std::size_t>(p), 0.0);
    b[static_cast<std::size_t>(q)] = 1.0;
    if (q == 0) return b;

    const Matrix sigma = lyapunov_state_cov(a);
    const Matrix E1 = matrix_exp(companion_matrix(a), h);
    std::vector<Matrix> Ek(static_cast<std::size_t>(K));
    Ek[0] = E1;
    for (int k = 1; k < K; ++k) Ek[static_cast<std::size_t>(k)] = Ek[static_cast<std::size_t>(k - 1)] * E1;

    const auto objective = [&](const std::vector<double>& free) {
        Vector bv = Vector::Zero(p);
        for (int j = 0; j < q; ++j) bv[j] = free[static_cast<std::size_t>(j)];
        bv[q] = 1.0;
        const double var = bv.dot(sigma * bv);
        if (!(var > 0.0)) return 1e300;
        double loss = 0.0;
        for (int k = 0; k < K; ++k) {
            const double rho = bv.dot(Ek[static_cast<std::size_t>(k)] * sigma * bv) / var;
            loss += std::abs(empirical_acf[static_cast<std::size_t>(k)] - rho);
        }
        return std::isfinite(loss) ? loss : 1e300;
    };

    // The autocorrelation only sees |b(i omega)|^2, which is invariant under
    // reflecting roots of b across the imaginary axis, so the search is
    // restricted to the minimum-phase representative (roots with nonpositive
    // real part; for q = 1 this means b_0 >= 0).
    if (q == 1) {
        std::vector<double> grid = {0.0};
        for (int i = 0; i <= 25; ++i) grid.push_back(std::pow(10.0, -3.0 + 5.0 * i / 25.0));
        std::size_t best = 0;
        double best_val = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double v = objective({grid[i]});
            if (v < best_val) {
                best_val = v;
                best = i;
            }
        }
        const double lo = grid[best == 0 ? 0 : best - 1];
        const double hi = grid[std::min(best + 1, grid.size() - 1)];
        b[0] = num::golden_min([&](double v) { return objective({v}); }, lo, hi, 1e-10);
        return b;
    }

    const auto penalized = [&](const std::vector<double>& free) {
        // free holds (b_0, ..., b_{q-1}) of the monic polynomial
        // z^q + b_{q-1} z^{q-1} + ... + b_0; reuse the companion machinery,
        // which expects coefficients ordered from z^{q-1} down to z^0.
        std::vector<double> c(static_cast<std::size_t>(q));
        for (int j = 0; j < q; ++j)
            c[static_cast<std::size_t>(j)] = free[static_cast<std::size_t>(q - 1 - j)];
        double worst = 0.0;
        for (const Complex& r : eigenvalues(companion_matrix(c))) worst = std::max(worst, r.real());
        return objective(free) + (worst > 0.0 ? 1e3 * worst : 0.0);
    };
    const std::vector<double> start(static_cast<std::size_t>(q), 0.1);
    const std::vector<double> step(static_cast<std::size_t>(q), 0.2);
    const num::SimplexResult res = num::nelder_mead(penalized, start, step, 1e-9, 2000);
    if (!res.converged)
        throw EstimationError("estimate_ma_b: simplex did not converge on the MA coefficients");
    for (int j = 0; j < q; ++j) b[static_cast<std::size_t>(j)] = res.x[static_cast<std::size_t>(j)];
    return b;
}

NoiseSeries recover_noise(std::span<const double> y, const std::vector<Complex>& lambda,
                          double h) {
    const int p = static_cast<int>(lambda.size());
    if (p < 1) throw InfeasibleError("recover_noise: empty eigenvalue set");
    if (static_cast<long>(y.size()) <= p)
        throw EstimationError("recover_noise: series shorter than the filter order");
    std::vector<Complex> roots(lambda.size());
    for (std::size_t i = 0; i < lambda.size(); ++i) roots[i] = std::exp(lambda[i] * h);
    // prod (1 - e^{lambda h} B): monic expansion in the backshift operator.
    const std::vector<double> tail = expand_monic_real(roots, "recover_noise");
    std::vector<double> c(tail.size() + 1);
    c[0] = 1.0;
    for (std::size_t k = 0; k < tail.size(); ++k) c[k + 1] = tail[k];

    NoiseSeries out;
    out.h = h;
    out.eps.resize(y.size() - static_cast<std::size_t>(p));
    for (std::size_t n = static_cast<std::size_t>(p); n < y.size(); ++n) {
        double acc = 0.0;
        for (std::size_t j = 0; j < c.size(); ++j) acc += c[j] * y[n - j];
        out.eps[n - static_cast<std::size_t>(p)] = acc;
    }
    return out;
}

StableParams epsilon_stable_params(const CarmaParams& params, const StableParams& driver,
                                   double h) {
    require_two_one(params, "epsilon_stable_params");
    const StationarityReport rep = check_stationarity(params);
    if (!rep.stationary) throw InfeasibleError("epsilon_stable_params: " + rep.detail);
    const KernelIntegrals ki = kernel_integrals(params, driver.alpha, h);
    const double gamma_eps = driver.gamma * std::pow(ki.abs_pow, 1.0 / driver.alpha);
    const double beta_eps = driver.beta * ki.sgn_pow / ki.abs_pow;
    const double mu_eps = driver.mu * ki.lin;
    return StableParams(driver.alpha, beta_eps, gamma_eps, mu_eps);
}

StableParams map_epsilon_to_L(const StableParams& eps_params, const CarmaParams& params,
                              double h) {
    require_two_one(params, "map_epsilon_to_L");
    const StationarityReport rep = check_stationarity(params);
    if (!rep.stationary) throw InfeasibleError("map_epsilon_to_L: " + rep.detail);
    const KernelIntegrals ki = kernel_integrals(params, eps_params.alpha, h);
    if (std::abs(ki.sgn_pow) < 1e-14 * ki.abs_pow && std::abs(eps_params.beta) > 1e-12)
        throw InfeasibleError("map_epsilon_to_L: skewness not identifiable (symmetric kernels)");
    if (std::abs(ki.lin) < 1e-14 && std::abs(eps_params.mu) > 1e-12)
        throw InfeasibleError("map_epsilon_to_L: location not identifiable (zero-mean kernels)");
    const double gamma_L = eps_params.gamma / std::pow(ki.abs_pow, 1.0 / eps_params.alpha);
    double beta_L =
        std::abs(ki.sgn_pow) < 1e-14 * ki.abs_pow ? 0.0 : eps_params.beta * ki.abs_pow / ki.sgn_pow;
    const double mu_L = std::abs(ki.lin) < 1e-14 ? 0.0 : eps_params.mu / ki.lin;
    // The feasible one-cell laws have |beta_eps| bounded by the kernel ratio,
    // so a noisy skew estimate can invert past +-1; project it back onto the
    // boundary instead of failing the whole recovery.
    if (std::abs(beta_L) > 1.0) beta_L = beta_L > 0.0 ? 1.0 : -1.0;
    return StableParams(eps_params.alpha, beta_L, gamma_L, mu_L);
}

}  // namespace scarma
