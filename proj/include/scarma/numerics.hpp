#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <vector>

namespace scarma::num {

using Fn1 = std::function<double(double)>;

// Adaptive Gauss-Kronrod integral of f over [a, b].
double integrate(const Fn1& f, double a, double b,
                 double eps_abs = 1e-10, double eps_rel = 1e-8);

// Adaptive integral of f over [a, +inf).
double integrate_upper(const Fn1& f, double a,
                       double eps_abs = 1e-10, double eps_rel = 1e-8);

// Fourier integrals over [a, +inf): int f(x) cos(omega x) dx and the sine
// analogue. omega = 0 falls back to the plain semi-infinite rule.
double integrate_cos(const Fn1& f, double a, double omega, double eps_abs = 1e-10);
double integrate_sin(const Fn1& f, double a, double omega, double eps_abs = 1e-10);

// Fixed-order Gauss-Legendre rule on [a, b].
double gauss_legendre(const Fn1& f, double a, double b, std::size_t order = 64);

// Root of f in [lo, hi]; f(lo) and f(hi) must bracket a sign change.
// Bisection to the requested bracket width, then a short secant polish.
double bisect_root(const Fn1& f, double lo, double hi, double tol = 1e-12);

// Minimum of a unimodal f on [lo, hi] by golden-section search.
double golden_min(const Fn1& f, double lo, double hi, double tol = 1e-8);

struct SimplexResult {
    std::vector<double> x;
    double fmin = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Nelder-Mead simplex descent with per-coordinate initial steps. Objective
// values that are non-finite are treated as a very large penalty.
SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                          const std::vector<double>& start,
                          const std::vector<double>& step,
                          double size_tol = 1e-8, int max_iter = 2000);

// Natural cubic spline through (x, y) with x strictly increasing.
// Evaluation clamps to the node range and is safe to share across threads.
class Spline {
public:
    Spline() = default;
    Spline(const std::vector<double>& x, const std::vector<double>& y);
    double operator()(double x) const;
    bool empty() const { return impl_ == nullptr; }
    double x_min() const;
    double x_max() const;

private:
    struct Impl;
    std::shared_ptr<const Impl> impl_;
};

// Type-7 (linear interpolation) quantile of an ascending-sorted sample.
double quantile_sorted(const std::vector<double>& ascending, double p);

}  // namespace scarma::num
