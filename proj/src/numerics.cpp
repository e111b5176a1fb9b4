#include "scarma/numerics.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>
#include <gsl/gsl_interp.h>
#include <gsl/gsl_multimin.h>
#include <gsl/gsl_spline.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "scarma/errors.hpp"

namespace scarma::num {

namespace {

// GSL aborts on error by default; numerical edge cases are handled by
// inspecting status codes instead.
[[maybe_unused]] gsl_error_handler_t* const kOldHandler = gsl_set_error_handler_off();

double call_fn1(double x, void* p) {
    return (*static_cast<const Fn1*>(p))(x);
}

gsl_function wrap(const Fn1& f) {
    gsl_function g;
    g.function = &call_fn1;
    g.params = const_cast<void*>(static_cast<const void*>(&f));
    return g;
}

struct WorkspaceDeleter {
    void operator()(gsl_integration_workspace* w) const { gsl_integration_workspace_free(w); }
};

gsl_integration_workspace* workspace() {
    constexpr std::size_t kLimit = 2048;
    thread_local std::unique_ptr<gsl_integration_workspace, WorkspaceDeleter> ws(
        gsl_integration_workspace_alloc(kLimit));
    return ws.get();
}

gsl_integration_workspace* cycle_workspace() {
    constexpr std::size_t kLimit = 2048;
    thread_local std::unique_ptr<gsl_integration_workspace, WorkspaceDeleter> ws(
        gsl_integration_workspace_alloc(kLimit));
    return ws.get();
}

void check_quadrature(int status, double result, double abserr,
                      double eps_abs, double eps_rel, const char* what) {
    if (!std::isfinite(result))
        throw EstimationError(std::string(what) + ": integral is not finite");
    if (status == GSL_SUCCESS) return;
    // Roundoff, subdivision saturation, or a spurious divergence flag on a
    // near-zero integrand still give a usable value when the achieved error
    // estimate is in the vicinity of the request.
    const double slack = 100.0 * std::max(eps_abs, eps_rel * std::abs(result));
    if (abserr <= slack) return;
    throw EstimationError(std::string(what) + ": quadrature failed (status " +
                          std::to_string(status) + ", err " + std::to_string(abserr) + ")");
}

}  // namespace

double integrate(const Fn1& f, double a, double b, double eps_abs, double eps_rel) {
    gsl_function g = wrap(f);
    double result = 0.0, abserr = 0.0;
    const int status =
        gsl_integration_qags(&g, a, b, eps_abs, eps_rel, 2048, workspace(), &result, &abserr);
    check_quadrature(status, result, abserr, eps_abs, eps_rel, "integrate");
    return result;
}

double integrate_upper(const Fn1& f, double a, double eps_abs, double eps_rel) {
    gsl_function g = wrap(f);
    double result = 0.0, abserr = 0.0;
    const int status =
        gsl_integration_qagiu(&g, a, eps_abs, eps_rel, 2048, workspace(), &result, &abserr);
    check_quadrature(status, result, abserr, eps_abs, eps_rel, "integrate_upper");
    return result;
}

namespace {

double fourier(const Fn1& f, double a, double omega, double eps_abs,
               gsl_integration_qawo_enum kind) {
    if (omega == 0.0) {
        if (kind == GSL_INTEG_SINE) return 0.0;
        return integrate_upper(f, a, eps_abs, 1e-8);
    }
    gsl_function g = wrap(f);
    gsl_integration_qawo_table* table = gsl_integration_qawo_table_alloc(omega, 1.0, kind, 48);
    if (table == nullptr) throw std::bad_alloc();
    double result = 0.0, abserr = 0.0;
    const int status = gsl_integration_qawf(&g, a, eps_abs, 2048, workspace(),
                                            cycle_workspace(), table, &result, &abserr);
    gsl_integration_qawo_table_free(table);
    check_quadrature(status, result, abserr, eps_abs, 0.0, "fourier integral");
    return result;
}

}  // namespace

double integrate_cos(const Fn1& f, double a, double omega, double eps_abs) {
    if (omega < 0.0) return integrate_cos(f, a, -omega, eps_abs);
    return fourier(f, a, omega, eps_abs, GSL_INTEG_COSINE);
}

double integrate_sin(const Fn1& f, double a, double omega, double eps_abs) {
    if (omega < 0.0) return -integrate_sin(f, a, -omega, eps_abs);
    return fourier(f, a, omega, eps_abs, GSL_INTEG_SINE);
}

double gauss_legendre(const Fn1& f, double a, double b, std::size_t order) {
    gsl_integration_glfixed_table* table = gsl_integration_glfixed_table_alloc(order);
    if (table == nullptr) throw std::bad_alloc();
    double sum = 0.0;
    for (std::size_t i = 0; i < order; ++i) {
        double xi = 0.0, wi = 0.0;
        gsl_integration_glfixed_point(a, b, i, &xi, &wi, table);
        sum += wi * f(xi);
    }
    gsl_integration_glfixed_table_free(table);
    return sum;
}

double bisect_root(const Fn1& f, double lo, double hi, double tol) {
    if (!(lo < hi)) throw std::invalid_argument("bisect_root: empty bracket");
    double flo = f(lo), fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) == (fhi > 0.0))
        throw EstimationError("bisect_root: endpoints do not bracket a sign change");
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;  // bracket at floating-point resolution
        const double fmid = f(mid);
        if (fmid == 0.0) return mid;
        if ((fmid > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
            fhi = fmid;
        }
    }
    // Secant polish inside the final bracket.
    double x0 = lo, x1 = hi, f0 = flo, f1 = fhi;
    for (int i = 0; i < 3; ++i) {
        const double denom = f1 - f0;
        if (denom == 0.0) break;
        const double x2 = x1 - f1 * (x1 - x0) / denom;
        if (!(x2 >= lo && x2 <= hi)) break;
        x0 = x1;
        f0 = f1;
        x1 = x2;
        f1 = f(x2);
        if (f1 == 0.0) break;
    }
    return x1;
}

double golden_min(const Fn1& f, double lo, double hi, double tol) {
    if (!(lo < hi)) throw std::invalid_argument("golden_min: empty interval");
    constexpr double kInvPhi = 0.6180339887498949;
    double a = lo, b = hi;
    double c = b - kInvPhi * (b - a);
    double d = a + kInvPhi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - kInvPhi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + kInvPhi * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

namespace {

struct SimplexTarget {
    const std::function<double(const std::vector<double>&)>* f;
    std::size_t dim;
};

double simplex_eval(const gsl_vector* v, void* params) {
    const auto* target = static_cast<const SimplexTarget*>(params);
    std::vector<double> x(target->dim);
    for (std::size_t i = 0; i < target->dim; ++i) x[i] = gsl_vector_get(v, i);
    double value = (*target->f)(x);
    if (!std::isfinite(value)) value = 1e300;
    return value;
}

}  // namespace

SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                          const std::vector<double>& start,
                          const std::vector<double>& step,
                          double size_tol, int max_iter) {
    const std::size_t n = start.size();
    if (n == 0 || step.size() != n)
        throw std::invalid_argument("nelder_mead: start/step dimension mismatch");

    SimplexTarget target{&f, n};
    gsl_multimin_function func;
    func.n = n;
    func.f = &simplex_eval;
    func.params = &target;

    gsl_vector* x0 = gsl_vector_alloc(n);
    gsl_vector* st = gsl_vector_alloc(n);
    for (std::size_t i = 0; i < n; ++i) {
        gsl_vector_set(x0, i, start[i]);
        gsl_vector_set(st, i, step[i]);
    }
    gsl_multimin_fminimizer* solver =
        gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n);
    gsl_multimin_fminimizer_set(solver, &func, x0, st);

    SimplexResult out;
    int iter = 0;
    int status = GSL_CONTINUE;
    while (status == GSL_CONTINUE && iter < max_iter) {
        ++iter;
        if (gsl_multimin_fminimizer_iterate(solver) != 0) break;
        status = gsl_multimin_test_size(gsl_multimin_fminimizer_size(solver), size_tol);
    }
    out.x.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.x[i] = gsl_vector_get(solver->x, i);
    out.fmin = solver->fval;
    out.iterations = iter;
    out.converged = (status == GSL_SUCCESS);

    gsl_multimin_fminimizer_free(solver);
    gsl_vector_free(st);
    gsl_vector_free(x0);
    return out;
}

struct Spline::Impl {
    gsl_spline* spline = nullptr;
    double x_lo = 0.0, x_hi = 0.0;
    double y_lo = 0.0, y_hi = 0.0;
    ~Impl() {
        if (spline != nullptr) gsl_spline_free(spline);
    }
};

Spline::Spline(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 3)
        throw std::invalid_argument("Spline: need at least 3 matching nodes");
    for (std::size_t i = 1; i < x.size(); ++i)
        if (!(x[i] > x[i - 1]))
            throw std::invalid_argument("Spline: abscissae must be strictly increasing");
    auto impl = std::make_shared<Impl>();
    impl->spline = gsl_spline_alloc(gsl_interp_cspline, x.size());
    if (impl->spline == nullptr) throw std::bad_alloc();
    if (gsl_spline_init(impl->spline, x.data(), y.data(), x.size()) != 0)
        throw std::invalid_argument("Spline: initialization failed");
    impl->x_lo = x.front();
    impl->x_hi = x.back();
    impl->y_lo = y.front();
    impl->y_hi = y.back();
    impl_ = std::move(impl);
}

double Spline::operator()(double x) const {
    if (impl_ == nullptr) throw std::logic_error("Spline: evaluating empty spline");
    if (x <= impl_->x_lo) return impl_->y_lo;
    if (x >= impl_->x_hi) return impl_->y_hi;
    // Null accelerator keeps evaluation stateless (binary search per call),
    // so one spline can serve several threads.
    return gsl_spline_eval(impl_->spline, x, nullptr);
}

double Spline::x_min() const {
    if (impl_ == nullptr) throw std::logic_error("Spline: empty");
    return impl_->x_lo;
}

double Spline::x_max() const {
    if (impl_ == nullptr) throw std::logic_error("Spline: empty");
    return impl_->x_hi;
}

double quantile_sorted(const std::vector<double>& ascending, double p) {
    if (ascending.empty()) throw std::invalid_argument("quantile_sorted: empty sample");
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("quantile_sorted: p outside [0,1]");
    const std::size_t n = ascending.size();
    if (n == 1) return ascending[0];
    const double h = p * static_cast<double>(n - 1);
    const auto i = static_cast<std::size_t>(std::floor(h));
    if (i + 1 >= n) return ascending[n - 1];
    const double w = h - static_cast<double>(i);
    return ascending[i] * (1.0 - w) + ascending[i + 1] * w;
}

}  // namespace scarma::num
