#include "scarma/filter.hpp"

#include <cmath>

#include "scarma/errors.hpp"

namespace scarma {

namespace {

// Per-grid quantities shared by every update on the same (params, h).
struct FilterKernel {
    Matrix Eh;   // e^{Ah}
    Vector v;    // A^{-1}(I - e^{Ah}) e_p
    Vector bEh;  // Eh^T b, so bEh.dot(x) = b* e^{Ah} x
    double den;  // b* v
};

FilterKernel make_kernel(const CarmaParams& params, double h) {
    if (!(h > 0.0) || !std::isfinite(h))
        throw InfeasibleError("l1_filter: grid spacing must be positive and finite");
    const StationarityReport rep = check_stationarity(params);
    if (!rep.stationary)
        throw InfeasibleError("l1_filter: non-stationary model: " + rep.detail);

    const int p = params.p;
    const Matrix A = companion_matrix(params);
    FilterKernel k;
    k.Eh = matrix_exp(A, h);
    Vector ep = Vector::Zero(p);
    ep[p - 1] = 1.0;
    // A is invertible: stationarity excludes a zero eigenvalue.
    k.v = A.partialPivLu().solve((Matrix::Identity(p, p) - k.Eh) * ep);
    Vector b(p);
    for (int j = 0; j < p; ++j) b[j] = params.b[static_cast<std::size_t>(j)];
    k.bEh = k.Eh.transpose() * b;
    k.den = b.dot(k.v);
    if (std::abs(k.den) <= 1e-12 * std::max(1.0, b.norm() * k.v.norm()))
        throw InfeasibleError(
            "l1_filter: b*A^{-1}(I - e^{Ah})e_p vanishes; the filter is singular on this grid");
    return k;
}

Vector apply_step(const FilterKernel& k, const Vector& x_prev, double y_n) {
    return k.Eh * x_prev + k.v * ((y_n - k.bEh.dot(x_prev)) / k.den);
}

}  // namespace

Vector l1_filter_step(const Vector& x_prev, double y_n, const CarmaParams& params, double h) {
    if (x_prev.size() != params.p)
        throw InfeasibleError("l1_filter_step: state dimension does not match the model order");
    if (!x_prev.allFinite() || !std::isfinite(y_n))
        throw DataError("l1_filter_step: non-finite state or observation");
    return apply_step(make_kernel(params, h), x_prev, y_n);
}

FilterRun l1_filter(std::span<const double> y, const CarmaParams& params, double h,
                    const std::optional<Vector>& x0) {
    const FilterKernel kernel = make_kernel(params, h);
    FilterRun run;
    run.h = h;
    run.x0 = x0.value_or(Vector::Zero(params.p));
    if (run.x0.size() != params.p)
        throw InfeasibleError("l1_filter: initial state dimension does not match the model order");
    if (!run.x0.allFinite()) throw DataError("l1_filter: non-finite initial state");

    run.states.reserve(y.size());
    Vector x = run.x0;
    for (const double y_n : y) {
        if (!std::isfinite(y_n)) throw DataError("l1_filter: non-finite observation");
        x = apply_step(kernel, x, y_n);
        run.states.push_back(x);
    }
    return run;
}

int filter_burn_in(const CarmaParams& params, double h) {
    if (!(h > 0.0) || !std::isfinite(h))
        throw InfeasibleError("filter_burn_in: grid spacing must be positive and finite");
    const StationarityReport rep = check_stationarity(params);
    if (!rep.stationary)
        throw InfeasibleError("filter_burn_in: non-stationary model: " + rep.detail);
    return static_cast<int>(std::ceil(10.0 / (std::abs(rep.max_real_part) * h)));
}

}  // namespace scarma
