#pragma once

#include <optional>
#include <span>
#include <vector>

#include "scarma/carma.hpp"

namespace scarma {

struct FilterRun {
    std::vector<Vector> states;  // one filtered state per observation
    double h = 1.0;
    Vector x0;  // state the recursion started from
};

// One update of the moment-matching state filter:
//   x_n = e^{Ah} x_prev + v (y_n - b* e^{Ah} x_prev) / (b* v),
//   v = A^{-1}(I - e^{Ah}) e_p,
// which reproduces the observation exactly: b* x_n = y_n.
Vector l1_filter_step(const Vector& x_prev, double y_n, const CarmaParams& params, double h);

// Sequential application of the step from x0; defaults to the zero vector,
// the stationary state mean. With the zero start the first filter_burn_in
// steps are a warm-up and should be excluded from downstream use.
FilterRun l1_filter(std::span<const double> y, const CarmaParams& params, double h,
                    const std::optional<Vector>& x0 = std::nullopt);

// Steps spanning 10 / |max Re lambda| time units on grid h: after that many
// updates a zero start has decayed by a factor e^{-10}.
int filter_burn_in(const CarmaParams& params, double h);

}  // namespace scarma
