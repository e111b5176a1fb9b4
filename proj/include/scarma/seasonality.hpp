#pragma once

#include <span>
#include <vector>

namespace scarma {

// Base load settles on all calendar days (7-day week, 365-day year); peak
// load trades weekdays only, so its year has 261 grid points and no weekly
// harmonic.
enum class LoadMode { base, peak };

double yearly_period(LoadMode mode);

struct SeasonalityParams {
    LoadMode mode = LoadMode::base;
    std::vector<double> c;  // base: c1..c6 (trend + yearly + weekly), peak: c1..c4

    SeasonalityParams() = default;
    SeasonalityParams(LoadMode mode, std::vector<double> c);
};

// c1 + c2 t + c3 cos(2 pi t / Y) + c4 sin(2 pi t / Y) [+ weekly pair, base].
double eval_seasonality(const SeasonalityParams& params, double t);

struct SeasonalityFit {
    SeasonalityParams params;
    std::vector<double> objective;  // Huber objective per IRLS iteration
    int iterations = 0;
    bool short_history = false;  // under two years of data
};

// Huber IRLS (tuning constant 1.345 sigma, sigma = MAD/0.6745 of the initial
// least-squares residuals, held fixed across iterations so the objective is
// monotone). A perfect initial fit is returned as-is.
SeasonalityFit fit_seasonality(std::span<const double> t, std::span<const double> s,
                               LoadMode mode);

}  // namespace scarma
