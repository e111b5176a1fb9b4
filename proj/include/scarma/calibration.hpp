#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "scarma/carma.hpp"
#include "scarma/filter.hpp"
#include "scarma/market.hpp"
#include "scarma/nig.hpp"
#include "scarma/pricing.hpp"
#include "scarma/seasonality.hpp"
#include "scarma/stable.hpp"

namespace scarma {

// Threshold-sweep setup. v and M_f are the nominal delivery length and the
// maximal observed time to maturity, both in grid days; zero u_star bounds
// resolve to the canonical sweep window [ceil(v/2), floor(M_f/2)].
struct CalibrationConfig {
    LoadMode mode = LoadMode::base;
    double v = 30.44;
    double M_f = 200.0;
    double h = 1.0;  // spot grid spacing
    int u_star_min = 0;
    int u_star_max = 0;
};

CalibrationConfig default_config(LoadMode mode);

// Resolved sweep bounds; validates u_star_min >= ceil(v/2), u_star_max <= M_f.
int config_u_min(const CalibrationConfig& config);
int config_u_max(const CalibrationConfig& config);
void validate_config(const CalibrationConfig& config);

struct LongEndFit {
    double c_const = 0.0;  // intercept: the long-maturity deseasonalized level
    double eq_Z1 = 0.0;    // slope: mean of Z(1) under the pricing measure
    int quotes_used = 0;
};

// Huber regression of deseasonalized quotes F - Lambda_bar on time to
// maturity u, pooled over every quote with u >= u_star. Needs at least 30
// such quotes.
LongEndFit regress_futures_longend(const MarketData& md, const SeasonalityParams& season,
                                   int u_star);

struct ZPath {
    std::vector<double> z;
    std::vector<std::uint8_t> quoted;   // day had quotes beyond the threshold
    std::vector<std::uint8_t> flagged;  // value fabricated by a non-weekend carry
};

// Long-term factor per spot day: the mean of F - Lambda_bar - c_const - u eq_Z1
// over the day's quotes with u >= u_star. Base-mode weekends carry the
// preceding value unflagged (no trading happens there); any other gap carries
// the last value forward, flagged; leading gaps copy the first defined value.
ZPath filter_Z(const MarketData& md, const SeasonalityParams& season, double c_const,
               double eq_Z1, int u_star);

struct PremiumCurves {
    std::vector<int> u;  // integer grid ceil(v/2) .. floor(M_f)
    std::vector<double> empirical;
    std::vector<double> theoretical;
    std::vector<double> se;  // standard error of the bucket mean; NaN below 2 quotes
    std::vector<int> quote_count;  // quotes behind each empirical value; 0 = missing
    int missing = 0;
};

// Market risk premium at integer time-to-midpoint u: the mean over quotes
// rounding to u of F - Lambda_bar - Z - carma contribution, minus the
// physical driver-mean term at the nominal (u, v) window. Quotes before
// burn_in or on flagged days are excluded. Throws when no quote qualifies.
double empirical_risk_premium(const MarketData& md, const SeasonalityParams& season,
                              std::span<const double> z, std::span<const Vector> states,
                              std::span<const std::uint8_t> flagged, const CarmaParams& model,
                              double ep_L1, int burn_in, int u, double v);

// Empirical and model premium curves on the common integer grid; grid points
// with no usable quotes are skipped and counted, never interpolated.
PremiumCurves premium_curves(const MarketData& md, const SeasonalityParams& season,
                             const ZPath& zp, std::span<const Vector> states,
                             const CarmaParams& model, double ep_L1, double eq_L1, double eq_Z1,
                             int burn_in, const CalibrationConfig& config);

// Everything one threshold produces. Placeholder-initialized members are
// always overwritten before a bundle leaves estimate_all.
struct ThresholdBundle {
    int u_star = 0;
    LongEndFit longend;
    ZPath z_path;
    std::vector<double> y;  // spot - seasonality - Z on the spot grid
    CarmaParams model = CarmaParams(1, 0, {1.0}, {1.0});
    std::vector<std::complex<double>> lambda;
    StableParams eps_law = StableParams(1.5, 0.0, 1.0, 0.0);
    StableParams driver = StableParams(1.5, 0.0, 1.0, 0.0);
    NigParams z_law = NigParams(1.0, 0.0, 1.0, 0.0);
    double ep_L1 = 0.0;
    double eq_L1 = 0.0;
    double theta_L = 0.0;
    double theta_Z = 0.0;
    MeasureChange mc;
    FilterRun states;
    int burn_in = 0;
    PremiumCurves curves;
    double error = 0.0;  // f(u_star, v)
};

// The per-threshold pipeline: long-end regression, Z filtering, CARMA(2,1)
// fit of the deseasonalized residual, innovation recovery, stable and NIG
// estimation, measure-change solve, state filtering, premium curves, and the
// curve-matching error. Throws with a stage-named message on failure.
ThresholdBundle estimate_all(const MarketData& md, const SeasonalityParams& season, int u_star,
                             const CalibrationConfig& config);

struct ThresholdDiagnostic {
    int u_star = 0;
    bool ok = false;
    double error = 0.0;   // f(u_star, v) when ok
    std::string message;  // stage-named failure otherwise
};

struct CalibrationResult {
    SeasonalityFit seasonality;
    std::vector<ThresholdBundle> bundles;           // successful thresholds, ascending
    std::vector<ThresholdDiagnostic> diagnostics;   // every evaluated threshold
    int chosen_u_star = 0;
    std::size_t chosen_index = 0;                   // into bundles
    MeasureChange final_mc;
};

// Fits seasonality once, runs estimate_all for every integer threshold in
// the configured window, and picks the error-minimizing bundle (ties go to
// the smaller threshold). Fails only when every threshold failed, with the
// per-threshold diagnostics in the message.
CalibrationResult calibrate_threshold(const MarketData& md, const CalibrationConfig& config);

}  // namespace scarma
