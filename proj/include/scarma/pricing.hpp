#pragma once

#include <span>

#include "scarma/carma.hpp"
#include "scarma/nig.hpp"
#include "scarma/seasonality.hpp"

namespace scarma {

// Pricing measure summary: the Esscher tilt theta_Z on the long-term factor,
// the tempering parameter theta_L <= 0 on the short-term driver, the implied
// unit-time means under the pricing measure, and the long-maturity futures
// intercept c_const they produce.
struct MeasureChange {
    double theta_Z = 0.0;
    double theta_L = 0.0;
    double eq_Z1 = 0.0;    // mean of Z(1) under the pricing measure
    double eq_L1 = 0.0;    // mean of L(1) under the pricing measure
    double c_const = 0.0;  // long-end intercept, -b*A^{-1}e_p eq_L1
};

// b*A^{-1}e_p: translates a unit driver mean into the long-maturity futures
// level, with sign (the intercept is c_const = -coeff * eq_L1).
double driver_level_coeff(const CarmaParams& model);

// Assembles the summary with c_const derived from eq_L1 through the model.
MeasureChange make_measure_change(double theta_Z, double theta_L, double eq_Z1, double eq_L1,
                                  const CarmaParams& model);

// Checks the stored c_const against eq_L1 through the model (1e-8 absolute
// on the c_const scale).
void validate_measure_change(const MeasureChange& mc, const CarmaParams& model);

// Derives the unit-time pricing-measure means from the tilt parameters:
// eq_Z1 through the Esscher shift of the long-term law, eq_L1 through the
// tempered mean shift of the driver.
MeasureChange measure_from_thetas(double theta_Z, double theta_L, const NigParams& z_law,
                                  const StableParams& driver, const CarmaParams& model);

// State of the market as seen by the pricing formulas: trading-day index,
// filtered long-term factor, CARMA state, and the seasonal curve.
struct MarketSnapshot {
    double t = 0.0;
    double z_t = 0.0;
    Vector x_t;
    SeasonalityParams seasonality;
};

// (1/(T2-T1)) int_{T1}^{T2} Lambda, in closed form.
double seasonal_integral_average(const SeasonalityParams& params, double T1, double T2);

// Arithmetic mean of Lambda over the delivery days ceil(T1) .. ceil(T2)-1,
// the grid contracts actually settle on.
double seasonal_delivery_average(const SeasonalityParams& params, double T1, double T2);

// Fixed-maturity futures price
//   Lambda(tau) + Z(t) + b*e^{A(tau-t)}X(t)
//     + (tau-t) eq_Z1 + b*A^{-1}(e^{A(tau-t)} - I)e_p eq_L1.
double futures_price_fixed(const MarketSnapshot& snap, double tau, const CarmaParams& model,
                           const MeasureChange& mc);

// Delivery-period swap price: the average of the fixed-maturity price over
// [T1, T2], with every matrix exponential grouped on nonnegative horizons
// e^{A(T-t)} so long-dated contracts cannot overflow.
double swap_price(const MarketSnapshot& snap, double T1, double T2, const CarmaParams& model,
                  const MeasureChange& mc);

// Driver-mean contribution of a swap at time-to-midpoint u, delivery length
// v, for a unit-time driver mean m:
//   (1/v) b*A^{-2}(e^{A(u+v/2)} - e^{A(u-v/2)}) e_p m - b*A^{-1} e_p m.
double swap_driver_mean_term(const CarmaParams& model, double u, double v, double m);

// Risk premium of the swap with time-to-midpoint u: the gap between the
// pricing-measure and physical-measure swap prices at the same state,
//   swap_driver_mean_term(u, v, driver_shift) + u eq_Z1,
// with driver_shift the change in the unit-time driver mean between the
// measures. Meaningful for u >= v/2 (delivery not yet started).
double theoretical_risk_premium(double u, double v, const CarmaParams& model, double driver_shift,
                                double eq_Z1);

// Sum of squared gaps between two premium curves aligned on the same grid.
double risk_premium_error(std::span<const double> empirical, std::span<const double> theoretical);

}  // namespace scarma
