#pragma once

#include <chrono>
#include <string>
#include <string_view>
#include <vector>

#include "scarma/carma.hpp"
#include "scarma/nig.hpp"
#include "scarma/pricing.hpp"
#include "scarma/rng.hpp"
#include "scarma/seasonality.hpp"
#include "scarma/stable.hpp"

namespace scarma {

using Date = std::chrono::year_month_day;

// Strict YYYY-MM-DD; rejects malformed text and impossible calendar dates.
Date parse_date(std::string_view text);
std::string format_date(const Date& d);

bool is_weekend(const Date& d);

// Signed calendar-day count b - a.
int calendar_days_between(const Date& a, const Date& b);

// Number of Monday-to-Friday dates in [a, b); negative when b < a.
int weekdays_between(const Date& a, const Date& b);

// Position of d on the mode's trading grid anchored at epoch: calendar days
// for base (spot trades every day), weekday count for peak.
int day_index(const Date& epoch, const Date& d, LoadMode mode);

struct SpotQuote {
    Date date;
    int day = 0;  // == position in MarketData::spot; the grid has no gaps
    double price = 0.0;
};

struct FuturesQuote {
    Date trade_date;
    Date delivery_start;
    Date delivery_end;
    int trade_day = 0;  // grid index of trade_date
    double t1 = 0.0;    // grid index where delivery begins
    double t2 = 0.0;    // one past the last delivery day, so t2 - t1 = delivery days
    double price = 0.0;

    double u() const { return 0.5 * (t1 + t2) - trade_day; }  // time to delivery midpoint
};

struct MarketData {
    LoadMode mode = LoadMode::base;
    Date epoch;  // first spot date, grid index 0
    std::vector<SpotQuote> spot;
    std::vector<FuturesQuote> futures;
};

// Checks the ordering and calendar invariants: gap-free strictly increasing
// spot grid (no weekend dates in peak mode), weekday trade dates, nonempty
// delivery periods that begin no earlier than the trade date.
void validate_market(const MarketData& md);

// Spot CSV `date,price`, futures CSV `trade_date,delivery_start,delivery_end,price`,
// ISO-8601 dates, header row required. Parse and invariant failures carry the
// file path and line number.
MarketData load_market(const std::string& spot_path, const std::string& futures_path,
                       LoadMode mode);

// Inverse of load_market up to bit-identical prices (%.17g round trip).
void serialize_market(const MarketData& md, const std::string& spot_path,
                      const std::string& futures_path);

// Ground truth for a synthetic market: the spot decomposition pieces, the
// pricing measure, and the quote noise level.
struct SyntheticTruth {
    LoadMode mode;
    SeasonalityParams seasonality;
    CarmaParams model;
    StableParams driver;  // short-term driver law under the physical measure
    NigParams z_law;      // long-term increment law under the physical measure
    MeasureChange mc;
    double quote_noise = 0.0;  // stdev of additive noise on futures quotes
    bool zero_noise = false;   // freeze both factors at zero (spot = seasonality)
    Date epoch = Date(std::chrono::year(2020), std::chrono::month(1), std::chrono::day(6));
};

struct SyntheticMarket {
    MarketData data;
    std::vector<double> z;       // true long-term factor per spot index
    std::vector<Vector> states;  // true CARMA state per spot index
    std::vector<double> y;       // b*X per spot index
};

// Spot path Lambda + Z + Y on the mode's trading grid (spot_days points) and
// swap quotes for rolling monthly delivery periods out to max_maturity grid
// days, priced from the true state and measure, with optional additive noise.
// Deterministic for a fixed rng state.
SyntheticMarket generate_synthetic_market(const SyntheticTruth& truth, int spot_days,
                                          double max_maturity, Rng& rng);

}  // namespace scarma
