#include "scarma/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

#include <Eigen/Dense>

#include "scarma/errors.hpp"
#include "scarma/robust.hpp"

namespace scarma {

namespace {

// Mean-adjusted sample autocorrelation at lags 1..max_lag.
std::vector<double> sample_acf(std::span<const double> x, int max_lag) {
    const auto n = x.size();
    double m = 0.0;
    for (const double v : x) m += v;
    m /= static_cast<double>(n);
    double denom = 0.0;
    for (const double v : x) denom += (v - m) * (v - m);
    std::vector<double> rho(static_cast<std::size_t>(max_lag));
    for (int k = 1; k <= max_lag; ++k) {
        double s = 0.0;
        for (std::size_t i = 0; i + static_cast<std::size_t>(k) < n; ++i)
            s += (x[i] - m) * (x[i + static_cast<std::size_t>(k)] - m);
        rho[static_cast<std::size_t>(k - 1)] = s / denom;
    }
    return rho;
}

Vector model_b(const CarmaParams& model) {
    Vector b(model.p);
    for (int i = 0; i < model.p; ++i) b[i] = model.b[static_cast<std::size_t>(i)];
    return b;
}

// Wraps a pipeline step so a failure names the stage that produced it.
template <class F>
auto stage(const char* name, F&& f) {
    try {
        return f();
    } catch (const std::exception& e) {
        throw EstimationError(std::string("stage ") + name + ": " + e.what());
    }
}

struct PremiumAccum {
    int u_lo = 0;
    std::vector<double> sum;
    std::vector<double> sumsq;
    std::vector<int> cnt;
};

// One pass over the quotes: for every quote surviving the burn-in and flag
// filters, subtract the seasonal average, the long-term factor, and the
// state-implied delivery-averaged CARMA contribution, and pool the result by
// rounded time to midpoint.
PremiumAccum accumulate_premium(const MarketData& md, const SeasonalityParams& season,
                                std::span<const double> z, std::span<const Vector> states,
                                std::span<const std::uint8_t> flagged, const CarmaParams& model,
                                int burn_in, int u_lo, int u_hi) {
    PremiumAccum acc;
    acc.u_lo = u_lo;
    acc.sum.assign(static_cast<std::size_t>(u_hi - u_lo + 1), 0.0);
    acc.sumsq.assign(acc.sum.size(), 0.0);
    acc.cnt.assign(acc.sum.size(), 0);

    const Matrix A = companion_matrix(model);
    const auto lu = A.partialPivLu();
    const Vector b = model_b(model);
    const auto n = static_cast<int>(std::min(z.size(), states.size()));

    for (const FuturesQuote& q : md.futures) {
        const int t = q.trade_day;
        if (t < burn_in || t >= n) continue;
        if (!flagged.empty() && flagged[static_cast<std::size_t>(t)]) continue;
        const long bucket = std::lround(q.u());
        if (bucket < u_lo || bucket > u_hi) continue;
        const Matrix ediff = matrix_exp(A, q.t2 - t) - matrix_exp(A, q.t1 - t);
        const double carma = b.dot(lu.solve(ediff * states[static_cast<std::size_t>(t)])) /
                             (q.t2 - q.t1);
        const double val = q.price - seasonal_delivery_average(season, q.t1, q.t2) -
                           z[static_cast<std::size_t>(t)] - carma;
        acc.sum[static_cast<std::size_t>(bucket - u_lo)] += val;
        acc.sumsq[static_cast<std::size_t>(bucket - u_lo)] += val * val;
        acc.cnt[static_cast<std::size_t>(bucket - u_lo)] += 1;
    }
    return acc;
}

}  // namespace

CalibrationConfig default_config(LoadMode mode) {
    CalibrationConfig c;
    c.mode = mode;
    if (mode == LoadMode::peak) {
        c.v = 21.77;
        c.M_f = 144.0;
    }
    return c;
}

int config_u_min(const CalibrationConfig& config) {
    return config.u_star_min > 0 ? config.u_star_min
                                 : static_cast<int>(std::ceil(config.v / 2.0));
}

int config_u_max(const CalibrationConfig& config) {
    return config.u_star_max > 0 ? config.u_star_max
                                 : static_cast<int>(std::floor(config.M_f / 2.0));
}

void validate_config(const CalibrationConfig& config) {
    if (!(config.v > 0.0) || !std::isfinite(config.v))
        throw InfeasibleError("config: delivery length v must be positive");
    if (!(config.M_f >= config.v) || !std::isfinite(config.M_f))
        throw InfeasibleError("config: maximal maturity M_f must be at least v");
    if (!(config.h > 0.0) || !std::isfinite(config.h))
        throw InfeasibleError("config: grid spacing h must be positive");
    const int lo = config_u_min(config);
    const int hi = config_u_max(config);
    if (lo < static_cast<int>(std::ceil(config.v / 2.0)))
        throw InfeasibleError("config: u_star_min below ceil(v/2)");
    if (static_cast<double>(hi) > config.M_f)
        throw InfeasibleError("config: u_star_max beyond M_f");
    if (lo > hi) throw InfeasibleError("config: empty threshold window");
}

LongEndFit regress_futures_longend(const MarketData& md, const SeasonalityParams& season,
                                   int u_star) {
    std::vector<double> us;
    std::vector<double> fs;
    for (const FuturesQuote& q : md.futures) {
        const double u = q.u();
        if (u + 1e-9 < u_star) continue;
        us.push_back(u);
        fs.push_back(q.price - seasonal_delivery_average(season, q.t1, q.t2));
    }
    if (us.size() < 30)
        throw EstimationError("long-end regression at u* = " + std::to_string(u_star) + ": only " +
                              std::to_string(us.size()) + " quotes with u >= u* (need 30)");

    const auto n = static_cast<Eigen::Index>(us.size());
    Eigen::MatrixXd X(n, 2);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        X(i, 0) = 1.0;
        X(i, 1) = us[static_cast<std::size_t>(i)];
        y[i] = fs[static_cast<std::size_t>(i)];
    }
    const RobustFit fit = huber_linear_fit(X, y, "regress_futures_longend");

    LongEndFit out;
    out.c_const = fit.coef[0];
    out.eq_Z1 = fit.coef[1];
    out.quotes_used = static_cast<int>(us.size());
    return out;
}

ZPath filter_Z(const MarketData& md, const SeasonalityParams& season, double c_const,
               double eq_Z1, int u_star) {
    const std::size_t n = md.spot.size();
    if (n == 0) throw DataError("filter_Z: no spot days");
    std::vector<double> sum(n, 0.0);
    std::vector<int> cnt(n, 0);
    for (const FuturesQuote& q : md.futures) {
        const double u = q.u();
        if (u + 1e-9 < u_star) continue;
        if (q.trade_day < 0 || q.trade_day >= static_cast<int>(n)) continue;
        const auto d = static_cast<std::size_t>(q.trade_day);
        sum[d] += q.price - seasonal_delivery_average(season, q.t1, q.t2) - c_const - u * eq_Z1;
        cnt[d] += 1;
    }

    ZPath zp;
    zp.z.assign(n, 0.0);
    zp.quoted.assign(n, 0);
    zp.flagged.assign(n, 0);
    std::size_t first = n;
    for (std::size_t d = 0; d < n; ++d)
        if (cnt[d] > 0) {
            zp.z[d] = sum[d] / cnt[d];
            zp.quoted[d] = 1;
            if (first == n) first = d;
        }
    if (first == n)
        throw EstimationError("Z filter: no day has quotes beyond u* = " + std::to_string(u_star));

    // Leading gap: copy the first defined value, flagged.
    for (std::size_t d = 0; d < first; ++d) {
        zp.z[d] = zp.z[first];
        zp.flagged[d] = 1;
    }
    // Trailing fills: weekends carry the preceding value as a trading rule,
    // anything else is a fabricated gap fill.
    for (std::size_t d = first + 1; d < n; ++d) {
        if (zp.quoted[d]) continue;
        zp.z[d] = zp.z[d - 1];
        const bool weekend_carry =
            md.mode == LoadMode::base && is_weekend(md.spot[d].date);
        if (!weekend_carry) zp.flagged[d] = 1;
    }
    return zp;
}

double empirical_risk_premium(const MarketData& md, const SeasonalityParams& season,
                              std::span<const double> z, std::span<const Vector> states,
                              std::span<const std::uint8_t> flagged, const CarmaParams& model,
                              double ep_L1, int burn_in, int u, double v) {
    const PremiumAccum acc =
        accumulate_premium(md, season, z, states, flagged, model, burn_in, u, u);
    if (acc.cnt[0] == 0)
        throw EstimationError("empirical_risk_premium: no usable quote at u = " +
                              std::to_string(u));
    return acc.sum[0] / acc.cnt[0] - swap_driver_mean_term(model, u, v, ep_L1);
}

PremiumCurves premium_curves(const MarketData& md, const SeasonalityParams& season,
                             const ZPath& zp, std::span<const Vector> states,
                             const CarmaParams& model, double ep_L1, double eq_L1, double eq_Z1,
                             int burn_in, const CalibrationConfig& config) {
    const int u_lo = static_cast<int>(std::ceil(config.v / 2.0));
    const int u_hi = static_cast<int>(std::floor(config.M_f + 1e-9));
    const PremiumAccum acc = accumulate_premium(md, season, zp.z, states, zp.flagged, model,
                                                burn_in, u_lo, u_hi);
    const double shift = eq_L1 - ep_L1;

    PremiumCurves pc;
    for (int u = u_lo; u <= u_hi; ++u) {
        const auto i = static_cast<std::size_t>(u - u_lo);
        pc.u.push_back(u);
        pc.theoretical.push_back(theoretical_risk_premium(u, config.v, model, shift, eq_Z1));
        pc.quote_count.push_back(acc.cnt[i]);
        if (acc.cnt[i] > 0) {
            pc.empirical.push_back(acc.sum[i] / acc.cnt[i] -
                                   swap_driver_mean_term(model, u, config.v, ep_L1));
            if (acc.cnt[i] > 1) {
                const double mean = acc.sum[i] / acc.cnt[i];
                const double var = std::max(0.0, (acc.sumsq[i] - acc.cnt[i] * mean * mean) /
                                                     (acc.cnt[i] - 1));
                pc.se.push_back(std::sqrt(var / acc.cnt[i]));
            } else {
                pc.se.push_back(std::numeric_limits<double>::quiet_NaN());
            }
        } else {
            pc.empirical.push_back(std::numeric_limits<double>::quiet_NaN());
            pc.se.push_back(std::numeric_limits<double>::quiet_NaN());
            pc.missing += 1;
        }
    }
    return pc;
}

ThresholdBundle estimate_all(const MarketData& md, const SeasonalityParams& season, int u_star,
                             const CalibrationConfig& config) {
    validate_config(config);
    if (u_star < 1) throw InfeasibleError("estimate_all: threshold must be positive");
    const std::size_t n = md.spot.size();

    ThresholdBundle tb;
    tb.u_star = u_star;

    tb.longend = stage("longend_regression",
                       [&] { return regress_futures_longend(md, season, u_star); });
    tb.z_path = stage("z_filter", [&] {
        return filter_Z(md, season, tb.longend.c_const, tb.longend.eq_Z1, u_star);
    });

    tb.y.resize(n);
    for (std::size_t d = 0; d < n; ++d)
        tb.y[d] = md.spot[d].price - eval_seasonality(season, static_cast<double>(d)) -
                  tb.z_path.z[d];

    stage("carma_fit", [&] {
        const std::vector<double> phi = estimate_arma_ar(tb.y, 2);
        const ArRoots roots = ar_from_arma_roots(phi, config.h);
        const std::vector<double> acf = sample_acf(tb.y, 20);
        const std::vector<double> ma = estimate_ma_b(roots.a, 1, acf, config.h);
        const CarmaParams model(2, 1, roots.a, {ma[0], 1.0});
        const StationarityReport rep = check_stationarity(model);
        if (!rep.stationary)
            throw EstimationError("recovered model is not stationary: " + rep.detail);
        tb.model = model;
        tb.lambda = rep.lambda;
        return 0;
    });

    stage("driver_estimation", [&] {
        const NoiseSeries ns = recover_noise(tb.y, tb.lambda, config.h);
        const StableFit sf = estimate_stable(ns.eps);
        tb.eps_law = sf.params;
        tb.driver = map_epsilon_to_L(tb.eps_law, tb.model, config.h);
        tb.ep_L1 = tb.driver.mu;
        return 0;
    });

    stage("measure_solve", [&] {
        tb.eq_L1 = -tb.longend.c_const / driver_level_coeff(tb.model);
        const double shift = tb.eq_L1 - tb.ep_L1;
        tb.theta_L = std::abs(shift) < 1e-14 ? 0.0 : solve_theta_L(tb.driver, shift);
        return 0;
    });

    stage("z_law_fit", [&] {
        std::vector<double> inc;
        for (std::size_t d = 1; d < n; ++d)
            if (tb.z_path.quoted[d] && tb.z_path.quoted[d - 1])
                inc.push_back(tb.z_path.z[d] - tb.z_path.z[d - 1]);
        tb.z_law = fit_nig_zero_mean(inc);
        tb.theta_Z = solve_theta_Z(tb.z_law, tb.longend.eq_Z1);
        return 0;
    });

    tb.mc = stage("measure_assembly", [&] {
        return make_measure_change(tb.theta_Z, tb.theta_L, tb.longend.eq_Z1, tb.eq_L1, tb.model);
    });

    stage("state_filter", [&] {
        tb.states = l1_filter(tb.y, tb.model, config.h);
        tb.burn_in = filter_burn_in(tb.model, config.h);
        return 0;
    });

    stage("premium_curves", [&] {
        tb.curves = premium_curves(md, season, tb.z_path, tb.states.states, tb.model, tb.ep_L1,
                                   tb.eq_L1, tb.longend.eq_Z1, tb.burn_in, config);
        std::vector<double> emp;
        std::vector<double> theo;
        for (std::size_t i = 0; i < tb.curves.u.size(); ++i)
            if (tb.curves.quote_count[i] > 0) {
                emp.push_back(tb.curves.empirical[i]);
                theo.push_back(tb.curves.theoretical[i]);
            }
        if (emp.empty()) throw EstimationError("no premium grid point has quotes");
        tb.error = risk_premium_error(emp, theo);
        return 0;
    });

    return tb;
}

CalibrationResult calibrate_threshold(const MarketData& md, const CalibrationConfig& config) {
    validate_market(md);
    validate_config(config);
    if (md.mode != config.mode)
        throw InfeasibleError("calibrate_threshold: config mode does not match market mode");

    const std::size_t n = md.spot.size();
    std::vector<double> t(n);
    std::vector<double> s(n);
    for (std::size_t d = 0; d < n; ++d) {
        t[d] = static_cast<double>(d);
        s[d] = md.spot[d].price;
    }

    CalibrationResult res;
    res.seasonality = fit_seasonality(t, s, config.mode);

    const int lo = config_u_min(config);
    const int hi = config_u_max(config);
    bool have = false;
    double best = 0.0;
    for (int u_star = lo; u_star <= hi; ++u_star) {
        ThresholdDiagnostic diag;
        diag.u_star = u_star;
        try {
            ThresholdBundle tb = estimate_all(md, res.seasonality.params, u_star, config);
            diag.ok = true;
            diag.error = tb.error;
            if (!have || tb.error < best) {
                have = true;
                best = tb.error;
                res.chosen_u_star = u_star;
                res.chosen_index = res.bundles.size();
            }
            res.bundles.push_back(std::move(tb));
        } catch (const std::exception& e) {
            diag.message = e.what();
        }
        res.diagnostics.push_back(std::move(diag));
    }

    if (!have) {
        std::ostringstream msg;
        msg << "calibrate_threshold: every threshold failed";
        for (const ThresholdDiagnostic& d : res.diagnostics)
            msg << "\n  u* = " << d.u_star << ": " << d.message;
        throw EstimationError(msg.str());
    }
    res.final_mc = res.bundles[res.chosen_index].mc;
    return res;
}

}  // namespace scarma
