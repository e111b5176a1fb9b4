#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstddef>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "scarma/errors.hpp"
#include "scarma/rng.hpp"
#include "scarma/seasonality.hpp"

using scarma::DataError;
using scarma::EstimationError;
using scarma::LoadMode;
using scarma::Rng;
using scarma::SeasonalityParams;

namespace {

const SeasonalityParams kBaseSeason(LoadMode::base,
                                    {19.4859, 0.0217, -2.8588, 0.6386, -6.7867, 2.8051});
const SeasonalityParams kPeakSeason(LoadMode::peak, {30.7642, 0.0349, -2.5748, 1.5762});

}  // namespace

TEST_CASE("published coefficients evaluate to the documented levels") {
    CHECK(scarma::eval_seasonality(kPeakSeason, 0.0) == doctest::Approx(28.1894).epsilon(1e-10));
    CHECK(scarma::eval_seasonality(kBaseSeason, 0.0) == doctest::Approx(9.8404).epsilon(1e-10));
}

TEST_CASE("one full period advances the curve by the trend alone") {
    for (double t : {0.0, 17.0, 54.5, 130.0, 555.25}) {
        const double jump =
            scarma::eval_seasonality(kPeakSeason, t + 261.0) - scarma::eval_seasonality(kPeakSeason, t);
        CHECK(jump == doctest::Approx(261.0 * 0.0349).epsilon(1e-10));
    }
    // The base curve needs both periods to elapse: 7 * 365 days.
    const double jump = scarma::eval_seasonality(kBaseSeason, 2555.0) -
                        scarma::eval_seasonality(kBaseSeason, 0.0);
    CHECK(jump == doctest::Approx(2555.0 * 0.0217).epsilon(1e-10));
}

TEST_CASE("noiseless curves are recovered exactly") {
    std::vector<double> t, s;
    for (int d = 0; d < 1461; ++d) {
        t.push_back(static_cast<double>(d));
        s.push_back(scarma::eval_seasonality(kBaseSeason, static_cast<double>(d)));
    }
    const auto fit = scarma::fit_seasonality(t, s, LoadMode::base);
    REQUIRE(fit.params.c.size() == 6);
    for (std::size_t j = 0; j < 6; ++j)
        CHECK(fit.params.c[j] == doctest::Approx(kBaseSeason.c[j]).epsilon(1e-8));
    CHECK_FALSE(fit.short_history);

    std::vector<double> tp, sp;
    for (int d = 0; d < 1045; ++d) {
        tp.push_back(static_cast<double>(d));
        sp.push_back(scarma::eval_seasonality(kPeakSeason, static_cast<double>(d)));
    }
    const auto pfit = scarma::fit_seasonality(tp, sp, LoadMode::peak);
    for (std::size_t j = 0; j < 4; ++j)
        CHECK(pfit.params.c[j] == doctest::Approx(kPeakSeason.c[j]).epsilon(1e-8));
}

TEST_CASE("a constant series loads only the intercept") {
    std::vector<double> t, s;
    for (int d = 0; d < 400; ++d) {
        t.push_back(static_cast<double>(d));
        s.push_back(42.5);
    }
    const auto fit = scarma::fit_seasonality(t, s, LoadMode::base);
    CHECK(fit.params.c[0] == doctest::Approx(42.5).epsilon(1e-9));
    for (std::size_t j = 1; j < 6; ++j) CHECK(std::abs(fit.params.c[j]) < 1e-9);
    CHECK(fit.short_history);
}

TEST_CASE("spikes barely move the robust fit") {
    Rng rng = scarma::make_rng(20260819, 51);
    std::normal_distribution<double> noise(0.0, 2.0);
    std::uniform_real_distribution<double> u01;

    std::vector<double> t, s;
    for (int d = 0; d < 1461; ++d) {
        t.push_back(static_cast<double>(d));
        double v = scarma::eval_seasonality(kBaseSeason, static_cast<double>(d)) + noise(rng);
        if (u01(rng) < 0.05) v += 60.0;
        s.push_back(v);
    }

    const auto fit = scarma::fit_seasonality(t, s, LoadMode::base);

    // Plain least squares absorbs the one-sided spikes into the level.
    Eigen::MatrixXd X(1461, 6);
    Eigen::VectorXd y(1461);
    for (int d = 0; d < 1461; ++d) {
        const double w = 2.0 * std::numbers::pi;
        X(d, 0) = 1.0;
        X(d, 1) = t[static_cast<std::size_t>(d)];
        X(d, 2) = std::cos(w * t[static_cast<std::size_t>(d)] / 365.0);
        X(d, 3) = std::sin(w * t[static_cast<std::size_t>(d)] / 365.0);
        X(d, 4) = std::cos(w * t[static_cast<std::size_t>(d)] / 7.0);
        X(d, 5) = std::sin(w * t[static_cast<std::size_t>(d)] / 7.0);
        y(d) = s[static_cast<std::size_t>(d)];
    }
    const Eigen::VectorXd ols = X.colPivHouseholderQr().solve(y);

    const double huber_err = std::abs(fit.params.c[0] - kBaseSeason.c[0]);
    const double ols_err = std::abs(ols[0] - kBaseSeason.c[0]);
    CHECK(huber_err < ols_err);
    CHECK(huber_err < 1.0);

    // The reweighting never increases the fixed-scale Huber objective.
    for (std::size_t i = 1; i < fit.objective.size(); ++i)
        CHECK(fit.objective[i] <= fit.objective[i - 1] * (1.0 + 1e-12));
}

TEST_CASE("degenerate designs and inputs are rejected") {
    std::vector<double> same_t(30, 5.0), s(30, 1.0);
    CHECK_THROWS_AS(scarma::fit_seasonality(same_t, s, LoadMode::base), EstimationError);

    std::vector<double> t{1.0, 2.0}, short_s{1.0, 2.0};
    CHECK_THROWS_AS(scarma::fit_seasonality(t, short_s, LoadMode::base), EstimationError);

    std::vector<double> t3{1.0, 2.0, 3.0}, s2{1.0, 2.0};
    CHECK_THROWS_AS(scarma::fit_seasonality(t3, s2, LoadMode::peak), DataError);

    std::vector<double> tn(40), sn(40, 1.0);
    for (int i = 0; i < 40; ++i) tn[static_cast<std::size_t>(i)] = i;
    sn[7] = std::nan("");
    CHECK_THROWS_AS(scarma::fit_seasonality(tn, sn, LoadMode::peak), DataError);

    CHECK_THROWS_AS(SeasonalityParams(LoadMode::peak, {1.0, 2.0, 3.0}), scarma::InfeasibleError);
}
