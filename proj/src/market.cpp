#include "scarma/market.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <utility>

#include "scarma/errors.hpp"

namespace scarma {

namespace {

using std::chrono::days;
using std::chrono::sys_days;

bool all_digits(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

double parse_price(std::string_view field, const std::string& where) {
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(value))
        throw DataError(where + ": bad price field '" + std::string(field) + "'");
    return value;
}

Date parse_date_at(std::string_view field, const std::string& where) {
    try {
        return parse_date(field);
    } catch (const DataError& e) {
        throw DataError(where + ": " + e.what());
    }
}

// Reads all lines, strips trailing CR, and checks the exact header.
std::vector<std::string> read_csv_lines(const std::string& path, std::string_view header) {
    std::ifstream in(path);
    if (!in) throw DataError(path + ": cannot open file");
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    if (lines.empty()) throw DataError(path + ": empty file");
    if (lines.front() != header)
        throw DataError(path + " line 1: expected header '" + std::string(header) + "'");
    return lines;
}

std::string row_id(const FuturesQuote& q) {
    return format_date(q.trade_date) + "/" + format_date(q.delivery_start) + "/" +
           format_date(q.delivery_end);
}

Date first_of_month(int year, int month) {
    return Date(std::chrono::year(year), std::chrono::month(static_cast<unsigned>(month)),
                std::chrono::day(1));
}

Date last_of_month(int year, int month) {
    const auto ymdl = std::chrono::year(year) / std::chrono::month(static_cast<unsigned>(month)) /
                      std::chrono::last;
    return Date(ymdl);
}

}  // namespace

Date parse_date(std::string_view text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-' || !all_digits(text.substr(0, 4)) ||
        !all_digits(text.substr(5, 2)) || !all_digits(text.substr(8, 2)))
        throw DataError("bad date '" + std::string(text) + "', expected YYYY-MM-DD");
    const auto num = [&](std::size_t pos, std::size_t len) {
        int v = 0;
        std::from_chars(text.data() + pos, text.data() + pos + len, v);
        return v;
    };
    const Date d(std::chrono::year(num(0, 4)), std::chrono::month(static_cast<unsigned>(num(5, 2))),
                 std::chrono::day(static_cast<unsigned>(num(8, 2))));
    if (!d.ok()) throw DataError("impossible calendar date '" + std::string(text) + "'");
    return d;
}

std::string format_date(const Date& d) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()),
                  static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
    return buf;
}

bool is_weekend(const Date& d) {
    const std::chrono::weekday wd{sys_days(d)};
    return wd == std::chrono::Saturday || wd == std::chrono::Sunday;
}

int calendar_days_between(const Date& a, const Date& b) {
    return static_cast<int>((sys_days(b) - sys_days(a)).count());
}

int weekdays_between(const Date& a, const Date& b) {
    if (sys_days(b) < sys_days(a)) return -weekdays_between(b, a);
    const int n = calendar_days_between(a, b);
    const int weeks = n / 7;
    int count = weeks * 5;
    for (sys_days cur = sys_days(a) + days(weeks * 7); cur < sys_days(b); cur += days(1)) {
        const std::chrono::weekday wd{cur};
        if (wd != std::chrono::Saturday && wd != std::chrono::Sunday) ++count;
    }
    return count;
}

int day_index(const Date& epoch, const Date& d, LoadMode mode) {
    return mode == LoadMode::base ? calendar_days_between(epoch, d) : weekdays_between(epoch, d);
}

void validate_market(const MarketData& md) {
    if (md.spot.empty()) throw DataError("market data has no spot quotes");
    if (md.spot.front().date != md.epoch) throw DataError("epoch is not the first spot date");
    for (std::size_t i = 0; i < md.spot.size(); ++i) {
        const SpotQuote& q = md.spot[i];
        if (i > 0 && !(sys_days(md.spot[i - 1].date) < sys_days(q.date)))
            throw DataError("spot dates not strictly increasing at " + format_date(q.date));
        if (md.mode == LoadMode::peak && is_weekend(q.date))
            throw DataError("weekend spot date " + format_date(q.date) + " in peak mode");
        const int idx = day_index(md.epoch, q.date, md.mode);
        if (idx != static_cast<int>(i) || q.day != idx)
            throw DataError("spot grid gap at " + format_date(q.date) +
                            ": the trading-day grid must be complete");
        if (!std::isfinite(q.price))
            throw DataError("non-finite spot price at " + format_date(q.date));
    }
    for (const FuturesQuote& q : md.futures) {
        if (is_weekend(q.trade_date))
            throw DataError("futures row " + row_id(q) + ": weekend trade date");
        if (!(sys_days(q.delivery_start) < sys_days(q.delivery_end)))
            throw DataError("futures row " + row_id(q) + ": delivery ends before it starts");
        if (sys_days(q.trade_date) > sys_days(q.delivery_start))
            throw DataError("futures row " + row_id(q) + ": trade date after delivery start");
        if (!(q.t1 < q.t2))
            throw DataError("futures row " + row_id(q) + ": empty delivery period on the grid");
        if (q.trade_day != day_index(md.epoch, q.trade_date, md.mode))
            throw DataError("futures row " + row_id(q) + ": trade-day index out of sync");
        if (!std::isfinite(q.price))
            throw DataError("futures row " + row_id(q) + ": non-finite price");
    }
}

MarketData load_market(const std::string& spot_path, const std::string& futures_path,
                       LoadMode mode) {
    MarketData md;
    md.mode = mode;

    const std::vector<std::string> spot_lines = read_csv_lines(spot_path, "date,price");
    for (std::size_t i = 1; i < spot_lines.size(); ++i) {
        if (spot_lines[i].empty() && i + 1 == spot_lines.size()) break;
        const std::string where = spot_path + " line " + std::to_string(i + 1);
        const auto fields = split_fields(spot_lines[i]);
        if (fields.size() != 2) throw DataError(where + ": expected 2 fields");
        SpotQuote q;
        q.date = parse_date_at(fields[0], where);
        q.price = parse_price(fields[1], where);
        if (md.spot.empty()) md.epoch = q.date;
        q.day = day_index(md.epoch, q.date, mode);
        md.spot.push_back(q);
    }

    const std::vector<std::string> fut_lines =
        read_csv_lines(futures_path, "trade_date,delivery_start,delivery_end,price");
    for (std::size_t i = 1; i < fut_lines.size(); ++i) {
        if (fut_lines[i].empty() && i + 1 == fut_lines.size()) break;
        const std::string where = futures_path + " line " + std::to_string(i + 1);
        const auto fields = split_fields(fut_lines[i]);
        if (fields.size() != 4) throw DataError(where + ": expected 4 fields");
        FuturesQuote q;
        q.trade_date = parse_date_at(fields[0], where);
        q.delivery_start = parse_date_at(fields[1], where);
        q.delivery_end = parse_date_at(fields[2], where);
        q.price = parse_price(fields[3], where);
        q.trade_day = day_index(md.epoch, q.trade_date, mode);
        q.t1 = day_index(md.epoch, q.delivery_start, mode);
        const sys_days end_next = sys_days(q.delivery_end) + days(1);
        q.t2 = day_index(md.epoch, Date(end_next), mode);
        md.futures.push_back(q);
    }

    validate_market(md);
    return md;
}

void serialize_market(const MarketData& md, const std::string& spot_path,
                      const std::string& futures_path) {
    const auto fmt = [](double x) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", x);
        return std::string(buf);
    };
    {
        std::ofstream out(spot_path);
        if (!out) throw DataError(spot_path + ": cannot open for writing");
        out << "date,price\n";
        for (const SpotQuote& q : md.spot) out << format_date(q.date) << ',' << fmt(q.price) << '\n';
        if (!out) throw DataError(spot_path + ": write failed");
    }
    {
        std::ofstream out(futures_path);
        if (!out) throw DataError(futures_path + ": cannot open for writing");
        out << "trade_date,delivery_start,delivery_end,price\n";
        for (const FuturesQuote& q : md.futures)
            out << format_date(q.trade_date) << ',' << format_date(q.delivery_start) << ','
                << format_date(q.delivery_end) << ',' << fmt(q.price) << '\n';
        if (!out) throw DataError(futures_path + ": write failed");
    }
}

SyntheticMarket generate_synthetic_market(const SyntheticTruth& truth, int spot_days,
                                          double max_maturity, Rng& rng) {
    if (spot_days < 2) throw InfeasibleError("generate_synthetic_market: need at least 2 spot days");
    if (!(max_maturity > 0.0))
        throw InfeasibleError("generate_synthetic_market: max_maturity must be positive");
    if (truth.mode == LoadMode::peak && is_weekend(truth.epoch))
        throw InfeasibleError("generate_synthetic_market: peak epoch falls on a weekend");
    validate_measure_change(truth.mc, truth.model);
    const auto n = static_cast<std::size_t>(spot_days);
    const int p = truth.model.p;

    SyntheticMarket sm;
    sm.data.mode = truth.mode;
    sm.data.epoch = truth.epoch;

    if (truth.zero_noise) {
        sm.z.assign(n, 0.0);
        sm.y.assign(n, 0.0);
        sm.states.assign(n, Vector::Zero(p));
    } else {
        CarmaPath path = simulate_carma(truth.model, truth.driver,
                                        static_cast<double>(spot_days - 1), 0.01, 1.0, rng);
        sm.states = std::move(path.states);
        sm.y = std::move(path.y);
        const std::vector<double> inc = sample_nig(truth.z_law, n - 1, rng);
        sm.z.assign(n, 0.0);
        for (std::size_t d = 1; d < n; ++d) sm.z[d] = sm.z[d - 1] + inc[d - 1];
    }

    // Spot grid dates: every calendar day for base, every weekday for peak.
    std::vector<Date> grid;
    grid.reserve(n);
    sys_days cur = sys_days(truth.epoch);
    while (grid.size() < n) {
        const Date d{cur};
        if (truth.mode == LoadMode::base || !is_weekend(d)) grid.push_back(d);
        cur += days(1);
    }
    for (std::size_t d = 0; d < n; ++d) {
        const double t = static_cast<double>(d);
        sm.data.spot.push_back(
            {grid[d], static_cast<int>(d),
             eval_seasonality(truth.seasonality, t) + sm.z[d] + sm.y[d]});
    }

    // Monthly delivery periods from the epoch month out past the last
    // maturity any trade date can reach.
    const Date last_spot = grid.back();
    const int calendar_reach = static_cast<int>(
        max_maturity * (truth.mode == LoadMode::peak ? 7.0 / 5.0 : 1.0) + 40.0);
    const sys_days horizon = sys_days(last_spot) + days(calendar_reach);
    std::vector<std::pair<Date, Date>> months;
    {
        int year = static_cast<int>(truth.epoch.year());
        int month = static_cast<int>(static_cast<unsigned>(truth.epoch.month()));
        while (sys_days(first_of_month(year, month)) <= horizon) {
            months.emplace_back(first_of_month(year, month), last_of_month(year, month));
            if (++month == 13) {
                month = 1;
                ++year;
            }
        }
    }

    std::normal_distribution<double> noise(0.0, 1.0);
    for (std::size_t d = 0; d < n; ++d) {
        if (is_weekend(grid[d])) continue;
        const MarketSnapshot snap{static_cast<double>(d), sm.z[d], sm.states[d],
                                  truth.seasonality};
        for (const auto& [start, end] : months) {
            if (sys_days(start) < sys_days(grid[d])) continue;
            FuturesQuote q;
            q.trade_date = grid[d];
            q.delivery_start = start;
            q.delivery_end = end;
            q.trade_day = static_cast<int>(d);
            q.t1 = day_index(truth.epoch, start, truth.mode);
            q.t2 = day_index(truth.epoch, Date(sys_days(end) + days(1)), truth.mode);
            if (q.u() > max_maturity) break;
            q.price = swap_price(snap, q.t1, q.t2, truth.model, truth.mc);
            if (truth.quote_noise > 0.0) q.price += truth.quote_noise * noise(rng);
            sm.data.futures.push_back(q);
        }
    }

    validate_market(sm.data);
    return sm;
}

}  // namespace scarma
