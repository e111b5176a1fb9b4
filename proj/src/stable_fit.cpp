#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <string>
#include <vector>

#include "scarma/errors.hpp"
#include "scarma/numerics.hpp"
#include "scarma/stable.hpp"

// Standardized stable density for alpha in (1, 2). Three regimes:
//   |x| <= ~1   : Taylor series at the origin (entire for alpha > 1),
//   moderate x  : Zolotarev's non-oscillatory integral, rescaled so the
//                 integrand is u e^{-u} with peak e^{-1} at every x,
//   |x| > 25    : asymptotic power-tail series, with the integral as
//                 fallback when the series degenerates (|beta| near 1).
// The CDF uses the companion integral representation without the V factor.

namespace scarma {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTailCut = 25.0;
constexpr int kGridNodes = 241;
constexpr double kBetaMax = 0.995;  // density path degenerates at |beta| = 1

struct SkewGeometry {
    double eta;        // beta tan(pi alpha / 2)
    double theta0;     // atan(eta) / alpha, integral domain is (-theta0, pi/2)
    double a_theta0;   // alpha * theta0
    double log_cos_a_theta0;
};

SkewGeometry skew_geometry(double alpha, double beta) {
    SkewGeometry g;
    g.eta = beta * std::tan(0.5 * kPi * alpha);
    g.a_theta0 = std::atan(g.eta);
    g.theta0 = g.a_theta0 / alpha;
    g.log_cos_a_theta0 = std::log(std::cos(g.a_theta0));
    return g;
}

void require_density_domain(double alpha, double beta) {
    if (!(alpha > 1.0 && alpha < 2.0))
        throw InfeasibleError("stable density: alpha must lie in (1, 2), got " +
                              std::to_string(alpha));
    if (!(std::abs(beta) <= kBetaMax))
        throw InfeasibleError("stable density: |beta| <= " + std::to_string(kBetaMax) +
                              " required, got " + std::to_string(beta));
}

// Taylor expansion around x = 0; valid for both signs of x.
double origin_series_pdf(double alpha, double beta, double x) {
    const auto g = skew_geometry(alpha, beta);
    double sum = 0.0;
    double xk = 1.0;
    int tiny_streak = 0;
    for (int m = 0; m <= 220; ++m) {
        const double mag = std::exp(std::lgamma((m + 1.0) / alpha) - std::lgamma(m + 1.0) +
                                    ((m + 1.0) / alpha) * g.log_cos_a_theta0);
        const double term = mag * xk * std::cos((m + 1.0) * g.theta0 - 0.5 * kPi * m);
        sum += term;
        if (std::abs(mag * xk) < 1e-18 * std::abs(sum) + 1e-300) {
            if (++tiny_streak >= 3) break;
        } else {
            tiny_streak = 0;
        }
        xk *= x;
    }
    return sum / (kPi * alpha);
}

double origin_series_cut(double alpha) { return alpha >= 1.3 ? 1.0 : 0.8; }

// log V(theta) from the integral representation; +inf / -inf at the ends.
double log_v(const SkewGeometry& g, double alpha, double theta) {
    const double ct = std::cos(theta);
    const double s = std::sin(alpha * (g.theta0 + theta));
    const double c2 = std::cos(g.a_theta0 + (alpha - 1.0) * theta);
    if (!(s > 0.0)) return std::numeric_limits<double>::infinity();
    if (!(ct > 0.0) || !(c2 > 0.0)) return -std::numeric_limits<double>::infinity();
    const double r = alpha / (alpha - 1.0);
    return g.log_cos_a_theta0 / (alpha - 1.0) + r * (std::log(ct) - std::log(s)) +
           std::log(c2) - std::log(ct);
}

// Splits the domain at u = c V(theta) = 1; V is monotone on the open
// interval for |beta| < 1, so the exponent log c + log V crosses zero once.
double peak_location(const SkewGeometry& g, double alpha, double log_c,
                     double lo, double hi) {
    double flo = log_c + log_v(g, alpha, lo);
    double fhi = log_c + log_v(g, alpha, hi);
    if (!(flo > 0.0)) return lo;
    if (!(fhi < 0.0)) return hi;
    for (int i = 0; i < 200 && hi - lo > 1e-14; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fmid = log_c + log_v(g, alpha, mid);
        if (fmid > 0.0) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
            fhi = fmid;
        }
    }
    return 0.5 * (lo + hi);
}

struct ExponentGeometry {
    SkewGeometry geo;
    double alpha = 0.0;
    double log_c = 0.0;  // log x^{alpha/(alpha-1)}
    double lo = 0.0, hi = 0.0, span = 0.0;

    double log_u(double theta) const { return log_c + log_v(geo, alpha, theta); }
};

ExponentGeometry exponent_geometry(double alpha, double beta, double x) {
    ExponentGeometry z;
    z.geo = skew_geometry(alpha, beta);
    z.alpha = alpha;
    z.log_c = (alpha / (alpha - 1.0)) * std::log(x);
    z.span = 0.5 * kPi + z.geo.theta0;
    z.lo = -z.geo.theta0 + 1e-12 * z.span;
    z.hi = 0.5 * kPi - 1e-12 * z.span;
    return z;
}

// Fallback integration: log u is monotone decreasing in theta, so panels cut
// at fixed log-u levels each see only a bounded swing of the integrand. This
// resolves needle-shaped peaks (alpha near 2, skew near the edge) that defeat
// one-shot adaptive subdivision.
template <typename G>
double integrate_by_levels(const ExponentGeometry& z, const G& of_log_u) {
    const auto f = [&](double theta) { return of_log_u(z.log_u(theta)); };
    std::vector<double> cuts;
    cuts.reserve(34);
    cuts.push_back(z.lo);
    const double lu_hi = z.log_u(z.hi);
    double left = z.lo;
    for (int k = 15; k >= -15; --k) {
        const double level = 2.0 * k;
        if (!(z.log_u(left) > level) || !(lu_hi < level)) continue;
        double a = left, b = z.hi;
        while (b - a > 1e-13 * z.span) {
            const double mid = 0.5 * (a + b);
            if (z.log_u(mid) > level)
                a = mid;
            else
                b = mid;
        }
        left = 0.5 * (a + b);
        cuts.push_back(left);
    }
    cuts.push_back(z.hi);
    double total = 0.0;
    for (std::size_t i = 1; i < cuts.size(); ++i)
        if (cuts[i] > cuts[i - 1])
            total += num::integrate(f, cuts[i - 1], cuts[i], 1e-15, 1e-9);
    return total;
}

template <typename G>
double peak_split_integral(const ExponentGeometry& z, const G& of_log_u) {
    const auto f = [&](double theta) { return of_log_u(z.log_u(theta)); };
    try {
        const double split = peak_location(z.geo, z.alpha, z.log_c, z.lo, z.hi);
        double total = 0.0;
        if (split > z.lo) total += num::integrate(f, z.lo, split, 1e-13, 1e-9);
        if (z.hi > split) total += num::integrate(f, split, z.hi, 1e-13, 1e-9);
        return total;
    } catch (const EstimationError&) {
        return integrate_by_levels(z, of_log_u);
    }
}

// f(x) = alpha / (pi (alpha-1) x) * int u e^{-u} dtheta,  u = x^{alpha/(alpha-1)} V.
double zolotarev_pdf(double alpha, double beta, double x) {
    const auto z = exponent_geometry(alpha, beta, x);
    const auto g = [](double lu) {
        if (lu > 700.0 || lu == -std::numeric_limits<double>::infinity()) return 0.0;
        const double u = std::exp(lu);
        return u * std::exp(-u);
    };
    return alpha / (kPi * (alpha - 1.0) * x) * peak_split_integral(z, g);
}

// P(X > x) = (1/pi) int e^{-u} dtheta for x > 0, alpha > 1.
double zolotarev_sf(double alpha, double beta, double x) {
    const auto z = exponent_geometry(alpha, beta, x);
    const auto g = [](double lu) {
        if (lu > 700.0) return 0.0;
        if (lu == -std::numeric_limits<double>::infinity()) return 1.0;
        return std::exp(-std::exp(lu));
    };
    return peak_split_integral(z, g) / kPi;
}

struct TailSeries {
    double log_rho;
    double phase;  // atan(eta) + pi alpha / 2
};

TailSeries tail_series_setup(double alpha, double beta) {
    const double eta = beta * std::tan(0.5 * kPi * alpha);
    return {0.5 * std::log1p(eta * eta), std::atan(eta) + 0.5 * kPi * alpha};
}

// Power-tail expansion of the density at x -> +inf; false when it cannot be
// trusted (degenerate skew or non-positive partial sum).
bool tail_series_pdf(double alpha, double beta, double x, double* value) {
    const auto ts = tail_series_setup(alpha, beta);
    const double lx = std::log(x);
    double sum = 0.0;
    double last = 0.0;
    for (int k = 1; k <= 4; ++k) {
        const double mag = std::exp(std::lgamma(alpha * k + 1.0) - std::lgamma(k + 1.0) +
                                    k * ts.log_rho - (alpha * k + 1.0) * lx);
        last = (k % 2 == 1 ? 1.0 : -1.0) * mag * std::sin(k * ts.phase);
        sum += last;
    }
    if (!(sum > 0.0) || std::abs(last) > 1e-4 * sum) return false;
    *value = sum / kPi;
    return true;
}

bool tail_series_sf(double alpha, double beta, double x, double* value) {
    const auto ts = tail_series_setup(alpha, beta);
    const double lx = std::log(x);
    double sum = 0.0;
    double last = 0.0;
    for (int k = 1; k <= 4; ++k) {
        const double mag = std::exp(std::lgamma(alpha * k) - std::lgamma(k + 1.0) +
                                    k * ts.log_rho - alpha * k * lx);
        last = (k % 2 == 1 ? 1.0 : -1.0) * mag * std::sin(k * ts.phase);
        sum += last;
    }
    if (!(sum > 0.0) || std::abs(last) > 1e-4 * sum) return false;
    *value = sum / kPi;
    return true;
}

double upper_tail_pdf(double alpha, double beta, double x) {
    double v = 0.0;
    if (tail_series_pdf(alpha, beta, x, &v)) return v;
    return zolotarev_pdf(alpha, beta, x);
}

double upper_tail_sf(double alpha, double beta, double x) {
    double v = 0.0;
    if (tail_series_sf(alpha, beta, x, &v)) return v;
    return zolotarev_sf(alpha, beta, x);
}

}  // namespace

double stable_pdf_std(double alpha, double beta, double x) {
    require_density_domain(alpha, beta);
    if (!std::isfinite(x)) return 0.0;
    if (std::abs(x) <= origin_series_cut(alpha)) return origin_series_pdf(alpha, beta, x);
    if (x < 0.0) return zolotarev_pdf(alpha, -beta, -x);
    return zolotarev_pdf(alpha, beta, x);
}

StableDensity::StableDensity(double alpha, double beta) : alpha_(alpha), beta_(beta) {
    require_density_domain(alpha, beta);
    cut_ = kTailCut;

    const double s_max = std::asinh(kTailCut);
    s_nodes_.resize(kGridNodes);
    std::vector<double> log_f(kGridNodes);
    for (int i = 0; i < kGridNodes; ++i) {
        const double s = s_max * (2.0 * i / (kGridNodes - 1.0) - 1.0);
        s_nodes_[i] = s;
        const double f = stable_pdf_std(alpha, beta, std::sinh(s));
        if (!(f > 0.0))
            throw EstimationError("stable density: non-positive value on the grid");
        log_f[i] = std::log(f);
    }
    log_pdf_ = num::Spline(s_nodes_, log_f);

    // Cumulative integral of the spline density, cell by cell (Simpson in the
    // asinh coordinate), seeded with the analytic lower-tail mass.
    cdf_nodes_.resize(kGridNodes);
    cdf_nodes_[0] = upper_tail_sf(alpha, -beta, kTailCut);
    const auto dens_s = [&](double s) { return std::exp(log_pdf_(s)) * std::cosh(s); };
    for (int i = 1; i < kGridNodes; ++i) {
        const double a = s_nodes_[i - 1];
        const double b = s_nodes_[i];
        const double mid = 0.5 * (a + b);
        const double cell = (b - a) / 6.0 * (dens_s(a) + 4.0 * dens_s(mid) + dens_s(b));
        cdf_nodes_[i] = cdf_nodes_[i - 1] + cell;
    }
}

double StableDensity::tail_log_pdf(double x) const {
    const double f =
        x > 0.0 ? upper_tail_pdf(alpha_, beta_, x) : upper_tail_pdf(alpha_, -beta_, -x);
    return f > 0.0 ? std::log(f) : -std::numeric_limits<double>::infinity();
}

double StableDensity::log_pdf_std(double x) const {
    if (!std::isfinite(x)) return -std::numeric_limits<double>::infinity();
    if (std::abs(x) >= cut_) return tail_log_pdf(x);
    return log_pdf_(std::asinh(x));
}

double StableDensity::cdf_std(double x) const {
    if (x <= -cut_) return upper_tail_sf(alpha_, -beta_, -x);
    if (x >= cut_) return 1.0 - upper_tail_sf(alpha_, beta_, x);
    const double s = std::asinh(x);
    const auto it = std::upper_bound(s_nodes_.begin(), s_nodes_.end(), s);
    const auto i = static_cast<std::size_t>(std::distance(s_nodes_.begin(), it)) - 1;
    const double a = s_nodes_[i];
    const double mid = 0.5 * (a + s);
    const auto dens_s = [&](double t) { return std::exp(log_pdf_(t)) * std::cosh(t); };
    return cdf_nodes_[i] + (s - a) / 6.0 * (dens_s(a) + 4.0 * dens_s(mid) + dens_s(s));
}

double StableDensity::quantile_std(double p) const {
    if (!(p > 0.0 && p < 1.0))
        throw InfeasibleError("stable quantile: p must lie in (0, 1)");
    if (p < cdf_nodes_.front()) {
        const auto f = [&](double t) { return upper_tail_sf(alpha_, -beta_, std::exp(t)) - p; };
        return -std::exp(num::bisect_root(f, std::log(cut_) - 1e-9, std::log(1e12), 1e-12));
    }
    if (p > cdf_nodes_.back()) {
        const auto f = [&](double t) {
            return (1.0 - upper_tail_sf(alpha_, beta_, std::exp(t))) - p;
        };
        return std::exp(num::bisect_root(f, std::log(cut_) - 1e-9, std::log(1e12), 1e-12));
    }
    const auto f = [&](double s) { return cdf_std(std::sinh(s)) - p; };
    return std::sinh(num::bisect_root(f, s_nodes_.front(), s_nodes_.back(), 1e-12));
}

// --- estimation ---

namespace {

// Quantile-matching lookup: theoretical 5/25/50/75/95 percent quantiles on an
// (alpha, beta >= 0) grid, built once from the density machinery itself.
// beta < 0 follows from the reflection q_p(-beta) = -q_{1-p}(beta).
struct QuantileTable {
    std::vector<double> alphas;
    std::vector<double> betas;
    // index [ia * betas.size() + ib]
    std::vector<std::array<double, 5>> q;

    double nu_alpha(std::size_t ia, std::size_t ib) const {
        const auto& r = q[ia * betas.size() + ib];
        return (r[4] - r[0]) / (r[3] - r[1]);
    }
    double nu_beta(std::size_t ia, std::size_t ib) const {
        const auto& r = q[ia * betas.size() + ib];
        return (r[4] + r[0] - 2.0 * r[2]) / (r[4] - r[0]);
    }
    double iqr(std::size_t ia, std::size_t ib) const {
        const auto& r = q[ia * betas.size() + ib];
        return r[3] - r[1];
    }
    double median(std::size_t ia, std::size_t ib) const {
        return q[ia * betas.size() + ib][2];
    }
};

const QuantileTable& quantile_table() {
    static QuantileTable table;
    static std::once_flag flag;
    std::call_once(flag, [] {
        table.alphas = {1.03, 1.1, 1.2, 1.3, 1.4, 1.5, 1.6, 1.7, 1.8, 1.9, 1.95, 1.999};
        table.betas = {0.0, 0.2, 0.4, 0.6, 0.8, 0.98};
        table.q.resize(table.alphas.size() * table.betas.size());
        const std::array<double, 5> probs{0.05, 0.25, 0.5, 0.75, 0.95};
        for (std::size_t ia = 0; ia < table.alphas.size(); ++ia) {
            for (std::size_t ib = 0; ib < table.betas.size(); ++ib) {
                const StableDensity d(table.alphas[ia], table.betas[ib]);
                auto& row = table.q[ia * table.betas.size() + ib];
                for (std::size_t k = 0; k < probs.size(); ++k)
                    row[k] = d.quantile_std(probs[k]);
            }
        }
    });
    return table;
}

// Bilinear interpolation of a table functional over the (alpha, beta) grid,
// clamped to the grid box.
double interp_table(const QuantileTable& t,
                    double (QuantileTable::*field)(std::size_t, std::size_t) const,
                    double alpha, double beta_abs) {
    const auto locate = [](const std::vector<double>& grid, double x, std::size_t* i,
                           double* w) {
        if (x <= grid.front()) {
            *i = 0;
            *w = 0.0;
            return;
        }
        if (x >= grid.back()) {
            *i = grid.size() - 2;
            *w = 1.0;
            return;
        }
        const auto it = std::upper_bound(grid.begin(), grid.end(), x);
        *i = static_cast<std::size_t>(std::distance(grid.begin(), it)) - 1;
        *w = (x - grid[*i]) / (grid[*i + 1] - grid[*i]);
    };
    std::size_t ia = 0, ib = 0;
    double wa = 0.0, wb = 0.0;
    locate(t.alphas, alpha, &ia, &wa);
    locate(t.betas, beta_abs, &ib, &wb);
    const double v00 = (t.*field)(ia, ib);
    const double v01 = (t.*field)(ia, ib + 1);
    const double v10 = (t.*field)(ia + 1, ib);
    const double v11 = (t.*field)(ia + 1, ib + 1);
    return (1.0 - wa) * ((1.0 - wb) * v00 + wb * v01) + wa * ((1.0 - wb) * v10 + wb * v11);
}

StableParams quantile_initial_fit(const std::vector<double>& sorted) {
    const double q05 = num::quantile_sorted(sorted, 0.05);
    const double q25 = num::quantile_sorted(sorted, 0.25);
    const double q50 = num::quantile_sorted(sorted, 0.50);
    const double q75 = num::quantile_sorted(sorted, 0.75);
    const double q95 = num::quantile_sorted(sorted, 0.95);
    const double iqr = q75 - q25;
    const double spread = q95 - q05;
    if (!(iqr > 0.0) || !(spread > 0.0))
        throw EstimationError("estimate_stable: degenerate sample (zero interquartile range)");

    const double nu_a_emp = spread / iqr;
    const double nu_b_emp = (q95 + q05 - 2.0 * q50) / spread;
    const double sign_b = nu_b_emp >= 0.0 ? 1.0 : -1.0;
    const double nu_b_abs = std::abs(nu_b_emp);

    const auto& table = quantile_table();
    const auto mismatch = [&](const std::vector<double>& p) {
        const double a = std::clamp(p[0], table.alphas.front(), table.alphas.back());
        const double b = std::clamp(p[1], 0.0, table.betas.back());
        const double da = std::log(interp_table(table, &QuantileTable::nu_alpha, a, b)) -
                          std::log(nu_a_emp);
        const double db = interp_table(table, &QuantileTable::nu_beta, a, b) - nu_b_abs;
        return da * da + 4.0 * db * db;
    };
    const auto sol = num::nelder_mead(mismatch, {1.5, 0.3}, {0.25, 0.25}, 1e-6, 300);
    const double alpha = std::clamp(sol.x[0], table.alphas.front(), table.alphas.back());
    const double beta_abs = std::clamp(sol.x[1], 0.0, table.betas.back());

    const double gamma = iqr / interp_table(table, &QuantileTable::iqr, alpha, beta_abs);
    const double med = interp_table(table, &QuantileTable::median, alpha, beta_abs);
    const double mu = q50 - gamma * sign_b * med;
    return {alpha, sign_b * beta_abs, gamma, mu};
}

constexpr double kAlphaLo = 1.02;
constexpr double kAlphaHi = 1.9999;
constexpr double kBetaFit = 0.98;

std::vector<double> to_unconstrained(const StableParams& p) {
    // Starts are pulled well inside the box: a quantile estimate pinned at a
    // clamp would otherwise start the simplex on the saturated tail of the
    // tanh/logit maps, where steps of the chosen width cannot move it back.
    const double a = std::clamp(p.alpha, kAlphaLo + 0.03, kAlphaHi - 0.03);
    const double b = std::clamp(p.beta / kBetaFit, -0.9, 0.9);
    return {std::log((a - kAlphaLo) / (kAlphaHi - a)), std::atanh(b), std::log(p.gamma), p.mu};
}

StableParams from_unconstrained(const std::vector<double>& t) {
    const double alpha = kAlphaLo + (kAlphaHi - kAlphaLo) / (1.0 + std::exp(-t[0]));
    const double beta = kBetaFit * std::tanh(t[1]);
    return {alpha, beta, std::exp(t[2]), t[3]};
}

}  // namespace

StableFit estimate_stable(std::span<const double> x, bool quantile_only) {
    if (x.size() < 200)
        throw EstimationError("estimate_stable: need at least 200 observations, got " +
                              std::to_string(x.size()));
    std::vector<double> sorted(x.begin(), x.end());
    std::sort(sorted.begin(), sorted.end());
    if (!std::isfinite(sorted.front()) || !std::isfinite(sorted.back()))
        throw EstimationError("estimate_stable: sample contains non-finite values");

    StableParams init = quantile_initial_fit(sorted);
    if (quantile_only)
        return {init, std::numeric_limits<double>::quiet_NaN(), 0, false};

    const auto neg_log_lik = [&](const std::vector<double>& t) {
        try {
            const StableParams p = from_unconstrained(t);
            const StableDensity dens(p.alpha, p.beta);
            const double log_gamma = std::log(p.gamma);
            double total = 0.0;
            for (const double xi : x) {
                total -= dens.log_pdf_std((xi - p.mu) / p.gamma) - log_gamma;
                if (!std::isfinite(total)) return 1e300;
            }
            return total;
        } catch (const std::exception&) {
            return 1e300;
        }
    };

    const std::vector<double> start = to_unconstrained(init);
    const std::vector<double> step{0.2, 0.2, 0.08, 0.1 * init.gamma};
    const auto sol = num::nelder_mead(neg_log_lik, start, step, 5e-4, 800);
    const StableParams fitted = from_unconstrained(sol.x);
    return {fitted, -sol.fmin, sol.iterations, true};
}

}  // namespace scarma
