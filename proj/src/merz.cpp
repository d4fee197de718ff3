#include "femsyn/merz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "femsyn/errors.hpp"

namespace femsyn {

MerzKinetics MerzRegression::kinetics(double t_film) const {
    if (degenerate) throw DomainError("Merz regression is degenerate; alpha is unbounded");
    return MerzKinetics::from_mu_star(alpha, tau_inf, mu_star, t_film);
}

namespace {

void validate_points(std::span<const MuPoint> points) {
    if (points.size() < 3) throw ConfigError("Merz regression needs at least three points");
    std::vector<double> t;
    for (const auto& p : points) {
        if (!(p.t_p > 0.0) || !std::isfinite(p.mu)) throw DomainError("invalid (t_p, mu) point");
        t.push_back(p.t_p);
    }
    std::sort(t.begin(), t.end());
    if (std::adjacent_find(t.begin(), t.end()) != t.end()) {
        throw ConfigError("Merz regression needs distinct pulse widths");
    }
}

}  // namespace

MerzRegression regress_mu_fixed_tau(std::span<const MuPoint> points, double tau_inf) {
    validate_points(points);
    MerzRegression reg;
    reg.tau_inf = tau_inf;
    for (const auto& p : points) {
        reg.t_p_values.push_back(p.t_p);
        reg.x_values.push_back(merz_log_time(p.t_p, tau_inf));
        reg.mu_values.push_back(p.mu);
    }
    const auto n = static_cast<double>(points.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        mx += reg.x_values[i];
        my += reg.mu_values[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double dx = reg.x_values[i] - mx;
        const double dy = reg.mu_values[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (!(sxx > 0.0)) throw RankError("Merz regression: X values are identical");

    reg.slope = sxy / sxx;
    reg.mu_star = my - reg.slope * mx;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double e = reg.mu_values[i] - reg.predicted_mu(reg.x_values[i]);
        reg.rss += e * e;
    }
    reg.r_squared = syy > 0.0 ? std::clamp(1.0 - reg.rss / syy, 0.0, 1.0) : 1.0;
    reg.degenerate = std::abs(reg.slope) < kDegenerateSlope;
    reg.alpha = reg.degenerate ? std::numeric_limits<double>::infinity() : -1.0 / reg.slope;
    return reg;
}

MerzRegression fit_merz_nested(std::span<const MuPoint> points, const TauSearch& search) {
    validate_points(points);
    if (search.grid_points < 3 || !(search.log10_hi > search.log10_lo) || !(search.tolerance > 0.0)) {
        throw ConfigError("fit_merz_nested: invalid search interval");
    }
    double t_min = points.front().t_p;
    for (const auto& p : points) t_min = std::min(t_min, p.t_p);

    // ln(t_p / tau_inf) must stay clearly positive for every point.
    const double feasible_hi = std::log10(t_min) - 1e-6;
    const double lo = search.log10_lo;
    const double hi = std::min(search.log10_hi, feasible_hi);
    if (!(hi > lo)) throw DomainError("fit_merz_nested: no tau_inf in the search interval is below every t_p");

    auto rss_at = [&](double log_tau) {
        return regress_mu_fixed_tau(points, std::pow(10.0, log_tau)).rss;
    };

    const int m = search.grid_points;
    const double h = (hi - lo) / static_cast<double>(m - 1);
    int best = 0;
    double best_rss = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) {
        const double r = rss_at(lo + h * i);
        if (r < best_rss) {
            best_rss = r;
            best = i;
        }
    }

    double a = lo + h * std::max(best - 1, 0);
    double b = lo + h * std::min(best + 1, m - 1);
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = rss_at(c);
    double fd = rss_at(d);
    while (b - a > search.tolerance) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = rss_at(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = rss_at(d);
        }
    }
    double log_tau = 0.5 * (a + b);
    if (rss_at(log_tau) > best_rss) log_tau = lo + h * best;
    return regress_mu_fixed_tau(points, std::pow(10.0, log_tau));
}

std::vector<MuPoint> mu_points(std::span<const LorentzianFit> fits) {
    std::vector<MuPoint> out;
    for (const auto& f : fits) out.push_back({f.t_p, f.mu});
    return out;
}

std::vector<CollapsePoint> collapse_transform(const SwitchCurve& curve, const LorentzianFit& fit) {
    if (std::abs(curve.t_p - fit.t_p) > 1e-9 * curve.t_p) {
        throw DomainError("collapse_transform: fit pulse width does not match the curve");
    }
    std::vector<CollapsePoint> out;
    out.reserve(curve.size());
    for (const auto& s : curve.samples) {
        out.push_back({(std::log10(s.v_p) - fit.mu) / fit.w, (s.value - fit.y0) / fit.A});
    }
    return out;
}

double master_curve(double z) noexcept { return 0.5 + std::atan(z) / kPi; }

double collapse_rms(std::span<const CollapsePoint> points) {
    if (points.empty()) throw ConfigError("collapse_rms: no points");
    double ss = 0.0;
    for (const auto& p : points) {
        const double e = p.s_bar - master_curve(p.z);
        ss += e * e;
    }
    return std::sqrt(ss / static_cast<double>(points.size()));
}

}  // namespace femsyn
