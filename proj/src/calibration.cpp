#include "femsyn/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>
#include <string>

#include "least_squares.hpp"

namespace femsyn {

double LorentzianFit::model(double v_p) const {
    return displacement_model(y0, A, distribution(), v_p);
}

LorentzianFit LorentzianFit::from_parameters(double y0, double A, double mu, double w,
                                             double t_p) {
    LorentzianFit f;
    f.y0 = y0;
    f.A = A;
    f.mu = mu;
    f.w = w;
    f.v50 = std::pow(10.0, mu);
    f.t_p = t_p;
    return f;
}

namespace {

double value_range(const SwitchCurve& c) {
    const auto [lo, hi] = std::minmax_element(
        c.samples.begin(), c.samples.end(),
        [](const Sample& a, const Sample& b) { return a.value < b.value; });
    return hi->value - lo->value;
}

void require_fittable(const SwitchCurve& c) {
    if (c.size() < kMinFitSamples) {
        throw ConfigError("fit: need at least " + std::to_string(kMinFitSamples) + " samples");
    }
    double scale = 1.0;
    for (const auto& s : c.samples) scale = std::max(scale, std::abs(s.value));
    if (value_range(c) <= 1e-12 * scale) throw RankError("fit: curve is flat, span is not identifiable");
}

// First V_p (as log10) where the curve crosses `level`, interpolated in log10 V.
std::optional<double> first_log_crossing(const SwitchCurve& c, double level) {
    for (std::size_t i = 0; i + 1 < c.size(); ++i) {
        const double a = c.samples[i].value - level;
        const double b = c.samples[i + 1].value - level;
        if (a == 0.0) return std::log10(c.samples[i].v_p);
        if ((a < 0.0) != (b < 0.0)) {
            const double xa = std::log10(c.samples[i].v_p);
            const double xb = std::log10(c.samples[i + 1].v_p);
            return xa + (xb - xa) * a / (a - b);
        }
    }
    return std::nullopt;
}

// Parameter layout: [y0, A]? then (mu_c, ln w_c) per curve.
struct FamilyLayout {
    std::size_t curves = 0;
    std::optional<OffsetLock> lock;

    Eigen::Index offset_params() const { return lock ? 0 : 2; }
    Eigen::Index size() const { return offset_params() + 2 * static_cast<Eigen::Index>(curves); }
    double y0(const Eigen::VectorXd& p) const { return lock ? lock->y0 : p[0]; }
    double A(const Eigen::VectorXd& p) const { return lock ? lock->A : p[1]; }
    Eigen::Index mu_index(std::size_t c) const {
        return offset_params() + 2 * static_cast<Eigen::Index>(c);
    }
};

detail::LmProblem family_problem(std::span<const SwitchCurve* const> curves,
                                 const FamilyLayout& layout) {
    Eigen::Index total = 0;
    for (const auto* c : curves) total += static_cast<Eigen::Index>(c->size());

    detail::LmProblem problem;
    problem.residual_count = total;
    problem.eval = [curves, layout](const Eigen::VectorXd& p, Eigen::VectorXd& r,
                                    Eigen::MatrixXd* J) {
        const double y0 = layout.y0(p);
        const double A = layout.A(p);
        if (J) J->setZero();
        Eigen::Index row = 0;
        for (std::size_t c = 0; c < curves.size(); ++c) {
            const Eigen::Index mi = layout.mu_index(c);
            const double mu = p[mi];
            const double w = std::exp(p[mi + 1]);
            for (const auto& s : curves[c]->samples) {
                const double z = (std::log10(s.v_p) - mu) / w;
                const double S = 0.5 + std::atan(z) / kPi;
                r[row] = y0 + A * S - s.value;
                if (J) {
                    const double dS_dz = 1.0 / (kPi * (1.0 + z * z));
                    if (!layout.lock) {
                        (*J)(row, 0) = 1.0;
                        (*J)(row, 1) = S;
                    }
                    (*J)(row, mi) = -A * dS_dz / w;
                    (*J)(row, mi + 1) = -A * dS_dz * z;
                }
                ++row;
            }
        }
    };
    return problem;
}

struct FamilyOutcome {
    std::vector<LorentzianFit> fits;
    bool converged = false;
};

FamilyOutcome solve_family(std::span<const SwitchCurve* const> curves,
                           std::span<const FitSeeds> seeds, const FitOptions& opts) {
    FamilyLayout layout{curves.size(), opts.lock};
    Eigen::VectorXd p0(layout.size());
    if (!layout.lock) {
        double y0 = 0.0, A = 0.0;
        for (const auto& s : seeds) {
            y0 += s.y0;
            A += s.A;
        }
        p0[0] = y0 / static_cast<double>(seeds.size());
        p0[1] = A / static_cast<double>(seeds.size());
    }
    for (std::size_t c = 0; c < curves.size(); ++c) {
        p0[layout.mu_index(c)] = seeds[c].mu;
        p0[layout.mu_index(c) + 1] = std::log(seeds[c].w);
    }

    const auto result = detail::levenberg_marquardt(family_problem(curves, layout), p0,
                                                    {opts.rel_tol, opts.max_iterations});
    FamilyOutcome out;
    out.converged = result.converged;
    const auto& p = result.params;
    for (std::size_t c = 0; c < curves.size(); ++c) {
        const Eigen::Index mi = layout.mu_index(c);
        auto fit = LorentzianFit::from_parameters(layout.y0(p), layout.A(p), p[mi],
                                                  std::exp(p[mi + 1]), curves[c]->t_p);
        double ss = 0.0;
        for (const auto& s : curves[c]->samples) {
            const double d = fit.model(s.v_p) - s.value;
            ss += d * d;
        }
        fit.rms_residual = std::sqrt(ss / static_cast<double>(curves[c]->size()));
        fit.iterations = result.iterations;
        out.fits.push_back(fit);
    }
    return out;
}

void check_fit(const LorentzianFit& fit, const SwitchCurve& curve, bool converged,
               bool locked) {
    if (!converged) throw FitError("fit: no convergence within the iteration budget", fit);
    if (!std::isfinite(fit.mu) || !std::isfinite(fit.w) || !(fit.w > 0.0)) {
        throw FitError("fit: parameters diverged", fit);
    }
    if (!(fit.A > 0.0)) throw FitError("fit: transfer curve is not increasing (A <= 0)", fit);
    if (!locked && value_range(curve) < kMinSpanCoverage * fit.A) {
        throw FitError("fit: data cover less than 60% of the fitted span; both tails are required",
                       fit);
    }
}

}  // namespace

FitSeeds initial_seeds(const SwitchCurve& curve) {
    FitSeeds s;
    const double first = curve.samples.front().value;
    const double last = curve.samples.back().value;
    s.y0 = first;
    s.A = last - first;

    const double x_lo = std::log10(curve.v_min());
    const double x_hi = std::log10(curve.v_max());
    s.mu = first_log_crossing(curve, first + 0.5 * s.A).value_or(0.5 * (x_lo + x_hi));
    const auto q25 = first_log_crossing(curve, first + 0.25 * s.A);
    const auto q75 = first_log_crossing(curve, first + 0.75 * s.A);
    s.w = (q25 && q75) ? 0.5 * (*q75 - *q25) : 0.0;
    if (!(s.w > 0.0) || !std::isfinite(s.w)) s.w = std::max(0.05 * (x_hi - x_lo), 1e-3);
    return s;
}

LorentzianFit fit_lorentzian_cdf(const SwitchCurve& curve, const FitOptions& opts) {
    require_fittable(curve);
    if (opts.lock && !(opts.lock->A > 0.0)) throw ConfigError("fit: locked span A must be positive");
    FitSeeds seed = opts.init.value_or(initial_seeds(curve));
    if (!(seed.w > 0.0)) throw ConfigError("fit: seed width must be positive");

    const SwitchCurve* ptr = &curve;
    auto outcome = solve_family({&ptr, 1}, {&seed, 1}, opts);
    check_fit(outcome.fits.front(), curve, outcome.converged, opts.lock.has_value());
    return outcome.fits.front();
}

std::vector<LorentzianFit> fit_family(std::span<const SwitchCurve> curves, bool share_offsets,
                                      const FitOptions& opts) {
    if (curves.size() < 2) throw ConfigError("fit_family: need at least two curves");
    std::vector<const SwitchCurve*> ordered;
    for (const auto& c : curves) ordered.push_back(&c);
    std::sort(ordered.begin(), ordered.end(),
              [](const SwitchCurve* a, const SwitchCurve* b) { return a->t_p < b->t_p; });
    for (std::size_t i = 1; i < ordered.size(); ++i) {
        if (ordered[i]->t_p == ordered[i - 1]->t_p) {
            throw ConfigError("fit_family: pulse widths must be distinct");
        }
    }

    if (!share_offsets) {
        std::vector<std::future<LorentzianFit>> jobs;
        for (const auto* c : ordered) {
            jobs.push_back(std::async(std::launch::async,
                                      [c, &opts] { return fit_lorentzian_cdf(*c, opts); }));
        }
        std::vector<LorentzianFit> fits;
        for (auto& j : jobs) fits.push_back(j.get());
        return fits;
    }

    std::vector<FitSeeds> seeds;
    for (const auto* c : ordered) {
        require_fittable(*c);
        seeds.push_back(initial_seeds(*c));
    }
    FitOptions joint = opts;
    joint.init.reset();
    auto outcome = solve_family(ordered, seeds, joint);
    for (std::size_t i = 0; i < ordered.size(); ++i) {
        check_fit(outcome.fits[i], *ordered[i], outcome.converged, opts.lock.has_value());
    }
    return outcome.fits;
}

namespace {

// Single crossing of `level`; exact hits on a sample count as the crossing.
double single_crossing(const SwitchCurve& curve, double level) {
    int last_sign = 0;
    std::size_t last_index = 0;
    int changes = 0;
    double where = 0.0;
    for (std::size_t i = 0; i < curve.size(); ++i) {
        const double d = curve.samples[i].value - level;
        const int sign = (d > 0.0) - (d < 0.0);
        if (sign == 0) continue;
        if (last_sign != 0 && sign != last_sign) {
            ++changes;
            if (last_index + 1 == i) {
                const auto& a = curve.samples[last_index];
                const auto& b = curve.samples[i];
                const double da = a.value - level;
                const double db = b.value - level;
                where = a.v_p + (b.v_p - a.v_p) * da / (da - db);
            } else {
                where = curve.samples[last_index + 1].v_p;  // first exact hit
            }
        }
        last_sign = sign;
        last_index = i;
    }
    if (changes == 0) throw MarkerError(MarkerError::Kind::Absent, "curve never crosses the level");
    if (changes > 1) {
        throw MarkerError(MarkerError::Kind::Ambiguous,
                          "curve crosses the level " + std::to_string(changes) + " times");
    }
    return where;
}

}  // namespace

double zero_crossing(const SwitchCurve& curve) { return single_crossing(curve, 0.0); }

double half_saturation_crossing(const SwitchCurve& curve) {
    const auto [lo, hi] = std::minmax_element(
        curve.samples.begin(), curve.samples.end(),
        [](const Sample& a, const Sample& b) { return a.value < b.value; });
    return single_crossing(curve, 0.5 * (lo->value + hi->value));
}

CurveMarkers extract_markers(const SwitchCurve* displacement, const SwitchCurve* polarization) {
    CurveMarkers m;
    try {
        if (displacement) m.vc_mech = zero_crossing(*displacement);
    } catch (const MarkerError&) {
    }
    try {
        if (polarization) m.vc_elec = half_saturation_crossing(*polarization);
    } catch (const MarkerError&) {
    }
    return m;
}

namespace {

double interpolate(const SwitchCurve& c, double v) {
    const auto it = std::lower_bound(c.samples.begin(), c.samples.end(), v,
                                     [](const Sample& s, double x) { return s.v_p < x; });
    if (it->v_p == v) return it->value;
    const auto prev = it - 1;
    return prev->value + (it->value - prev->value) * (v - prev->v_p) / (it->v_p - prev->v_p);
}

}  // namespace

AffineMap affine_map_fit(const SwitchCurve& source, const SwitchCurve& target) {
    std::vector<double> xs, ys;
    const bool same_grid =
        source.size() == target.size() &&
        std::equal(source.samples.begin(), source.samples.end(), target.samples.begin(),
                   [](const Sample& a, const Sample& b) { return a.v_p == b.v_p; });
    if (same_grid) {
        for (std::size_t i = 0; i < source.size(); ++i) {
            xs.push_back(source.samples[i].value);
            ys.push_back(target.samples[i].value);
        }
    } else {
        const bool source_coarser = source.size() <= target.size();
        const SwitchCurve& grid = source_coarser ? source : target;
        const SwitchCurve& other = source_coarser ? target : source;
        for (const auto& s : grid.samples) {
            if (s.v_p < other.v_min() || s.v_p > other.v_max()) continue;
            const double o = interpolate(other, s.v_p);
            xs.push_back(source_coarser ? s.value : o);
            ys.push_back(source_coarser ? o : s.value);
        }
    }
    const auto n = static_cast<double>(xs.size());
    if (xs.size() < 2) throw RankError("affine_map_fit: curves share fewer than two voltages");

    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = xs[i] - mx;
        const double dy = ys[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    double scale = 1.0;
    for (double x : xs) scale = std::max(scale, std::abs(x));
    if (sxx <= 1e-24 * scale * scale * n) throw RankError("affine_map_fit: source is constant");

    AffineMap map;
    map.gain = sxy / sxx;
    map.offset = my - map.gain * mx;
    map.points = xs.size();
    double ss_res = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double e = ys[i] - (map.gain * xs[i] + map.offset);
        ss_res += e * e;
    }
    map.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
    return map;
}

}  // namespace femsyn
