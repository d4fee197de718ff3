#include "femsyn/levels.hpp"

#include <algorithm>
#include <cmath>

#include "femsyn/errors.hpp"

namespace femsyn {

int Staircase::operator()(double v_p) const {
    return static_cast<int>(std::upper_bound(breakpoints.begin(), breakpoints.end(), v_p) -
                            breakpoints.begin());
}

namespace {

template <typename Accept>
LevelSet scan(std::span<const Sample> samples, Accept accept) {
    if (samples.empty()) throw ConfigError("level extraction: no samples");
    std::vector<Sample> sorted(samples.begin(), samples.end());
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const Sample& a, const Sample& b) { return a.v_p < b.v_p; });

    LevelSet out;
    out.source_count = sorted.size();
    double last = sorted.front().value;
    out.kept.push_back({sorted.front().v_p, last, 1});
    for (std::size_t i = 1; i < sorted.size(); ++i) {
        if (accept(sorted[i].value, last)) {
            last = sorted[i].value;
            out.kept.push_back({sorted[i].v_p, last, static_cast<int>(out.kept.size()) + 1});
        }
    }
    return out;
}

}  // namespace

LevelSet s0_filter(std::span<const Sample> samples) {
    return scan(samples, [](double y, double last) { return y >= last; });
}

LevelSet s0_filter(const SwitchCurve& curve) { return s0_filter(curve.samples); }

LevelSet s0_filter_with_margin(std::span<const Sample> samples, double margin) {
    if (!(margin >= 0.0)) throw ConfigError("level extraction: margin must be >= 0");
    return scan(samples, [margin](double y, double last) { return y > last + margin; });
}

LevelSet s0_filter_with_margin(const SwitchCurve& curve, double margin) {
    return s0_filter_with_margin(curve.samples, margin);
}

Staircase staircase_of(const LevelSet& levels) {
    Staircase s;
    s.breakpoints.reserve(levels.count());
    for (const auto& l : levels.kept) s.breakpoints.push_back(l.v_p);
    return s;
}

std::uint64_t count_dac_levels(const LorentzianFit& fit, const DeviceCalibration& cal,
                               double margin) {
    cal.validate();
    if (!(margin >= 0.0)) throw ConfigError("count_dac_levels: margin must be >= 0");
    const auto dist = fit.distribution();
    const auto codes = cal.dac_code_count();

    // Streaming form of s0_filter_with_margin over the code voltages.
    double last = fit.y0 + fit.A * switched_fraction_cdf(dist, cal.dac_voltage(0));
    std::uint64_t count = 1;
    for (std::uint64_t code = 1; code < codes; ++code) {
        const double y = fit.y0 + fit.A * switched_fraction_cdf(dist, cal.dac_voltage(code));
        if (y > last + margin) {
            last = y;
            ++count;
        }
    }
    return count;
}

ProgrammedWeight program_weight(const LorentzianFit& fit, double s_bar_target,
                                const DeviceCalibration& cal) {
    cal.validate();
    const auto dist = fit.distribution();
    ProgrammedWeight p;
    p.target = s_bar_target;
    p.v_exact = std::pow(10.0, log_voltage_for_fraction(dist, s_bar_target));
    p.code = cal.dac_code_for(p.v_exact);
    p.v_code = cal.dac_voltage(p.code);
    p.achieved = switched_fraction_cdf(dist, p.v_code);
    p.displacement = fit.y0 + fit.A * p.achieved;
    return p;
}

double program_voltage_for_weight(const LorentzianFit& fit, double s_bar_target,
                                  const DeviceCalibration& cal) {
    return program_weight(fit, s_bar_target, cal).v_code;
}

}  // namespace femsyn
