#pragma once

// Weight-level extraction. s0_filter keeps, after sorting by voltage, every
// sample that does not fall below the last kept value; the kept samples are
// the distinguishable levels and define the staircase L(V_p).

#include <cstdint>
#include <span>
#include <vector>

#include "femsyn/calibration.hpp"
#include "femsyn/core_model.hpp"
#include "femsyn/curve.hpp"

namespace femsyn {

struct Level {
    double v_p = 0.0;
    double value = 0.0;
    int index = 0;  ///< 1-based
};

struct LevelSet {
    std::vector<Level> kept;
    std::size_t source_count = 0;

    std::size_t count() const noexcept { return kept.size(); }
};

/// Right-continuous step function L(V) = #{kept voltages <= V}.
struct Staircase {
    std::vector<double> breakpoints;

    int operator()(double v_p) const;
    int levels() const noexcept { return static_cast<int>(breakpoints.size()); }
};

/// Non-decreasing rule (y_i >= y_last, ties count as new levels).
/// ConfigError on empty input. Sorting is internal and stable.
LevelSet s0_filter(std::span<const Sample> samples);
LevelSet s0_filter(const SwitchCurve& curve);

/// Noise-aware variant: y_i > y_last + margin. With margin 0 this is the
/// strictly increasing rule, so exact ties are not new levels.
LevelSet s0_filter_with_margin(std::span<const Sample> samples, double margin);
LevelSet s0_filter_with_margin(const SwitchCurve& curve, double margin);

Staircase staircase_of(const LevelSet& levels);

/// Levels resolvable by driving the noiseless fitted model through every DAC
/// code, filtered with the given margin.
std::uint64_t count_dac_levels(const LorentzianFit& fit, const DeviceCalibration& cal,
                               double margin);

struct ProgrammedWeight {
    double target = 0.0;          ///< requested s_bar
    double v_exact = 0.0;         ///< inverse CDF, before snapping [V]
    std::uint64_t code = 0;       ///< DAC code
    double v_code = 0.0;          ///< snapped voltage [V]
    double achieved = 0.0;        ///< S(v_code)
    double displacement = 0.0;    ///< y0 + A * achieved [nm]
};

/// Inverse programming: V = 10^(mu + w tan(pi (s - 1/2))) snapped to the
/// nearest DAC code. DomainError for s outside (0, 1); RangeError when the
/// inverted voltage lies outside the DAC range.
ProgrammedWeight program_weight(const LorentzianFit& fit, double s_bar_target,
                                const DeviceCalibration& cal);

double program_voltage_for_weight(const LorentzianFit& fit, double s_bar_target,
                                  const DeviceCalibration& cal);

}  // namespace femsyn
