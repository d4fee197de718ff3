#pragma once

#include <span>
#include <string_view>
#include <vector>

namespace femsyn {

enum class Observable { Displacement, PolarizationChange };

std::string_view observable_name(Observable kind) noexcept;

struct Sample {
    double v_p = 0.0;    ///< programming amplitude [V]
    double value = 0.0;  ///< nm (displacement) or uC/cm^2 (polarization change)
};

/// One sweep at fixed pulse width. Samples are strictly increasing in V_p.
struct SwitchCurve {
    static constexpr std::size_t kMinSamples = 4;

    double t_p = 0.0;  ///< [s]
    std::vector<Sample> samples;
    Observable kind = Observable::Displacement;

    /// Validating constructor; ConfigError on too few or unordered samples.
    static SwitchCurve make(double t_p, std::vector<Sample> samples,
                            Observable kind = Observable::Displacement);

    std::size_t size() const noexcept { return samples.size(); }
    double v_min() const { return samples.front().v_p; }
    double v_max() const { return samples.back().v_p; }
};

}  // namespace femsyn
