#include "femsyn/curve.hpp"

#include <cmath>
#include <string>

#include "femsyn/errors.hpp"

namespace femsyn {

std::string_view observable_name(Observable kind) noexcept {
    return kind == Observable::Displacement ? "displacement" : "polarization_change";
}

SwitchCurve SwitchCurve::make(double t_p, std::vector<Sample> samples, Observable kind) {
    if (!(t_p > 0.0)) throw ConfigError("SwitchCurve: t_p must be positive");
    if (samples.size() < kMinSamples) {
        throw ConfigError("SwitchCurve: need at least " + std::to_string(kMinSamples) +
                          " samples, got " + std::to_string(samples.size()));
    }
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (!std::isfinite(samples[i].v_p) || !std::isfinite(samples[i].value)) {
            throw ConfigError("SwitchCurve: non-finite sample " + std::to_string(i));
        }
        if (i > 0 && !(samples[i].v_p > samples[i - 1].v_p)) {
            throw ConfigError("SwitchCurve: V_p not strictly increasing at sample " +
                              std::to_string(i));
        }
    }
    return SwitchCurve{t_p, std::move(samples), kind};
}

}  // namespace femsyn
