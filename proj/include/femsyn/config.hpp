#pragma once

// Run configuration: a flat "block.key = value" text file. '#' starts a
// comment. Unknown keys are rejected.
//
//   seed = 42
//   device.delta_min = -19.1364
//   ensemble.n = 100000
//   protocol.pulse_widths_us = 10, 20, 100, 200, 500

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "femsyn/core_model.hpp"
#include "femsyn/curve.hpp"
#include "femsyn/merz.hpp"

namespace femsyn {

struct ProtocolBlock {
    double reset_peak = -9.0;            ///< [V]
    std::optional<double> reset_width;   ///< [s]; defaults to the write width
    int reset_count = 2;
    int write_count = 2;
    std::vector<double> pulse_widths{500e-6};  ///< [s]
};

struct EnsembleBlock {
    std::size_t n = 100000;
    double mu_star = 1.0694533;  ///< [decades]
    double w = 0.04;             ///< [decades]
    double alpha = 3.6254;
    double tau_inf = 14e-15;     ///< [s]
};

struct SweepBlock {
    double v_min = 0.5;
    double v_max = 9.0;
    double v_step = 0.005;
    Observable observable = Observable::Displacement;
    double remanent_polarization = 20.0;
    double polarization_sigma = 0.0;
};

struct FitBlock {
    bool share_offsets = false;
    double rel_tol = 1e-10;
    int max_iterations = 500;
};

struct MerzBlock {
    std::optional<double> tau_inf;  ///< fixed attempt time; nested search otherwise
    TauSearch search;
};

struct LevelsBlock {
    std::optional<double> margin;
    std::vector<double> targets;
};

struct RunConfig {
    std::uint64_t seed = 0;
    DeviceCalibration device{-19.1364, 5.1152};
    ProtocolBlock protocol;
    EnsembleBlock ensemble;
    SweepBlock sweep;
    FitBlock fit;
    MerzBlock merz;
    LevelsBlock levels;

    /// ConfigError naming the first violated invariant.
    void validate() const;
};

RunConfig parse_config(std::istream& in);
RunConfig parse_config(const std::filesystem::path& path);

}  // namespace femsyn
