#pragma once

// Columnar text files behind the standard figures: fit overlays, threshold
// densities, collapse, Merz line and level staircases. Every call writes an
// index.txt listing the files it produced.

#include <filesystem>
#include <span>
#include <variant>
#include <vector>

#include "femsyn/calibration.hpp"
#include "femsyn/curve.hpp"
#include "femsyn/levels.hpp"
#include "femsyn/merz.hpp"

namespace femsyn::plot {

/// Data and model per pulse width.
struct FitOverlay {
    std::vector<SwitchCurve> curves;
    std::vector<LorentzianFit> fits;  ///< same order as curves
};

/// Threshold densities on x = log10 V_p over mu +/- 10 w.
struct Pdf {
    std::vector<LorentzianFit> fits;
    int grid_points = 2001;
};

struct Collapse {
    std::vector<double> t_p;
    std::vector<std::vector<CollapsePoint>> points;
};

struct MerzLine {
    MerzRegression regression;
};

struct StaircasePlot {
    double t_p = 0.0;
    Staircase staircase;
};

using Payload = std::variant<FitOverlay, Pdf, Collapse, MerzLine, StaircasePlot>;

std::string_view kind_name(const Payload& payload) noexcept;

/// Writes the payloads under `dir` and returns the files written, index last.
/// IoError when the destination is not writable.
std::vector<std::filesystem::path> emit_plotdata(const std::filesystem::path& dir,
                                                 std::span<const Payload> payloads);

}  // namespace femsyn::plot
