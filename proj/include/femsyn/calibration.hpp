#pragma once

// Inverse problem: fit delta(V_p) = y0 + A [1/2 + atan((log10 V_p - mu)/w)/pi]
// to measured sweeps, extract coercive markers, and relate observables by
// affine maps.

#include <optional>
#include <span>
#include <vector>

#include "femsyn/core_model.hpp"
#include "femsyn/curve.hpp"
#include "femsyn/errors.hpp"

namespace femsyn {

struct LorentzianFit {
    double y0 = 0.0;            ///< [nm]
    double A = 0.0;             ///< [nm]
    double mu = 0.0;            ///< [decades]
    double w = 0.0;             ///< [decades]
    double v50 = 0.0;           ///< 10^mu [V]
    double rms_residual = 0.0;  ///< [nm]
    double t_p = 0.0;           ///< [s]
    int iterations = 0;

    ThresholdDistribution distribution() const { return {mu, w}; }
    double model(double v_p) const;

    /// Fit from known parameters (v50 derived, residual zero).
    static LorentzianFit from_parameters(double y0, double A, double mu, double w, double t_p);
};

/// Raised when the optimizer does not converge; carries the best iterate.
class FitError : public Error {
public:
    FitError(const std::string& what, LorentzianFit best) : Error(what), best_(best) {}
    const LorentzianFit& best_so_far() const noexcept { return best_; }

private:
    LorentzianFit best_;
};

struct FitSeeds {
    double y0 = 0.0;
    double A = 0.0;
    double mu = 0.0;
    double w = 0.0;
};

struct OffsetLock {
    double y0 = 0.0;
    double A = 0.0;
};

struct FitOptions {
    std::optional<FitSeeds> init;
    std::optional<OffsetLock> lock;
    double rel_tol = 1e-10;
    int max_iterations = 500;
};

inline constexpr std::size_t kMinFitSamples = 8;
/// Minimum ratio of the data range to the fitted span for an unlocked fit.
inline constexpr double kMinSpanCoverage = 0.6;

/// Geometric starting point from the curve's mid-span and quartile crossings.
FitSeeds initial_seeds(const SwitchCurve& curve);

LorentzianFit fit_lorentzian_cdf(const SwitchCurve& curve, const FitOptions& opts = {});

/// Fits ordered by t_p. With share_offsets, a single joint fit with global
/// (y0, A) and per-curve (mu, w).
std::vector<LorentzianFit> fit_family(std::span<const SwitchCurve> curves, bool share_offsets,
                                      const FitOptions& opts = {});

/// Mechanical coercive voltage: linear interpolation at the single sign change.
double zero_crossing(const SwitchCurve& curve);

/// Voltage at which the curve reaches (min + max) / 2.
double half_saturation_crossing(const SwitchCurve& curve);

struct CurveMarkers {
    std::optional<double> vc_mech;
    std::optional<double> vc_elec;
};

/// Markers from raw data; an absent or ambiguous crossing leaves the marker empty.
CurveMarkers extract_markers(const SwitchCurve* displacement, const SwitchCurve* polarization);

struct AffineMap {
    double gain = 0.0;
    double offset = 0.0;
    double r_squared = 0.0;
    std::size_t points = 0;
};

/// Least squares target = gain * source + offset. Curves on different grids
/// are resampled onto the coarser one (linear, no extrapolation).
AffineMap affine_map_fit(const SwitchCurve& source, const SwitchCurve& target);

}  // namespace femsyn
