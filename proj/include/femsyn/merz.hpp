#pragma once

// Kinetic law from a family of fits: mu(t_p) = mu* - X(t_p) / alpha with
// X(t_p) = log10 ln(t_p / tau_inf), and the universal collapse onto
// S(z) = 1/2 + atan(z)/pi.

#include <span>
#include <vector>

#include "femsyn/calibration.hpp"
#include "femsyn/core_model.hpp"
#include "femsyn/curve.hpp"

namespace femsyn {

struct MuPoint {
    double t_p = 0.0;  ///< [s]
    double mu = 0.0;   ///< [decades]
};

struct MerzRegression {
    double alpha = 0.0;    ///< +inf when degenerate
    double tau_inf = 0.0;  ///< [s]
    double mu_star = 0.0;  ///< intercept [decades]
    double slope = 0.0;    ///< -1/alpha
    double r_squared = 0.0;
    double rss = 0.0;
    bool degenerate = false;  ///< |slope| below kDegenerateSlope
    std::vector<double> t_p_values;
    std::vector<double> x_values;
    std::vector<double> mu_values;

    double predicted_mu(double x) const { return mu_star + slope * x; }

    /// Kinetics implied by the regression for a film of the given thickness.
    MerzKinetics kinetics(double t_film) const;
};

inline constexpr double kDegenerateSlope = 1e-6;

struct TauSearch {
    double log10_lo = -16.0;
    double log10_hi = -10.0;
    int grid_points = 121;
    double tolerance = 1e-3;  ///< golden-section bracket width, log10 seconds
};

MerzRegression regress_mu_fixed_tau(std::span<const MuPoint> points, double tau_inf);

/// Profile search over log10 tau_inf (grid scan then golden section).
MerzRegression fit_merz_nested(std::span<const MuPoint> points, const TauSearch& search = {});

std::vector<MuPoint> mu_points(std::span<const LorentzianFit> fits);

struct CollapsePoint {
    double z = 0.0;      ///< (log10 V_p - mu) / w
    double s_bar = 0.0;  ///< (value - y0) / A
};

/// DomainError when the fit belongs to a different pulse width.
std::vector<CollapsePoint> collapse_transform(const SwitchCurve& curve, const LorentzianFit& fit);

double master_curve(double z) noexcept;

/// RMS distance of the points from the master curve; ConfigError when empty.
double collapse_rms(std::span<const CollapsePoint> points);

}  // namespace femsyn
