#pragma once

// Closed-form switching model: Merz kinetics, threshold inversion, Cauchy
// statistics on the log10-voltage axis, the offset/span displacement model
// and the nucleation-limited-switching (NLS) integral.

#include <cstdint>
#include <numbers>

namespace femsyn {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kLn10 = std::numbers::ln10;

/// Field-time switching law tau(E) = tau_inf * exp((E_a / E)^alpha).
struct MerzKinetics {
    double alpha = 0.0;    ///< dimensionless field exponent
    double tau_inf = 0.0;  ///< attempt time [s]
    double E_a = 0.0;      ///< activation field [V/m]
    double t_film = 0.0;   ///< ferroelectric thickness [m]

    /// Validating constructor; throws DomainError on non-positive fields.
    static MerzKinetics make(double alpha, double tau_inf, double E_a, double t_film);

    /// Builds kinetics from the log10 threshold product mu* = log10(E_a * t_film).
    static MerzKinetics from_mu_star(double alpha, double tau_inf, double mu_star,
                                     double t_film);

    double threshold_product() const noexcept { return E_a * t_film; }  // [V]
    double mu_star() const;
};

/// Cauchy distribution of log10 switching voltages.
struct ThresholdDistribution {
    double mu = 0.0;  ///< median of log10(V_p) [decades]
    double w = 0.0;   ///< half-width at half-maximum [decades]

    static ThresholdDistribution make(double mu, double w);
    double v50() const;
};

struct DacRange {
    double v_min = 0.0;
    double v_max = 0.0;
};

struct DeviceCalibration {
    double delta_min = 0.0;         ///< fully reset displacement [nm]
    double delta_max = 0.0;         ///< fully poled displacement [nm]
    double V_ac = 0.25;             ///< read drive amplitude [V]
    double t_film = 17e-9;          ///< [m]
    double K_geom = 1.0;            ///< opaque geometric gain, documentation only
    double read_noise_sigma = 0.0;  ///< [nm]
    int dac_bits = 18;
    DacRange dac_range{0.5, 9.0};

    /// Throws ConfigError when any invariant is broken.
    void validate() const;

    double span() const noexcept { return delta_max - delta_min; }
    std::uint64_t dac_code_count() const;
    double dac_step() const;
    double dac_voltage(std::uint64_t code) const;
    /// Nearest code for a voltage inside the DAC range; RangeError otherwise.
    std::uint64_t dac_code_for(double volts) const;
};

/// Parameters of the NLS integral. The distribution of switching times is a
/// Cauchy law in log10(tau) (decades), censored to location +/- band_halfwidth
/// scales: mass beyond the band is lumped onto the band edges.
struct NlsSpec {
    double n = 1.0;                 ///< effective dimensionality
    double location = 0.0;          ///< log10(tau) median [decades]
    double scale = 1.0;             ///< log10(tau) half-width [decades]
    double band_halfwidth = 10.0;   ///< in multiples of scale
    int nodes = 512;

    /// Location and scale given on the natural-log axis.
    static NlsSpec from_ln_axis(double n, double ln_location, double ln_scale,
                                double band_halfwidth = 10.0, int nodes = 512);
    void validate() const;
};

/// tau(E) in seconds; E in V/m.
double tau_of_field(const MerzKinetics& k, double field);

/// V50(t_p) = E_a t_film / [ln(t_p / tau_inf)]^(1/alpha).
double threshold_voltage(const MerzKinetics& k, double t_p);

/// Shift of the median log10 threshold at pulse width t_p:
/// X(t_p) = log10 ln(t_p / tau_inf). DomainError when t_p <= tau_inf.
double merz_log_time(double t_p, double tau_inf);

/// Switched fraction S(V_p) = 1/2 + atan((log10 V_p - mu)/w)/pi.
double switched_fraction_cdf(const ThresholdDistribution& d, double v_p);

/// Same as above with x = log10 V_p given directly; defined on the whole line.
double switched_fraction_cdf_log(const ThresholdDistribution& d, double x) noexcept;

/// Inverse of the CDF in log10 volts; DomainError unless 0 < s < 1.
double log_voltage_for_fraction(const ThresholdDistribution& d, double s);

/// Cauchy density per decade at x = log10 V_p.
double threshold_pdf(const ThresholdDistribution& d, double x) noexcept;

/// delta = y0 + A * S; DomainError unless 0 <= S <= 1.
double displacement_of_fraction(double y0, double A, double s);

/// Full transfer model delta(V_p) = y0 + A * S(V_p).
double displacement_model(double y0, double A, const ThresholdDistribution& d, double v_p);

/// Switched fraction after a pulse of duration t from the NLS integral.
double nls_switched_fraction(const NlsSpec& spec, double t);

}  // namespace femsyn
