#pragma once

// Monte Carlo hysteron ensemble driven by the reset/write/read protocol.
//
// Each unit i carries x_i = log10(E_a,i * t_film), drawn from a Cauchy law
// censored to mu* +/- 10 w. Under a pulse of width t its threshold is
// V_th,i(t) = 10^x_i / [ln(t / tau_inf)]^(1/alpha); a pulse of amplitude |V|
// switches every unit with V_th,i(t) <= |V| into the pulse's polarity.

#include <cstdint>
#include <span>
#include <vector>

#include "femsyn/core_model.hpp"
#include "femsyn/curve.hpp"

namespace femsyn {

/// Sample truncation half-width, in units of the Cauchy half-width.
inline constexpr double kTruncationWidths = 10.0;

struct TriangularPulse {
    double peak = 0.0;   ///< [V], sign encodes polarity
    double width = 0.0;  ///< [s]

    static TriangularPulse make(double peak, double width);
};

struct WriteProtocol {
    TriangularPulse reset_pulse;
    int reset_count = 2;
    TriangularPulse write_pulse;
    int write_count = 2;

    void validate() const;

    /// Two -9 V resets followed by two writes, both at width t_p. The write
    /// peak is a placeholder; sweeps substitute each grid voltage.
    static WriteProtocol standard(double t_p, double reset_peak = -9.0);
};

class HysteronEnsemble {
public:
    /// Unit state: 0 = up (reset), 1 = down (switched).
    static constexpr std::uint8_t kUp = 0;
    static constexpr std::uint8_t kDown = 1;

    HysteronEnsemble(std::vector<double> log_threshold_at_ref, MerzKinetics kinetics,
                     double mu_star, double w, std::uint64_t seed);

    std::size_t size() const noexcept { return log_threshold_.size(); }
    std::span<const double> log_threshold_at_ref() const noexcept { return log_threshold_; }
    std::span<const std::uint8_t> state() const noexcept { return state_; }
    const MerzKinetics& kinetics() const noexcept { return kinetics_; }
    double mu_star() const noexcept { return mu_star_; }
    double width() const noexcept { return w_; }
    std::uint64_t seed() const noexcept { return seed_; }

    /// Median log10 threshold for pulses of width t_p.
    double median_log_threshold(double t_p) const;
    /// log10(V_th,i(t_p)) - x_i, identical for every unit.
    double log_threshold_shift(double t_p) const;

    double switched_fraction() const;

    /// In-place pulse application; see apply_pulse().
    void apply(const TriangularPulse& pulse);
    void set_all(std::uint8_t s);

private:
    std::vector<double> log_threshold_;
    std::vector<std::uint8_t> state_;
    MerzKinetics kinetics_;
    double mu_star_;
    double w_;
    std::uint64_t seed_;
};

/// Draws n units; deterministic in seed. All units start in the up state.
/// Only alpha and tau_inf of `kinetics` are used by the threshold law.
HysteronEnsemble sample_ensemble(std::size_t n, double mu_star, double w,
                                 const MerzKinetics& kinetics, std::uint64_t seed);

/// Returns a copy of `e` after one pulse. DomainError when width <= tau_inf.
HysteronEnsemble apply_pulse(const HysteronEnsemble& e, const TriangularPulse& p);

/// delta_min + (delta_max - delta_min) * S_down + N(0, sigma^2). Never mutates e.
double read_displacement(const HysteronEnsemble& e, const DeviceCalibration& cal,
                         std::uint64_t seed);

/// 2 P_r (S_down - 1/2) + N(0, sigma^2).
double read_polarization(const HysteronEnsemble& e, double remanent_polarization,
                         double sigma, std::uint64_t seed);

struct SweepOptions {
    Observable kind = Observable::Displacement;
    double remanent_polarization = 20.0;  ///< P_r [uC/cm^2]
    double polarization_sigma = 0.0;      ///< [uC/cm^2]
    std::uint64_t noise_stream = 0;       ///< distinguishes sweeps sharing a seed
};

/// Reset, write and read at every grid voltage. The ensemble is left in the
/// state after the final write.
SwitchCurve run_protocol_sweep(HysteronEnsemble& e, const WriteProtocol& proto,
                               std::span<const double> vp_grid, const DeviceCalibration& cal,
                               const SweepOptions& opts = {});

/// Inclusive uniform grid [v_lo, v_hi] with the given step.
std::vector<double> uniform_grid(double v_lo, double v_hi, double step);

}  // namespace femsyn
