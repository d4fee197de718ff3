#include "femsyn/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "femsyn/errors.hpp"

namespace femsyn {

namespace {

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

MerzKinetics MerzKinetics::make(double alpha, double tau_inf, double E_a, double t_film) {
    if (!positive_finite(alpha) || !positive_finite(tau_inf) || !positive_finite(E_a) ||
        !positive_finite(t_film)) {
        throw DomainError("MerzKinetics: alpha, tau_inf, E_a and t_film must be positive");
    }
    MerzKinetics k{alpha, tau_inf, E_a, t_film};
    if (!std::isfinite(k.mu_star())) throw DomainError("MerzKinetics: mu* is not finite");
    return k;
}

MerzKinetics MerzKinetics::from_mu_star(double alpha, double tau_inf, double mu_star,
                                        double t_film) {
    if (!positive_finite(t_film)) throw DomainError("MerzKinetics: t_film must be positive");
    return make(alpha, tau_inf, std::pow(10.0, mu_star) / t_film, t_film);
}

double MerzKinetics::mu_star() const { return std::log10(E_a * t_film); }

ThresholdDistribution ThresholdDistribution::make(double mu, double w) {
    if (!std::isfinite(mu)) throw DomainError("ThresholdDistribution: mu must be finite");
    if (!positive_finite(w)) throw DomainError("ThresholdDistribution: w must be positive");
    return {mu, w};
}

double ThresholdDistribution::v50() const { return std::pow(10.0, mu); }

void DeviceCalibration::validate() const {
    if (!(delta_max > delta_min)) throw ConfigError("calibration: delta_max must exceed delta_min");
    if (!(V_ac > 0.0)) throw ConfigError("calibration: V_ac must be positive");
    if (!(read_noise_sigma >= 0.0)) throw ConfigError("calibration: read_noise_sigma must be >= 0");
    if (dac_bits < 1 || dac_bits > 52) throw ConfigError("calibration: dac_bits must be in [1, 52]");
    if (!(dac_range.v_max > dac_range.v_min)) throw ConfigError("calibration: DAC V_max must exceed V_min");
}

std::uint64_t DeviceCalibration::dac_code_count() const {
    return std::uint64_t{1} << static_cast<unsigned>(dac_bits);
}

double DeviceCalibration::dac_step() const {
    return (dac_range.v_max - dac_range.v_min) / static_cast<double>(dac_code_count() - 1);
}

double DeviceCalibration::dac_voltage(std::uint64_t code) const {
    const auto last = dac_code_count() - 1;
    if (code >= last) return dac_range.v_max;
    const double span = dac_range.v_max - dac_range.v_min;
    return dac_range.v_min + span * (static_cast<double>(code) / static_cast<double>(last));
}

std::uint64_t DeviceCalibration::dac_code_for(double volts) const {
    if (!(volts >= dac_range.v_min && volts <= dac_range.v_max)) {
        throw RangeError("voltage " + std::to_string(volts) + " V outside DAC range");
    }
    const double pos = (volts - dac_range.v_min) / dac_step();
    const auto last = dac_code_count() - 1;
    return std::min<std::uint64_t>(static_cast<std::uint64_t>(std::llround(pos)), last);
}

NlsSpec NlsSpec::from_ln_axis(double n, double ln_location, double ln_scale,
                              double band_halfwidth, int nodes) {
    NlsSpec s{n, ln_location / kLn10, ln_scale / kLn10, band_halfwidth, nodes};
    s.validate();
    return s;
}

void NlsSpec::validate() const {
    if (!positive_finite(n)) throw ConfigError("NlsSpec: n must be positive");
    if (!positive_finite(scale)) throw ConfigError("NlsSpec: scale must be positive");
    if (!std::isfinite(location)) throw ConfigError("NlsSpec: location must be finite");
    if (!positive_finite(band_halfwidth)) throw ConfigError("NlsSpec: band half-width must be positive");
    if (nodes < 32) throw ConfigError("NlsSpec: at least 32 quadrature nodes required");
}

double tau_of_field(const MerzKinetics& k, double field) {
    if (!(field > 0.0)) throw DomainError("tau_of_field: field must be positive");
    return k.tau_inf * std::exp(std::pow(k.E_a / field, k.alpha));
}

double merz_log_time(double t_p, double tau_inf) {
    if (!(tau_inf > 0.0) || !(t_p > tau_inf)) {
        throw DomainError("pulse width must exceed tau_inf");
    }
    return std::log10(std::log(t_p / tau_inf));
}

double threshold_voltage(const MerzKinetics& k, double t_p) {
    if (!(t_p > k.tau_inf)) throw DomainError("threshold_voltage: t_p must exceed tau_inf");
    return k.threshold_product() / std::pow(std::log(t_p / k.tau_inf), 1.0 / k.alpha);
}

double switched_fraction_cdf_log(const ThresholdDistribution& d, double x) noexcept {
    return 0.5 + std::atan((x - d.mu) / d.w) / kPi;
}

double switched_fraction_cdf(const ThresholdDistribution& d, double v_p) {
    if (!(v_p > 0.0)) throw DomainError("switched_fraction_cdf: V_p must be positive");
    return switched_fraction_cdf_log(d, std::log10(v_p));
}

double log_voltage_for_fraction(const ThresholdDistribution& d, double s) {
    if (!(s > 0.0 && s < 1.0)) throw DomainError("target fraction must lie in (0, 1)");
    return d.mu + d.w * std::tan(kPi * (s - 0.5));
}

double threshold_pdf(const ThresholdDistribution& d, double x) noexcept {
    const double u = x - d.mu;
    return d.w / (kPi * (u * u + d.w * d.w));
}

double displacement_of_fraction(double y0, double A, double s) {
    if (!(s >= 0.0 && s <= 1.0)) throw DomainError("switched fraction must lie in [0, 1]");
    return y0 + A * s;
}

double displacement_model(double y0, double A, const ThresholdDistribution& d, double v_p) {
    return y0 + A * switched_fraction_cdf(d, v_p);
}

double nls_switched_fraction(const NlsSpec& spec, double t) {
    spec.validate();
    if (!(t >= 0.0)) throw DomainError("nls_switched_fraction: t must be >= 0");
    if (t == 0.0) return 0.0;

    // Work on u = ln(tau). The per-grain switched probability is
    // g(u) = 1 - exp(-(t/tau)^n) = -expm1(-exp(n (ln t - u))).
    const double ln_t = std::log(t);
    const double loc = spec.location * kLn10;
    const double scale = spec.scale * kLn10;
    const double half = spec.band_halfwidth * scale;
    const double lo = loc - half;
    const double hi = loc + half;

    auto g = [&](double u) { return -std::expm1(-std::exp(spec.n * (ln_t - u))); };
    auto pdf = [&](double u) {
        const double z = (u - loc) / scale;
        return 1.0 / (kPi * scale * (1.0 + z * z));
    };

    const int m = spec.nodes;
    const double h = (hi - lo) / static_cast<double>(m - 1);
    double weighted = 0.0;
    double mass = 0.0;
    for (int i = 0; i < m; ++i) {
        const double u = lo + h * static_cast<double>(i);
        const double wt = (i == 0 || i == m - 1) ? 0.5 * h : h;
        const double f = pdf(u);
        weighted += wt * f * g(u);
        mass += wt * f;
    }
    // Censored tails sit on the band edges.
    const double tail = 0.5 - std::atan(spec.band_halfwidth) / kPi;
    weighted += tail * (g(lo) + g(hi));
    mass += 2.0 * tail;

    return std::clamp(weighted / mass, 0.0, 1.0);
}

}  // namespace femsyn
