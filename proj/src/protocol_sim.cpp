#include "femsyn/protocol_sim.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "femsyn/errors.hpp"
#include "femsyn/kernels.hpp"
#include "femsyn/rng.hpp"

namespace femsyn {

TriangularPulse TriangularPulse::make(double peak, double width) {
    if (!(width > 0.0)) throw ConfigError("TriangularPulse: width must be positive");
    if (!(peak != 0.0) || !std::isfinite(peak)) throw ConfigError("TriangularPulse: peak must be non-zero");
    return {peak, width};
}

void WriteProtocol::validate() const {
    if (reset_count < 1 || write_count < 1) throw ConfigError("WriteProtocol: pulse counts must be >= 1");
    if (!(reset_pulse.width > 0.0) || !(write_pulse.width > 0.0)) {
        throw ConfigError("WriteProtocol: pulse widths must be positive");
    }
    if (!(reset_pulse.peak * write_pulse.peak < 0.0)) {
        throw ConfigError("WriteProtocol: reset and write pulses need opposite polarity");
    }
}

WriteProtocol WriteProtocol::standard(double t_p, double reset_peak) {
    WriteProtocol p;
    p.reset_pulse = TriangularPulse::make(-std::abs(reset_peak), t_p);
    p.write_pulse = TriangularPulse::make(1.0, t_p);
    return p;
}

HysteronEnsemble::HysteronEnsemble(std::vector<double> log_threshold_at_ref,
                                   MerzKinetics kinetics, double mu_star, double w,
                                   std::uint64_t seed)
    : log_threshold_(std::move(log_threshold_at_ref)),
      state_(log_threshold_.size(), kUp),
      kinetics_(kinetics),
      mu_star_(mu_star),
      w_(w),
      seed_(seed) {}

double HysteronEnsemble::log_threshold_shift(double t_p) const {
    return -merz_log_time(t_p, kinetics_.tau_inf) / kinetics_.alpha;
}

double HysteronEnsemble::median_log_threshold(double t_p) const {
    return mu_star_ + log_threshold_shift(t_p);
}

double HysteronEnsemble::switched_fraction() const {
    if (state_.empty()) return 0.0;
    return static_cast<double>(kernels::active().count_set(state_)) /
           static_cast<double>(state_.size());
}

void HysteronEnsemble::apply(const TriangularPulse& pulse) {
    if (!(pulse.width > kinetics_.tau_inf)) {
        throw DomainError("apply_pulse: pulse width must exceed tau_inf");
    }
    // V_th,i <= |V|  <=>  x_i <= log10|V| - shift
    const double cut = std::log10(std::abs(pulse.peak)) - log_threshold_shift(pulse.width);
    const std::uint8_t target = pulse.peak > 0.0 ? kDown : kUp;
    kernels::active().switch_below(log_threshold_, state_, cut, target);
}

void HysteronEnsemble::set_all(std::uint8_t s) { std::fill(state_.begin(), state_.end(), s); }

HysteronEnsemble sample_ensemble(std::size_t n, double mu_star, double w,
                                 const MerzKinetics& kinetics, std::uint64_t seed) {
    if (n == 0) throw ConfigError("sample_ensemble: population must be non-empty");
    if (!(w > 0.0)) throw ConfigError("sample_ensemble: width must be positive");
    if (!(kinetics.alpha > 0.0) || !(kinetics.tau_inf > 0.0)) {
        throw ConfigError("sample_ensemble: kinetics must have positive alpha and tau_inf");
    }
    const CounterRng rng(derive_seed(seed, 0));
    const double lo = mu_star - kTruncationWidths * w;
    const double hi = mu_star + kTruncationWidths * w;
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = rng.uniform(i);
        // Censor rather than reject: the law is unchanged inside the band.
        x[i] = std::clamp(mu_star + w * std::tan(kPi * (u - 0.5)), lo, hi);
    }
    return HysteronEnsemble(std::move(x), kinetics, mu_star, w, seed);
}

HysteronEnsemble apply_pulse(const HysteronEnsemble& e, const TriangularPulse& p) {
    HysteronEnsemble out = e;
    out.apply(p);
    return out;
}

double read_displacement(const HysteronEnsemble& e, const DeviceCalibration& cal,
                         std::uint64_t seed) {
    const double s = e.switched_fraction();
    double delta = (1.0 - s) * cal.delta_min + s * cal.delta_max;
    if (cal.read_noise_sigma > 0.0) delta += cal.read_noise_sigma * CounterRng(seed).normal(0);
    return delta;
}

double read_polarization(const HysteronEnsemble& e, double remanent_polarization,
                         double sigma, std::uint64_t seed) {
    double dp = 2.0 * remanent_polarization * (e.switched_fraction() - 0.5);
    if (sigma > 0.0) dp += sigma * CounterRng(seed).normal(0);
    return dp;
}

SwitchCurve run_protocol_sweep(HysteronEnsemble& e, const WriteProtocol& proto,
                               std::span<const double> vp_grid, const DeviceCalibration& cal,
                               const SweepOptions& opts) {
    proto.validate();
    cal.validate();
    for (std::size_t i = 0; i < vp_grid.size(); ++i) {
        if (!(vp_grid[i] > 0.0)) throw ConfigError("run_protocol_sweep: grid voltages must be positive");
        if (i > 0 && !(vp_grid[i] > vp_grid[i - 1])) {
            throw ConfigError("run_protocol_sweep: grid must be strictly increasing");
        }
    }
    const std::uint64_t stream_seed = derive_seed(e.seed(), 1000 + opts.noise_stream);
    const double polarity = proto.write_pulse.peak > 0.0 ? 1.0 : -1.0;

    std::vector<Sample> samples;
    samples.reserve(vp_grid.size());
    for (std::size_t i = 0; i < vp_grid.size(); ++i) {
        for (int r = 0; r < proto.reset_count; ++r) e.apply(proto.reset_pulse);
        const auto write = TriangularPulse::make(polarity * vp_grid[i], proto.write_pulse.width);
        for (int w = 0; w < proto.write_count; ++w) e.apply(write);

        const std::uint64_t read_seed = derive_seed(stream_seed, i);
        const double value =
            opts.kind == Observable::Displacement
                ? read_displacement(e, cal, read_seed)
                : read_polarization(e, opts.remanent_polarization, opts.polarization_sigma,
                                    read_seed);
        samples.push_back({vp_grid[i], value});
    }
    return SwitchCurve::make(proto.write_pulse.width, std::move(samples), opts.kind);
}

std::vector<double> uniform_grid(double v_lo, double v_hi, double step) {
    if (!(step > 0.0) || !(v_hi >= v_lo)) throw ConfigError("uniform_grid: invalid range");
    const auto count = static_cast<std::size_t>(std::floor((v_hi - v_lo) / step + 1e-9)) + 1;
    std::vector<double> grid(count);
    for (std::size_t i = 0; i < count; ++i) grid[i] = v_lo + step * static_cast<double>(i);
    return grid;
}

}  // namespace femsyn
