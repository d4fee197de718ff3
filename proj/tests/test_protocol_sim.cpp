#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "femsyn/core_model.hpp"
#include "femsyn/errors.hpp"
#include "femsyn/kernels.hpp"
#include "femsyn/protocol_sim.hpp"
#include "oracles.hpp"

using namespace femsyn;

namespace {

constexpr double kFilm = 17e-9;
constexpr double kMuStar = 1.0694533;
constexpr double kAlpha = 3.6254;
constexpr double kTauInf = 14e-15;
constexpr double kW = 0.0382;

MerzKinetics kinetics() { return MerzKinetics::from_mu_star(kAlpha, kTauInf, kMuStar, kFilm); }

DeviceCalibration calibration() { return DeviceCalibration{-19.1364, 5.1152}; }

double analytic_median(double t_p) {
    return kMuStar - std::log10(std::log(t_p / kTauInf)) / kAlpha;
}

}  // namespace

TEST_CASE("pulse and protocol validation") {
    CHECK_THROWS_AS(TriangularPulse::make(1.0, 0.0), ConfigError);
    CHECK_THROWS_AS(TriangularPulse::make(0.0, 1e-6), ConfigError);
    auto p = WriteProtocol::standard(500e-6);
    CHECK_NOTHROW(p.validate());
    CHECK(p.reset_pulse.peak == -9.0);
    CHECK(p.reset_count == 2);
    CHECK(p.write_count == 2);
    p.write_pulse.peak = -1.0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = WriteProtocol::standard(500e-6);
    p.reset_count = 0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
}

TEST_CASE("sample_ensemble is deterministic in seed") {
    const auto a = sample_ensemble(10, kMuStar, kW, kinetics(), 42);
    const auto b = sample_ensemble(10, kMuStar, kW, kinetics(), 42);
    const auto c = sample_ensemble(10, kMuStar, kW, kinetics(), 43);
    CHECK(std::ranges::equal(a.log_threshold_at_ref(), b.log_threshold_at_ref()));
    CHECK_FALSE(std::ranges::equal(a.log_threshold_at_ref(), c.log_threshold_at_ref()));
    CHECK(a.size() == 10);
    CHECK(a.switched_fraction() == 0.0);
}

TEST_CASE("sample_ensemble rejects bad configuration") {
    CHECK_THROWS_AS(sample_ensemble(0, kMuStar, kW, kinetics(), 1), ConfigError);
    CHECK_THROWS_AS(sample_ensemble(10, kMuStar, 0.0, kinetics(), 1), ConfigError);
    CHECK_THROWS_AS(sample_ensemble(10, kMuStar, -0.1, kinetics(), 1), ConfigError);
}

TEST_CASE("samples stay inside the truncation band") {
    const auto e = sample_ensemble(200000, kMuStar, kW, kinetics(), 5);
    for (double x : e.log_threshold_at_ref()) {
        CHECK_FALSE(x < kMuStar - kTruncationWidths * kW);
        CHECK_FALSE(x > kMuStar + kTruncationWidths * kW);
    }
}

TEST_CASE("median log threshold at 500 us") {
    const auto e = sample_ensemble(100000, kMuStar, kW, kinetics(), 2024);
    std::vector<double> x(e.log_threshold_at_ref().begin(), e.log_threshold_at_ref().end());
    std::nth_element(x.begin(), x.begin() + x.size() / 2, x.end());
    const double median = x[x.size() / 2] + e.log_threshold_shift(500e-6);
    CHECK(std::abs(median - 0.687) <= 0.002);
    CHECK(std::abs(median - analytic_median(500e-6)) <= 0.002);
    CHECK(e.median_log_threshold(500e-6) == doctest::Approx(analytic_median(500e-6)).epsilon(1e-14));
}

TEST_CASE("degenerate width collapses all thresholds") {
    const auto e = sample_ensemble(1000, kMuStar, 1e-6, kinetics(), 3);
    // Censored draws land exactly on the band edge, up to rounding.
    for (double x : e.log_threshold_at_ref()) CHECK(std::abs(x - kMuStar) <= 1e-5 + 1e-12);
}

TEST_CASE("sub-threshold pulse leaves the state unchanged") {
    const auto e = sample_ensemble(10000, kMuStar, kW, kinetics(), 8);
    const auto after = apply_pulse(e, TriangularPulse::make(0.5, 500e-6));
    CHECK(std::ranges::equal(after.state(), e.state()));
}

TEST_CASE("repeating a pulse is a no-op") {
    const auto e = sample_ensemble(10000, kMuStar, kW, kinetics(), 9);
    const auto p = TriangularPulse::make(4.9, 500e-6);
    const auto once = apply_pulse(e, p);
    const auto twice = apply_pulse(once, p);
    CHECK(once.switched_fraction() > 0.0);
    CHECK(std::ranges::equal(once.state(), twice.state()));
}

TEST_CASE("pulse width at or below tau_inf is rejected") {
    auto e = sample_ensemble(10, kMuStar, kW, kinetics(), 1);
    CHECK_THROWS_AS(e.apply(TriangularPulse::make(5.0, kTauInf)), DomainError);
}

TEST_CASE("V50 pulse switches half the ensemble") {
    const std::size_t n = 100000;
    const auto e = sample_ensemble(n, kMuStar, kW, kinetics(), 77);
    const double v50 = std::pow(10.0, analytic_median(500e-6));
    const auto after = apply_pulse(e, TriangularPulse::make(v50, 500e-6));
    const double sigma = std::sqrt(0.25 / static_cast<double>(n));
    CHECK(std::abs(after.switched_fraction() - 0.5) <= 3 * sigma);
}

TEST_CASE("opposite polarity pulse switches back") {
    auto e = sample_ensemble(5000, kMuStar, kW, kinetics(), 4);
    e.apply(TriangularPulse::make(9.0, 1.0));
    const double down = e.switched_fraction();
    CHECK(down > 0.9);
    e.apply(TriangularPulse::make(-4.0, 1.0));
    CHECK(e.switched_fraction() < down);
}

TEST_CASE("reads: extremes and purity") {
    auto cal = calibration();
    auto e = sample_ensemble(1000, kMuStar, kW, kinetics(), 12);
    CHECK(read_displacement(e, cal, 1) == cal.delta_min);
    e.set_all(HysteronEnsemble::kDown);
    CHECK(read_displacement(e, cal, 1) == cal.delta_max);

    e = apply_pulse(sample_ensemble(1000, kMuStar, kW, kinetics(), 12), TriangularPulse::make(4.9, 500e-6));
    const std::vector<std::uint8_t> before(e.state().begin(), e.state().end());
    const double first = read_displacement(e, cal, 5);
    for (int i = 0; i < 50; ++i) CHECK(read_displacement(e, cal, 100 + i) == first);
    CHECK(std::ranges::equal(before, e.state()));

    cal.read_noise_sigma = 0.3;
    const double noisy_a = read_displacement(e, cal, 6);
    CHECK(noisy_a == read_displacement(e, cal, 6));
    CHECK(noisy_a != read_displacement(e, cal, 7));
    CHECK(std::ranges::equal(before, e.state()));

    CHECK(read_polarization(e, 20.0, 0.0, 1) == doctest::Approx(40.0 * (e.switched_fraction() - 0.5)));
}

TEST_CASE("reset completeness") {
    auto e = sample_ensemble(50000, kMuStar, kW, kinetics(), 21);
    e.set_all(HysteronEnsemble::kDown);
    const double t = 500e-6;
    const double v_reset = std::pow(10.0, e.median_log_threshold(t) + kTruncationWidths * kW);
    e.apply(TriangularPulse::make(-v_reset, t));
    CHECK(e.switched_fraction() == 0.0);
}

TEST_CASE("sweep produces a sigmoid crossing zero near 5 V") {
    auto e = sample_ensemble(100000, kMuStar, kW, kinetics(), 31);
    const auto grid = uniform_grid(0.5, 9.0, 0.005);
    CHECK(grid.size() == 1701);
    const auto curve = run_protocol_sweep(e, WriteProtocol::standard(500e-6), grid, calibration());
    CHECK(curve.size() == grid.size());
    CHECK(curve.t_p == 500e-6);
    CHECK(curve.samples.front().value == doctest::Approx(-19.1364));
    for (std::size_t i = 1; i < curve.size(); ++i) CHECK(curve.samples[i].value >= curve.samples[i - 1].value);
    double crossing = 0.0;
    for (std::size_t i = 1; i < curve.size(); ++i) {
        if (curve.samples[i - 1].value < 0.0 && curve.samples[i].value >= 0.0) crossing = curve.samples[i].v_p;
    }
    // The symmetric model crosses where S = |y0|/A, above the measured 5.05 V.
    CHECK(crossing > 4.9);
    CHECK(crossing < 5.6);
}

TEST_CASE("sweep rejects grids that violate the curve invariant") {
    auto e = sample_ensemble(100, kMuStar, kW, kinetics(), 1);
    const std::vector<double> one{5.0};
    CHECK_THROWS_AS(run_protocol_sweep(e, WriteProtocol::standard(500e-6), one, calibration()), ConfigError);
    const std::vector<double> unsorted{1.0, 3.0, 2.0, 4.0};
    CHECK_THROWS_AS(run_protocol_sweep(e, WriteProtocol::standard(500e-6), unsorted, calibration()), ConfigError);
}

TEST_CASE("large ensemble matches the analytic transfer curve") {
    const double t = 500e-6;
    auto e = sample_ensemble(1000000, kMuStar, kW, kinetics(), 404);
    const auto grid = uniform_grid(2.5, 9.0, 0.05);
    const auto cal = calibration();
    const auto curve = run_protocol_sweep(e, WriteProtocol::standard(t), grid, cal);
    const double mu = analytic_median(t);
    double sup = 0.0;
    for (const auto& s : curve.samples) {
        const double model = cal.delta_min + cal.span() * oracle::cauchy_cdf(std::log10(s.v_p), mu, kW);
        sup = std::max(sup, std::abs(s.value - model));
    }
    CHECK(sup < 0.1);
}

TEST_CASE("polarization sweep is an affine image of the switched fraction") {
    auto e = sample_ensemble(20000, kMuStar, kW, kinetics(), 55);
    const auto grid = uniform_grid(3.0, 8.0, 0.1);
    SweepOptions opts;
    opts.kind = Observable::PolarizationChange;
    opts.remanent_polarization = 15.0;
    const auto curve = run_protocol_sweep(e, WriteProtocol::standard(100e-6), grid, calibration(), opts);
    CHECK(curve.kind == Observable::PolarizationChange);
    const double mu = 1.0694533 - std::log10(std::log(100e-6 / kTauInf)) / kAlpha;
    for (const auto& smp : curve.samples) {
        const double model = 30.0 * (oracle::cauchy_cdf(std::log10(smp.v_p), mu, kW) - 0.5);
        CHECK(std::abs(smp.value - model) < 0.3);
    }
}

TEST_CASE("kernel variant does not change simulation results") {
    const auto grid = uniform_grid(3.0, 8.0, 0.01);
    const kernels::Isa before = kernels::active().isa;
    kernels::set_active(kernels::Isa::Scalar);
    auto a = sample_ensemble(30000, kMuStar, kW, kinetics(), 66);
    const auto ca = run_protocol_sweep(a, WriteProtocol::standard(20e-6), grid, calibration());
    kernels::set_active(kernels::detected_isa());
    auto b = sample_ensemble(30000, kMuStar, kW, kinetics(), 66);
    const auto cb = run_protocol_sweep(b, WriteProtocol::standard(20e-6), grid, calibration());
    kernels::set_active(before);
    for (std::size_t i = 0; i < ca.size(); ++i) CHECK(ca.samples[i].value == cb.samples[i].value);
}

TEST_CASE("uniform_grid") {
    const auto g = uniform_grid(0.5, 9.0, 0.5);
    CHECK(g.size() == 18);
    CHECK(g.back() == doctest::Approx(9.0));
    CHECK_THROWS_AS(uniform_grid(1.0, 0.0, 0.1), ConfigError);
    CHECK_THROWS_AS(uniform_grid(0.0, 1.0, 0.0), ConfigError);
}
