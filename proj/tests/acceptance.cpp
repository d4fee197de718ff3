// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "femsyn/calibration.hpp"
#include "femsyn/core_model.hpp"
#include "femsyn/errors.hpp"
#include "femsyn/io.hpp"
#include "femsyn/levels.hpp"
#include "femsyn/merz.hpp"
#include "femsyn/protocol_sim.hpp"
#include "oracles.hpp"
#include "synthetic.hpp"
#include "published_fits.hpp"

using namespace femsyn;
using namespace femsyn::testdata;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + std::string("violated: ") + what;
        }
    }
    void note(const std::string& s) { detail += (detail.empty() ? "" : "; ") + s; }
};

std::string num(double v, int digits = 6) {
    std::ostringstream s;
    s.precision(digits);
    s << v;
    return s.str();
}

int failures = 0;

void criterion(int id, const char* title, double budget_s, const std::function<void(Outcome&)>& body) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        body(o);
    } catch (const std::exception& e) {
        o.pass = false;
        o.note(std::string("exception: ") + e.what());
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.require(dt < budget_s, "runtime " + num(dt, 3) + " s >= " + num(budget_s) + " s");
    if (!o.pass) ++failures;
    std::printf("[%s] criterion %d: %s (%.3f s) %s\n", o.pass ? "PASS" : "FAIL", id, title, dt,
                o.detail.c_str());
    std::fflush(stdout);
}

std::vector<MuPoint> table_points() {
    std::vector<MuPoint> p;
    for (const auto& r : kPublishedFits) p.push_back({r.t_p_us * 1e-6, r.mu});
    return p;
}

}  // namespace

int main() {
    criterion(1, "V50 identity 10^mu vs published V50", 1.0, [](Outcome& o) {
        for (const auto& r : kPublishedFits) {
            const auto fit = LorentzianFit::from_parameters(r.y0, r.A, r.mu, r.w, r.t_p_us * 1e-6);
            const double dev = std::abs(fit.v50 - r.v50);
            o.require(dev <= 0.001, num(r.t_p_us) + " us: |" + num(fit.v50) + " - " + num(r.v50) + "| > 0.001");
        }
        o.note("all five rows within 0.001 V");
    });

    criterion(2, "Merz regression anchor at tau_inf = 14 fs", 1.0, [](Outcome& o) {
        const auto pts = table_points();
        const auto reg = regress_mu_fixed_tau(pts, kPaperTauInf);
        std::vector<double> x, y;
        for (const auto& p : pts) {
            x.push_back(std::log10(std::log(p.t_p / kPaperTauInf)));
            y.push_back(p.mu);
        }
        const auto [slope, intercept] = oracle::line_fit(x, y);
        o.require(std::abs(reg.slope - slope) <= 1e-10, "slope disagrees with hand least squares");
        o.require(std::abs(reg.mu_star - intercept) <= 1e-10, "intercept disagrees with hand least squares");
        o.require(std::abs(reg.slope - (-0.276)) <= 0.001, "slope " + num(reg.slope) + " not -0.276 +/- 0.001");
        o.require(std::abs(reg.alpha - kPaperAlpha) <= 0.05, "alpha " + num(reg.alpha) + " not 3.62 +/- 0.05");
        o.note("slope=" + num(reg.slope) + " alpha=" + num(reg.alpha) + " mu*=" + num(reg.mu_star) +
               " R2=" + num(reg.r_squared));
    });

    criterion(3, "nested kinetics recovery", 1.0, [](Outcome& o) {
        std::vector<MuPoint> pts;
        for (const auto& r : kPublishedFits) {
            const double t = r.t_p_us * 1e-6;
            pts.push_back({t, 1.0694 - std::log10(std::log(t / 1.4e-14)) / 3.62});
        }
        const auto reg = fit_merz_nested(pts);
        const double dlog = std::log10(reg.tau_inf) - std::log10(1.4e-14);
        o.require(std::abs(reg.alpha - 3.62) <= 0.02, "alpha " + num(reg.alpha));
        o.require(std::abs(dlog) <= 0.2, "log10 tau_inf off by " + num(dlog));
        o.note("alpha=" + num(reg.alpha) + " tau_inf=" + num(reg.tau_inf));
    });

    // Shared by criteria 4 and 5.
    const double sigma = 0.3;
    std::vector<std::vector<SwitchCurve>> noisy(20);
    std::vector<std::vector<LorentzianFit>> noisy_fits(20);

    criterion(4, "fit recovery under sigma = 0.3 nm noise, 20 seeds", 10.0, [&](Outcome& o) {
        double worst_mu = 0.0, worst_w = 0.0;
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            for (std::size_t i = 0; i < kPublishedFits.size(); ++i) {
                const auto& r = kPublishedFits[i];
                noisy[seed].push_back(row_curve(r, sigma, 1000 * (seed + 1) + i));
                noisy_fits[seed].push_back(fit_lorentzian_cdf(noisy[seed].back()));
                worst_mu = std::max(worst_mu, std::abs(noisy_fits[seed].back().mu - r.mu));
                worst_w = std::max(worst_w, std::abs(noisy_fits[seed].back().w - r.w));
            }
        }
        o.require(worst_mu <= 0.002, "max |dmu| = " + num(worst_mu));
        o.require(worst_w <= 0.004, "max |dw| = " + num(worst_w));
        o.note("max |dmu|=" + num(worst_mu) + " max |dw|=" + num(worst_w));
    });

    criterion(5, "data collapse rms", 5.0, [&](Outcome& o) {
        double worst = 0.0;
        double bound = 1e300;
        for (const auto& r : kPublishedFits) bound = std::min(bound, 2.0 * sigma / r.A);
        for (std::size_t seed = 0; seed < noisy.size(); ++seed) {
            std::vector<CollapsePoint> all;
            for (std::size_t i = 0; i < noisy[seed].size(); ++i) {
                const auto pts = collapse_transform(noisy[seed][i], noisy_fits[seed][i]);
                all.insert(all.end(), pts.begin(), pts.end());
            }
            o.require(!all.empty(), "criterion 4 curves missing");
            if (!all.empty()) worst = std::max(worst, collapse_rms(all));
        }
        std::vector<CollapsePoint> clean;
        for (const auto& r : kPublishedFits) {
            const auto c = row_curve(r);
            const auto pts = collapse_transform(c, fit_lorentzian_cdf(c));
            clean.insert(clean.end(), pts.begin(), pts.end());
        }
        const double clean_rms = collapse_rms(clean);
        o.require(worst <= bound, "noisy rms " + num(worst) + " > " + num(bound));
        o.require(clean_rms < 1e-9, "noiseless rms " + num(clean_rms));
        o.note("noisy rms max=" + num(worst) + " (bound " + num(bound) + "), noiseless=" + num(clean_rms));
    });

    criterion(6, "Monte Carlo vs analytic, width invariance", 30.0, [](Outcome& o) {
        const double mu_star = 1.0694533, w = 0.0382, alpha = 3.6254, tau = 14e-15;
        const auto kin = MerzKinetics::from_mu_star(alpha, tau, mu_star, 17e-9);
        DeviceCalibration cal{0.0, 1.0};
        const auto grid = uniform_grid(0.5, 9.0, 0.005);
        const auto base = sample_ensemble(100000, mu_star, w, kin, 20240501);

        const double t500 = 500e-6;
        auto e = base;
        const auto curve = run_protocol_sweep(e, WriteProtocol::standard(t500), grid, cal);
        const double mu = base.median_log_threshold(t500);
        const double lo = mu - kTruncationWidths * w, hi = mu + kTruncationWidths * w;
        double sup_band = 0.0, sup_all = 0.0;
        std::size_t in_band = 0;
        for (const auto& s : curve.samples) {
            const double x = std::log10(s.v_p);
            const double d = std::abs(s.value - switched_fraction_cdf(ThresholdDistribution{mu, w}, s.v_p));
            sup_all = std::max(sup_all, d);
            if (x >= lo && x <= hi) {
                sup_band = std::max(sup_band, d);
                ++in_band;
            }
        }
        o.require(in_band > 1000, "too few grid points inside the band");
        o.require(sup_band < 0.01, "sup-norm inside band " + num(sup_band));

        std::vector<SwitchCurve> curves;
        for (const auto& r : kPublishedFits) {
            auto copy = base;
            curves.push_back(run_protocol_sweep(copy, WriteProtocol::standard(r.t_p_us * 1e-6), grid, cal));
        }
        const auto fits = fit_family(curves, false);
        double wmin = 1e9, wmax = -1e9, wsum = 0.0;
        for (const auto& f : fits) {
            wmin = std::min(wmin, f.w);
            wmax = std::max(wmax, f.w);
            wsum += f.w;
        }
        const double spread = (wmax - wmin) / (wsum / static_cast<double>(fits.size()));
        o.require(spread < 0.10, "w spread " + num(spread));
        o.note("sup|S_mc - S| in band=" + num(sup_band) + " (" + std::to_string(in_band) +
               " pts; full grid incl. censored tail=" + num(sup_all) + "), w spread=" + num(spread));
    });

    criterion(7, "S0 filter properties and examples", 5.0, [](Outcome& o) {
        auto unit = [](const std::vector<double>& y) {
            std::vector<Sample> s;
            for (std::size_t i = 0; i < y.size(); ++i) s.push_back({static_cast<double>(i + 1), y[i]});
            return s;
        };
        auto volts = [](const LevelSet& l) {
            std::vector<double> v;
            for (const auto& k : l.kept) v.push_back(k.v_p);
            return v;
        };
        o.require(s0_filter(unit({1, 2, 3})).count() == 3, "[1,2,3]");
        o.require(s0_filter(unit({3, 2, 1})).count() == 1, "[3,2,1]");
        o.require(volts(s0_filter(unit({0.5, 0.4, 0.6, 0.55, 0.7}))) == std::vector<double>{1, 3, 5},
                  "[0.5,0.4,0.6,0.55,0.7]");

        std::mt19937_64 gen(777);
        std::uniform_int_distribution<int> len(1, 50), q(0, 5);
        std::uniform_real_distribution<double> val(0.0, 1.0);
        const int trials = 2000;
        int bad = 0;
        for (int t = 0; t < trials; ++t) {
            std::vector<double> y(len(gen));
            for (auto& v : y) v = t % 2 ? val(gen) : q(gen);
            const auto samples = unit(y);
            const auto out = s0_filter(samples);
            std::vector<double> vals;
            for (const auto& k : out.kept) vals.push_back(k.value);
            bool ok = std::is_sorted(vals.begin(), vals.end());
            std::vector<double> ref;
            for (auto i : oracle::weak_prefix_maxima(y)) ref.push_back(y[i]);
            ok = ok && vals == ref;
            std::vector<Sample> again;
            for (const auto& k : out.kept) again.push_back({k.v_p, k.value});
            ok = ok && volts(s0_filter(again)) == volts(out);
            auto perm = samples;
            std::shuffle(perm.begin(), perm.end(), gen);
            ok = ok && volts(s0_filter(perm)) == volts(out);
            // Inclusion maximality: every rejected sample lies below the level kept before it.
            const auto kv = volts(out);
            for (const auto& s : samples) {
                if (std::binary_search(kv.begin(), kv.end(), s.v_p)) continue;
                const auto it = std::upper_bound(kv.begin(), kv.end(), s.v_p);
                ok = ok && it != kv.begin() && s.value < out.kept[(it - kv.begin()) - 1].value;
            }
            if (!ok) ++bad;
        }
        o.require(bad == 0, std::to_string(bad) + " of " + std::to_string(trials) + " sequences");
        o.note(std::to_string(trials) + " random sequences, 3 examples");
    });

    criterion(8, "coercive markers on fixtures", 1.0, [](Outcome& o) {
        const auto curves =
            io::parse_sweep_csv(std::filesystem::path(FEMSYN_FIXTURE_DIR) / "coercive_fixture.csv");
        o.require(curves.size() == kPublishedFits.size(), "fixture has " + std::to_string(curves.size()) + " groups");
        for (std::size_t i = 0; i < curves.size() && i < kPublishedFits.size(); ++i) {
            const auto& c = curves[i];
            const double step = c.samples[1].v_p - c.samples[0].v_p;
            const double vc = zero_crossing(c);
            o.require(std::abs(vc - kPublishedFits[i].vc_mech) <= step,
                      io::format_us(c.t_p) + " us: " + num(vc) + " vs " + num(kPublishedFits[i].vc_mech));
        }
        const double mu = kPublishedFits[4].mu, w = kPublishedFits[4].w;
        const double lo = std::pow(10.0, mu - 0.26), hi = std::pow(10.0, mu + 0.26);
        std::vector<double> grid;
        const int n = 1241;
        for (int i = 0; i < n; ++i) grid.push_back(lo + (hi - lo) * i / (n - 1));
        const auto pol = model_curve(-20.0, 40.0, mu, w, 5e-4, grid, 0.0, 0, Observable::PolarizationChange);
        const double vh = half_saturation_crossing(pol);
        o.require(std::abs(vh - std::pow(10.0, mu)) <= (hi - lo) / (n - 1), "half-saturation " + num(vh));
        o.note("five V_c,mech within one grid step; half-saturation " + num(vh) + " vs 10^mu " +
               num(std::pow(10.0, mu)));
    });

    criterion(9, "programming round trip on an 18-bit 0.5-9 V DAC", 1.0, [](Outcome& o) {
        const auto& r = kPublishedFits[4];
        const auto fit = LorentzianFit::from_parameters(r.y0, r.A, r.mu, r.w, r.t_p_us * 1e-6);
        DeviceCalibration cal{r.y0, r.y0 + r.A};
        cal.dac_bits = 18;
        cal.dac_range = {0.5, 9.0};
        const auto d = fit.distribution();
        double worst = 0.0;
        int ok = 0;
        std::string unreachable;
        for (int i = 1; i < 64; ++i) {
            const double s = i / 64.0;
            try {
                const double v = program_voltage_for_weight(fit, s, cal);
                const double slope = threshold_pdf(d, std::log10(v)) / (v * kLn10);
                const double err = std::abs(switched_fraction_cdf(d, v) - s);
                const double bound = slope * 0.5 * cal.dac_step();
                worst = std::max(worst, err);
                if (err <= bound * 1.01 + 1e-15 && err < 1e-4) ++ok;
                else o.require(false, std::to_string(i) + "/64 error " + num(err) + " > " + num(bound));
            } catch (const RangeError&) {
                const double v = std::pow(10.0, r.mu + r.w * std::tan(kPi * (s - 0.5)));
                unreachable += (unreachable.empty() ? "" : ", ") + std::to_string(i) + "/64 needs " + num(v, 4) + " V";
            }
        }
        o.require(unreachable.empty(), "outside DAC range: " + unreachable);
        o.note(std::to_string(ok) + "/63 targets within the quantization bound, max |ds|=" + num(worst));
    });

    criterion(10, "KAI limit of the NLS integral", 5.0, [](Outcome& o) {
        double worst = 0.0;
        const double tau0 = 1e-6;
        for (double n : {1.0, 2.0, 3.0}) {
            const auto spec = NlsSpec::from_ln_axis(n, std::log(tau0), 1e-9);
            for (int k = 0; k <= 400; ++k) {
                const double r = std::pow(10.0, -2.0 + 4.0 * k / 400.0);
                const double kai = -std::expm1(-std::pow(r, n));
                worst = std::max(worst, std::abs(nls_switched_fraction(spec, r * tau0) - kai));
            }
        }
        o.require(worst <= 1e-6, "max deviation " + num(worst));
        o.note("max |S_nls - S_kai|=" + num(worst));
    });

    std::printf("%d of 10 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
