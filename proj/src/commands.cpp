#include "femsyn/commands.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <ostream>
#include <sstream>

#include "femsyn/calibration.hpp"
#include "femsyn/config.hpp"
#include "femsyn/errors.hpp"
#include "femsyn/io.hpp"
#include "femsyn/levels.hpp"
#include "femsyn/merz.hpp"
#include "femsyn/plotdata.hpp"
#include "femsyn/protocol_sim.hpp"
#include "femsyn/rng.hpp"

namespace femsyn::cli {

namespace fs = std::filesystem;

namespace {

class UsageError : public Error {
public:
    using Error::Error;
};

struct Context {
    RunConfig config;
    fs::path out_dir;
    std::ostream& out;
};

std::vector<SwitchCurve> load_sweep(const std::string& path) {
    if (!fs::exists(path)) throw UsageError("input file not found: " + path);
    if (fs::file_size(path) == 0) throw UsageError("input file is empty: " + path);
    return io::parse_sweep_csv(fs::path(path));
}

std::vector<io::FitRow> load_fits(const std::string& path) {
    if (!fs::exists(path)) throw UsageError("fit report not found: " + path);
    if (fs::file_size(path) == 0) throw UsageError("fit report is empty: " + path);
    return io::read_fit_report(fs::path(path));
}

void write_file(const fs::path& path, const std::string& text) {
    auto out = io::open_output(path);
    out << text;
    if (!out) throw IoError("write failed: " + path.string());
}

FitOptions fit_options(const RunConfig& cfg) {
    FitOptions o;
    o.rel_tol = cfg.fit.rel_tol;
    o.max_iterations = cfg.fit.max_iterations;
    return o;
}

void cmd_fit(Context& ctx, const std::string& input, bool share_offsets) {
    const auto curves = load_sweep(input);
    const auto opts = fit_options(ctx.config);
    std::vector<LorentzianFit> fits;
    if (curves.size() == 1) {
        fits.push_back(fit_lorentzian_cdf(curves.front(), opts));
    } else {
        fits = fit_family(curves, share_offsets || ctx.config.fit.share_offsets, opts);
    }

    // fit_family orders by t_p; parse_sweep_csv already returns that order.
    std::vector<io::FitRow> rows;
    for (std::size_t i = 0; i < fits.size(); ++i) {
        const auto& c = curves[i];
        io::FitRow row{fits[i], std::nullopt};
        if (c.kind == Observable::Displacement) {
            row.vc_mech = extract_markers(&c, nullptr).vc_mech;
        }
        rows.push_back(row);
    }

    std::ostringstream report;
    io::write_fit_report(report, rows);
    write_file(ctx.out_dir / "fits.csv", report.str());
    ctx.out << report.str();

    if (curves.front().kind == Observable::PolarizationChange) {
        for (const auto& c : curves) {
            const auto m = extract_markers(nullptr, &c);
            ctx.out << "# t_p_us=" << io::format_us(c.t_p) << " Vc_elec_V="
                    << (m.vc_elec ? io::format_number(*m.vc_elec) : std::string("nan")) << '\n';
        }
    }

    const std::vector<plot::Payload> payloads{plot::FitOverlay{curves, fits}, plot::Pdf{fits}};
    plot::emit_plotdata(ctx.out_dir / "plot", payloads);
}

void cmd_merz(Context& ctx, const std::string& fits_path, std::optional<double> tau_inf,
              std::optional<std::string> search) {
    const auto rows = load_fits(fits_path);
    std::vector<LorentzianFit> fits;
    for (const auto& r : rows) fits.push_back(r.fit);
    const auto points = mu_points(fits);

    if (!tau_inf) tau_inf = ctx.config.merz.tau_inf;
    TauSearch ts = ctx.config.merz.search;
    if (search) {
        const auto parts = io::split(*search, ',');
        if (parts.size() != 2 || !io::parse_number(parts[0], ts.log10_lo) ||
            !io::parse_number(parts[1], ts.log10_hi) || !(ts.log10_hi > ts.log10_lo)) {
            throw UsageError("--search expects 'lo,hi' in log10 seconds with lo < hi");
        }
    }
    if (tau_inf && search) throw UsageError("--tau-inf and --search are mutually exclusive");

    const auto reg = tau_inf ? regress_mu_fixed_tau(points, *tau_inf) : fit_merz_nested(points, ts);

    std::ostringstream report;
    io::write_merz_report(report, reg);
    write_file(ctx.out_dir / "merz.csv", report.str());
    ctx.out << report.str();
    if (reg.degenerate) ctx.out << "# warning: slope is ~0, alpha is unbounded\n";

    const std::vector<plot::Payload> payloads{plot::MerzLine{reg}};
    plot::emit_plotdata(ctx.out_dir / "plot", payloads);
}

void cmd_collapse(Context& ctx, const std::string& input, const std::string& fits_path) {
    const auto curves = load_sweep(input);
    const auto rows = load_fits(fits_path);
    std::map<std::string, LorentzianFit> by_tp;
    for (const auto& r : rows) by_tp[io::format_us(r.fit.t_p)] = r.fit;

    plot::Collapse payload;
    std::vector<CollapsePoint> all;
    std::vector<io::CollapseGroup> groups;
    for (const auto& c : curves) {
        const auto it = by_tp.find(io::format_us(c.t_p));
        if (it == by_tp.end()) {
            throw UsageError("no fit for t_p = " + io::format_us(c.t_p) + " us in " + fits_path);
        }
        auto pts = collapse_transform(c, it->second);
        all.insert(all.end(), pts.begin(), pts.end());
        payload.t_p.push_back(c.t_p);
        payload.points.push_back(pts);
        groups.push_back({c.t_p, std::move(pts)});
    }
    const double rms = collapse_rms(all);

    std::ostringstream report;
    io::write_collapse_csv(report, groups);
    write_file(ctx.out_dir / "collapse.csv", report.str());
    ctx.out << "collapse_rms," << io::format_number(rms) << '\n'
            << "points," << all.size() << '\n';

    const std::vector<plot::Payload> payloads{std::move(payload)};
    plot::emit_plotdata(ctx.out_dir / "plot", payloads);
}

void cmd_levels(Context& ctx, const std::string& input, std::optional<double> margin) {
    const auto curves = load_sweep(input);
    if (!margin) margin = ctx.config.levels.margin;
    std::vector<plot::Payload> payloads;
    ctx.out << "t_p_us,levels,source_count,file\n";
    for (const auto& c : curves) {
        const auto levels = margin ? s0_filter_with_margin(c, *margin) : s0_filter(c);
        const auto name = "levels_" + io::format_us(c.t_p) + "us.csv";
        std::ostringstream csv;
        io::write_levels_csv(csv, levels);
        write_file(ctx.out_dir / name, csv.str());
        ctx.out << io::format_us(c.t_p) << ',' << levels.count() << ',' << levels.source_count
                << ',' << name << '\n';
        payloads.emplace_back(plot::StaircasePlot{c.t_p, staircase_of(levels)});
    }
    plot::emit_plotdata(ctx.out_dir / "plot", payloads);
}

void cmd_simulate(Context& ctx, const std::string& out_csv) {
    const auto& cfg = ctx.config;
    const auto kinetics = MerzKinetics::from_mu_star(cfg.ensemble.alpha, cfg.ensemble.tau_inf,
                                                     cfg.ensemble.mu_star, cfg.device.t_film);
    const auto base = sample_ensemble(cfg.ensemble.n, cfg.ensemble.mu_star, cfg.ensemble.w,
                                      kinetics, cfg.seed);
    const auto grid = uniform_grid(cfg.sweep.v_min, cfg.sweep.v_max, cfg.sweep.v_step);

    std::vector<std::future<SwitchCurve>> jobs;
    for (std::size_t i = 0; i < cfg.protocol.pulse_widths.size(); ++i) {
        const double t_p = cfg.protocol.pulse_widths[i];
        WriteProtocol proto;
        proto.reset_pulse = TriangularPulse::make(-std::abs(cfg.protocol.reset_peak),
                                                  cfg.protocol.reset_width.value_or(t_p));
        proto.reset_count = cfg.protocol.reset_count;
        proto.write_pulse = TriangularPulse::make(1.0, t_p);
        proto.write_count = cfg.protocol.write_count;
        SweepOptions opts;
        opts.kind = cfg.sweep.observable;
        opts.remanent_polarization = cfg.sweep.remanent_polarization;
        opts.polarization_sigma = cfg.sweep.polarization_sigma;
        opts.noise_stream = i;
        jobs.push_back(std::async(std::launch::async, [&base, proto, &grid, &cfg, opts] {
            HysteronEnsemble e = base;
            return run_protocol_sweep(e, proto, grid, cfg.device, opts);
        }));
    }
    std::vector<SwitchCurve> curves;
    for (auto& j : jobs) curves.push_back(j.get());
    std::sort(curves.begin(), curves.end(),
              [](const SwitchCurve& a, const SwitchCurve& b) { return a.t_p < b.t_p; });

    fs::path target(out_csv);
    io::write_sweep_csv(target, curves);
    ctx.out << "wrote " << curves.size() << " curve(s), " << grid.size()
            << " samples each, n=" << cfg.ensemble.n << " seed=" << cfg.seed << " -> "
            << target.string() << '\n';
}

void cmd_program(Context& ctx, const std::string& fits_path, std::optional<std::string> targets_text) {
    const auto rows = load_fits(fits_path);
    std::vector<double> targets = ctx.config.levels.targets;
    if (targets_text) {
        targets.clear();
        for (auto item : io::split(*targets_text, ',')) {
            double s = 0.0;
            if (!io::parse_number(item, s)) throw UsageError("--targets expects a comma-separated list of numbers");
            targets.push_back(s);
        }
    }
    if (targets.empty()) throw UsageError("program: no targets given (--targets or levels.targets)");

    std::ostringstream table;
    table << "t_p_us,target,V_exact_V,code,V_code_V,achieved,delta_nm\n";
    for (const auto& r : rows) {
        for (double s : targets) {
            const auto p = program_weight(r.fit, s, ctx.config.device);
            table << io::format_us(r.fit.t_p) << ',' << io::format_number(p.target) << ','
                  << io::format_number(p.v_exact) << ',' << p.code << ','
                  << io::format_number(p.v_code) << ',' << io::format_number(p.achieved) << ','
                  << io::format_number(p.displacement) << '\n';
        }
    }
    write_file(ctx.out_dir / "program.csv", table.str());
    ctx.out << table.str();
}

}  // namespace

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Ferroelectric MEMS synapse calibration toolkit", "femsyn"};
    app.require_subcommand(1);

    std::optional<std::uint64_t> seed;
    std::string out_dir;
    std::string config_path;
    app.add_option("--seed", seed, "Random seed (overrides the config seed)");
    app.add_option("--out-dir", out_dir, "Directory for reports and plot data");
    app.add_option("--config", config_path, "Run configuration file");

    std::string input, fits_path, out_csv;
    bool share_offsets = false;
    std::optional<double> tau_inf, margin;
    std::optional<std::string> search, targets;

    auto* fit = app.add_subcommand("fit", "Fit the Lorentzian CDF to each sweep");
    fit->add_option("--input", input, "Sweep CSV")->required();
    fit->add_flag("--share-offsets", share_offsets, "Joint fit with common y0 and A");

    auto* merz = app.add_subcommand("merz", "Merz regression of fitted medians");
    merz->add_option("--fits", fits_path, "Fit report")->required();
    merz->add_option("--tau-inf", tau_inf, "Fixed attempt time [s]");
    merz->add_option("--search", search, "log10 tau_inf search interval 'lo,hi'");

    auto* collapse = app.add_subcommand("collapse", "Universal collapse of sweeps");
    collapse->add_option("--input", input, "Sweep CSV")->required();
    collapse->add_option("--fits", fits_path, "Fit report")->required();

    auto* levels = app.add_subcommand("levels", "Monotone level extraction");
    levels->add_option("--input", input, "Sweep CSV")->required();
    levels->add_option("--margin", margin, "Noise margin [nm]");

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo protocol simulation");
    simulate->add_option("--config", config_path, "Run configuration file")->required();
    simulate->add_option("--out", out_csv, "Output sweep CSV")->required();

    auto* program = app.add_subcommand("program", "DAC codes for target weights");
    program->add_option("--fits", fits_path, "Fit report")->required();
    program->add_option("--targets", targets, "Comma-separated s_bar targets in (0,1)");

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n' << app.help();
        return kUsageError;
    }

    try {
        Context ctx{RunConfig{}, fs::path("."), out};
        if (!config_path.empty()) ctx.config = parse_config(fs::path(config_path));
        if (seed) ctx.config.seed = *seed;
        if (!out_dir.empty()) {
            ctx.out_dir = out_dir;
        } else if (const char* env = std::getenv("FEMSYN_OUT_DIR"); env && *env) {
            ctx.out_dir = env;
        }

        if (fit->parsed()) cmd_fit(ctx, input, share_offsets);
        else if (merz->parsed()) cmd_merz(ctx, fits_path, tau_inf, search);
        else if (collapse->parsed()) cmd_collapse(ctx, input, fits_path);
        else if (levels->parsed()) cmd_levels(ctx, input, margin);
        else if (simulate->parsed()) cmd_simulate(ctx, out_csv);
        else if (program->parsed()) cmd_program(ctx, fits_path, targets);
        return kOk;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kUsageError;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kUsageError;
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << '\n';
        return kParseError;
    } catch (const IoError& e) {
        err << "i/o error: " << e.what() << '\n';
        return kIoError;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kNumericError;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return kInternalError;
    }
}

}  // namespace femsyn::cli
