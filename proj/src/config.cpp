#include "femsyn/config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <string>

#include "femsyn/errors.hpp"
#include "femsyn/io.hpp"

namespace femsyn {

namespace {

using Setter = std::function<void(RunConfig&, std::string_view)>;

double as_double(std::string_view key, std::string_view v) {
    double out = 0.0;
    if (!io::parse_number(v, out)) {
        throw ConfigError("config: '" + std::string(key) + "' expects a number, got '" + std::string(v) + "'");
    }
    return out;
}

long long as_int(std::string_view key, std::string_view v) {
    const double d = as_double(key, v);
    if (d != static_cast<double>(static_cast<long long>(d))) {
        throw ConfigError("config: '" + std::string(key) + "' expects an integer");
    }
    return static_cast<long long>(d);
}

bool as_bool(std::string_view key, std::string_view v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("config: '" + std::string(key) + "' expects true/false");
}

std::vector<double> as_list(std::string_view key, std::string_view v) {
    std::vector<double> out;
    for (auto item : io::split(v, ',')) out.push_back(as_double(key, item));
    return out;
}

const std::map<std::string, Setter, std::less<>>& setters() {
    static const std::map<std::string, Setter, std::less<>> table = {
        {"seed", [](RunConfig& c, std::string_view v) { c.seed = static_cast<std::uint64_t>(as_int("seed", v)); }},
        {"device.delta_min", [](RunConfig& c, std::string_view v) { c.device.delta_min = as_double("device.delta_min", v); }},
        {"device.delta_max", [](RunConfig& c, std::string_view v) { c.device.delta_max = as_double("device.delta_max", v); }},
        {"device.V_ac", [](RunConfig& c, std::string_view v) { c.device.V_ac = as_double("device.V_ac", v); }},
        {"device.t_film", [](RunConfig& c, std::string_view v) { c.device.t_film = as_double("device.t_film", v); }},
        {"device.K_geom", [](RunConfig& c, std::string_view v) { c.device.K_geom = as_double("device.K_geom", v); }},
        {"device.read_noise_sigma", [](RunConfig& c, std::string_view v) { c.device.read_noise_sigma = as_double("device.read_noise_sigma", v); }},
        {"device.dac_bits", [](RunConfig& c, std::string_view v) { c.device.dac_bits = static_cast<int>(as_int("device.dac_bits", v)); }},
        {"device.dac_v_min", [](RunConfig& c, std::string_view v) { c.device.dac_range.v_min = as_double("device.dac_v_min", v); }},
        {"device.dac_v_max", [](RunConfig& c, std::string_view v) { c.device.dac_range.v_max = as_double("device.dac_v_max", v); }},
        {"protocol.reset_peak", [](RunConfig& c, std::string_view v) { c.protocol.reset_peak = as_double("protocol.reset_peak", v); }},
        {"protocol.reset_width", [](RunConfig& c, std::string_view v) { c.protocol.reset_width = as_double("protocol.reset_width", v); }},
        {"protocol.reset_count", [](RunConfig& c, std::string_view v) { c.protocol.reset_count = static_cast<int>(as_int("protocol.reset_count", v)); }},
        {"protocol.write_count", [](RunConfig& c, std::string_view v) { c.protocol.write_count = static_cast<int>(as_int("protocol.write_count", v)); }},
        {"protocol.pulse_widths_us", [](RunConfig& c, std::string_view v) {
             c.protocol.pulse_widths.clear();
             for (double us : as_list("protocol.pulse_widths_us", v)) c.protocol.pulse_widths.push_back(us * 1e-6);
         }},
        {"ensemble.n", [](RunConfig& c, std::string_view v) {
             const auto n = as_int("ensemble.n", v);
             if (n < 1) throw ConfigError("config: ensemble.n must be >= 1");
             c.ensemble.n = static_cast<std::size_t>(n);
         }},
        {"ensemble.mu_star", [](RunConfig& c, std::string_view v) { c.ensemble.mu_star = as_double("ensemble.mu_star", v); }},
        {"ensemble.w", [](RunConfig& c, std::string_view v) { c.ensemble.w = as_double("ensemble.w", v); }},
        {"ensemble.alpha", [](RunConfig& c, std::string_view v) { c.ensemble.alpha = as_double("ensemble.alpha", v); }},
        {"ensemble.tau_inf", [](RunConfig& c, std::string_view v) { c.ensemble.tau_inf = as_double("ensemble.tau_inf", v); }},
        {"sweep.v_min", [](RunConfig& c, std::string_view v) { c.sweep.v_min = as_double("sweep.v_min", v); }},
        {"sweep.v_max", [](RunConfig& c, std::string_view v) { c.sweep.v_max = as_double("sweep.v_max", v); }},
        {"sweep.v_step", [](RunConfig& c, std::string_view v) { c.sweep.v_step = as_double("sweep.v_step", v); }},
        {"sweep.observable", [](RunConfig& c, std::string_view v) {
             if (v == "displacement") c.sweep.observable = Observable::Displacement;
             else if (v == "polarization_change") c.sweep.observable = Observable::PolarizationChange;
             else throw ConfigError("config: sweep.observable must be displacement or polarization_change");
         }},
        {"sweep.remanent_polarization", [](RunConfig& c, std::string_view v) { c.sweep.remanent_polarization = as_double("sweep.remanent_polarization", v); }},
        {"sweep.polarization_sigma", [](RunConfig& c, std::string_view v) { c.sweep.polarization_sigma = as_double("sweep.polarization_sigma", v); }},
        {"fit.share_offsets", [](RunConfig& c, std::string_view v) { c.fit.share_offsets = as_bool("fit.share_offsets", v); }},
        {"fit.rel_tol", [](RunConfig& c, std::string_view v) { c.fit.rel_tol = as_double("fit.rel_tol", v); }},
        {"fit.max_iterations", [](RunConfig& c, std::string_view v) { c.fit.max_iterations = static_cast<int>(as_int("fit.max_iterations", v)); }},
        {"merz.tau_inf", [](RunConfig& c, std::string_view v) { c.merz.tau_inf = as_double("merz.tau_inf", v); }},
        {"merz.search_lo", [](RunConfig& c, std::string_view v) { c.merz.search.log10_lo = as_double("merz.search_lo", v); }},
        {"merz.search_hi", [](RunConfig& c, std::string_view v) { c.merz.search.log10_hi = as_double("merz.search_hi", v); }},
        {"levels.margin", [](RunConfig& c, std::string_view v) { c.levels.margin = as_double("levels.margin", v); }},
        {"levels.targets", [](RunConfig& c, std::string_view v) { c.levels.targets = as_list("levels.targets", v); }},
    };
    return table;
}

}  // namespace

void RunConfig::validate() const {
    device.validate();
    if (protocol.reset_count < 1 || protocol.write_count < 1) throw ConfigError("config: pulse counts must be >= 1");
    if (!(protocol.reset_peak != 0.0)) throw ConfigError("config: protocol.reset_peak must be non-zero");
    if (protocol.reset_width && !(*protocol.reset_width > 0.0)) throw ConfigError("config: protocol.reset_width must be positive");
    if (protocol.pulse_widths.empty()) throw ConfigError("config: protocol.pulse_widths_us is empty");
    for (double t : protocol.pulse_widths) {
        if (!(t > ensemble.tau_inf)) throw ConfigError("config: every pulse width must exceed ensemble.tau_inf");
    }
    if (!(ensemble.w > 0.0)) throw ConfigError("config: ensemble.w must be positive");
    if (!(ensemble.alpha > 0.0) || !(ensemble.tau_inf > 0.0)) throw ConfigError("config: ensemble.alpha and ensemble.tau_inf must be positive");
    if (!(sweep.v_min > 0.0) || !(sweep.v_max > sweep.v_min) || !(sweep.v_step > 0.0)) {
        throw ConfigError("config: sweep needs 0 < v_min < v_max and v_step > 0");
    }
    if (!(fit.rel_tol > 0.0) || fit.max_iterations < 1) throw ConfigError("config: invalid fit tolerances");
    if (merz.tau_inf && !(*merz.tau_inf > 0.0)) throw ConfigError("config: merz.tau_inf must be positive");
    if (!(merz.search.log10_hi > merz.search.log10_lo)) throw ConfigError("config: merz search interval is empty");
    if (levels.margin && !(*levels.margin >= 0.0)) throw ConfigError("config: levels.margin must be >= 0");
    for (double s : levels.targets) {
        if (!(s > 0.0 && s < 1.0)) throw ConfigError("config: levels.targets must lie in (0, 1)");
    }
}

RunConfig parse_config(std::istream& in) {
    RunConfig cfg;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto body = std::string_view(line);
        if (const auto hash = body.find('#'); hash != std::string_view::npos) body = body.substr(0, hash);
        body = io::trim(body);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        const auto key = io::trim(body.substr(0, eq));
        const auto value = io::trim(body.substr(eq + 1));
        const auto it = setters().find(key);
        if (it == setters().end()) {
            throw ConfigError("config line " + std::to_string(line_no) + ": unknown key '" + std::string(key) + "'");
        }
        it->second(cfg, value);
    }
    cfg.validate();
    return cfg;
}

RunConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config " + path.string());
    return parse_config(in);
}

}  // namespace femsyn
