#include "femsyn/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "femsyn/errors.hpp"

namespace femsyn::io {

namespace {

std::string format_precision(double v, int precision) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, precision);
    return std::string(buf, res.ptr);
}

}  // namespace

std::string format_number(double v) { return format_precision(v, 17); }

std::string format_us(double t_p_seconds) { return format_precision(t_p_seconds * 1e6, 15); }

bool parse_number(std::string_view text, double& out) {
    text = trim(text);
    if (text.empty()) return false;
    if (text == "nan") {
        out = std::nan("");
        return true;
    }
    if (text.front() == '+') text.remove_prefix(1);
    const auto res = std::from_chars(text.data(), text.data() + text.size(), out);
    return res.ec == std::errc() && res.ptr == text.data() + text.size();
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::string_view value_column(Observable kind) noexcept {
    return kind == Observable::Displacement ? "delta_nm" : "dP_uC_cm2";
}

std::vector<SwitchCurve> parse_sweep_csv(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    Observable kind = Observable::Displacement;

    struct Group {
        std::size_t first_line = 0;
        double t_p = 0.0;
        std::vector<Sample> samples;
    };
    std::map<double, Group> groups;  // keyed by t_p in microseconds

    while (std::getline(in, line)) {
        ++line_no;
        const auto body = trim(line);
        if (body.empty() || body.front() == '#') continue;
        const auto cols = split(body, ',');
        if (!have_header) {
            if (cols.size() != 3 || cols[0] != "t_p_us" || cols[1] != "V_p_V") {
                throw ParseError(line_no, "header must be 't_p_us,V_p_V,<delta_nm|dP_uC_cm2>'");
            }
            if (cols[2] == value_column(Observable::Displacement)) {
                kind = Observable::Displacement;
            } else if (cols[2] == value_column(Observable::PolarizationChange)) {
                kind = Observable::PolarizationChange;
            } else {
                throw ParseError(line_no, "unknown value column/unit '" + std::string(cols[2]) + "'");
            }
            have_header = true;
            continue;
        }
        if (cols.size() != 3) {
            throw ParseError(line_no, "expected 3 columns, found " + std::to_string(cols.size()));
        }
        double t_us = 0.0, v = 0.0, value = 0.0;
        if (!parse_number(cols[0], t_us) || !(t_us > 0.0)) throw ParseError(line_no, "invalid t_p_us");
        if (!parse_number(cols[1], v) || !(v > 0.0) || !std::isfinite(v)) throw ParseError(line_no, "invalid V_p_V");
        if (!parse_number(cols[2], value) || !std::isfinite(value)) throw ParseError(line_no, "invalid value");

        auto [it, inserted] = groups.try_emplace(t_us);
        auto& g = it->second;
        if (inserted) {
            g.first_line = line_no;
            g.t_p = t_us * 1e-6;
        }
        if (!g.samples.empty() && !(v > g.samples.back().v_p)) {
            throw ParseError(line_no, v == g.samples.back().v_p
                                          ? "duplicated V_p within pulse width group"
                                          : "V_p not increasing within pulse width group");
        }
        g.samples.push_back({v, value});
    }
    if (!have_header) throw ParseError(line_no == 0 ? 1 : line_no, "missing header");
    if (groups.empty()) throw ParseError(line_no, "no data rows");

    std::vector<SwitchCurve> curves;
    for (auto& [t_us, g] : groups) {
        try {
            curves.push_back(SwitchCurve::make(g.t_p, std::move(g.samples), kind));
        } catch (const ConfigError& e) {
            throw ParseError(g.first_line, e.what());
        }
    }
    return curves;
}

std::vector<SwitchCurve> parse_sweep_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    return parse_sweep_csv(in);
}

void write_sweep_csv(std::ostream& out, std::span<const SwitchCurve> curves) {
    const Observable kind = curves.empty() ? Observable::Displacement : curves.front().kind;
    out << "t_p_us,V_p_V," << value_column(kind) << '\n';
    for (const auto& c : curves) {
        if (c.kind != kind) throw ConfigError("write_sweep_csv: mixed observable kinds");
        const auto t = format_us(c.t_p);
        for (const auto& s : c.samples) {
            out << t << ',' << format_number(s.v_p) << ',' << format_number(s.value) << '\n';
        }
    }
}

std::ofstream open_output(const std::filesystem::path& path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    return out;
}

void write_sweep_csv(const std::filesystem::path& path, std::span<const SwitchCurve> curves) {
    auto out = open_output(path);
    write_sweep_csv(out, curves);
    if (!out) throw IoError("write failed: " + path.string());
}

namespace {

constexpr std::string_view kFitHeader = "t_p_us,y0_nm,A_nm,mu,w,V50_V,Vc_mech_V,rms_nm";

}  // namespace

void write_fit_report(std::ostream& out, std::span<const FitRow> rows) {
    out << kFitHeader << '\n';
    for (const auto& r : rows) {
        const auto& f = r.fit;
        out << format_us(f.t_p) << ',' << format_number(f.y0) << ',' << format_number(f.A) << ','
            << format_number(f.mu) << ',' << format_number(f.w) << ',' << format_number(f.v50)
            << ',' << (r.vc_mech ? format_number(*r.vc_mech) : std::string("nan")) << ','
            << format_number(f.rms_residual) << '\n';
    }
}

std::vector<FitRow> read_fit_report(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    std::vector<FitRow> rows;
    while (std::getline(in, line)) {
        ++line_no;
        const auto body = trim(line);
        if (body.empty() || body.front() == '#') continue;
        if (!have_header) {
            if (body != kFitHeader) throw ParseError(line_no, "fit report header must be '" + std::string(kFitHeader) + "'");
            have_header = true;
            continue;
        }
        const auto cols = split(body, ',');
        if (cols.size() != 8) throw ParseError(line_no, "expected 8 columns");
        double v[8];
        for (int i = 0; i < 8; ++i) {
            if (!parse_number(cols[i], v[i])) throw ParseError(line_no, "invalid number in column " + std::to_string(i + 1));
        }
        if (!(v[0] > 0.0) || !(v[4] > 0.0)) throw ParseError(line_no, "t_p and w must be positive");
        FitRow row;
        row.fit = LorentzianFit::from_parameters(v[1], v[2], v[3], v[4], v[0] * 1e-6);
        row.fit.rms_residual = v[7];
        if (!std::isnan(v[6])) row.vc_mech = v[6];
        rows.push_back(row);
    }
    if (!have_header) throw ParseError(line_no == 0 ? 1 : line_no, "missing fit report header");
    if (rows.empty()) throw ParseError(line_no, "fit report has no rows");
    return rows;
}

std::vector<FitRow> read_fit_report(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    return read_fit_report(in);
}

void write_merz_report(std::ostream& out, const MerzRegression& reg) {
    out << "# alpha=" << format_number(reg.alpha) << " tau_inf_s=" << format_number(reg.tau_inf)
        << " mu_star=" << format_number(reg.mu_star) << " slope=" << format_number(reg.slope)
        << " r_squared=" << format_number(reg.r_squared)
        << " degenerate=" << (reg.degenerate ? 1 : 0) << '\n';
    out << "t_p_us,X,mu,mu_fit\n";
    for (std::size_t i = 0; i < reg.x_values.size(); ++i) {
        out << format_us(reg.t_p_values[i]) << ',' << format_number(reg.x_values[i]) << ','
            << format_number(reg.mu_values[i]) << ','
            << format_number(reg.predicted_mu(reg.x_values[i])) << '\n';
    }
}

void write_levels_csv(std::ostream& out, const LevelSet& levels) {
    out << "V_p_V,value,level_index\n";
    for (const auto& l : levels.kept) {
        out << format_number(l.v_p) << ',' << format_number(l.value) << ',' << l.index << '\n';
    }
}

void write_collapse_csv(std::ostream& out, std::span<const CollapseGroup> groups) {
    out << "t_p_us,z,s_bar,master\n";
    for (const auto& g : groups) {
        const auto t = format_us(g.t_p);
        for (const auto& p : g.points) {
            out << t << ',' << format_number(p.z) << ',' << format_number(p.s_bar) << ','
                << format_number(master_curve(p.z)) << '\n';
        }
    }
}

}  // namespace femsyn::io
