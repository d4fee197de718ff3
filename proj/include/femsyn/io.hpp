#pragma once

// Text interchange: sweep CSV, fit reports, and derived tables.
//
// Sweep CSV:
//   t_p_us,V_p_V,delta_nm          (or dP_uC_cm2 for polarization change)
//   500,0.5,-18.8357...
// Blank lines and lines starting with '#' are ignored. Rows of one pulse
// width must be strictly increasing in V_p. Numbers are written with 17
// significant digits ('.' separator, '\n' line endings) so a write/parse
// round trip is exact.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "femsyn/calibration.hpp"
#include "femsyn/curve.hpp"
#include "femsyn/levels.hpp"
#include "femsyn/merz.hpp"

namespace femsyn::io {

/// Shortest-safe decimal form with 17 significant digits.
std::string format_number(double v);
/// Pulse width in microseconds, 15 significant digits ("500", "12.5").
std::string format_us(double t_p_seconds);

/// Strict full-string number parse; nullopt-like failure reported as false.
bool parse_number(std::string_view text, double& out);

std::vector<std::string_view> split(std::string_view line, char sep);
std::string_view trim(std::string_view s);

std::string_view value_column(Observable kind) noexcept;

std::vector<SwitchCurve> parse_sweep_csv(std::istream& in);
std::vector<SwitchCurve> parse_sweep_csv(const std::filesystem::path& path);

void write_sweep_csv(std::ostream& out, std::span<const SwitchCurve> curves);
void write_sweep_csv(const std::filesystem::path& path, std::span<const SwitchCurve> curves);

/// One report row: the fit plus the data-derived coercive voltage.
struct FitRow {
    LorentzianFit fit;
    std::optional<double> vc_mech;
};

/// Columns: t_p_us,y0_nm,A_nm,mu,w,V50_V,Vc_mech_V,rms_nm (nan when absent).
void write_fit_report(std::ostream& out, std::span<const FitRow> rows);
std::vector<FitRow> read_fit_report(std::istream& in);
std::vector<FitRow> read_fit_report(const std::filesystem::path& path);

/// Summary comment line, then t_p_us,X,mu,mu_fit.
void write_merz_report(std::ostream& out, const MerzRegression& reg);

/// Columns V_p_V,value,level_index.
void write_levels_csv(std::ostream& out, const LevelSet& levels);

struct CollapseGroup {
    double t_p = 0.0;
    std::vector<CollapsePoint> points;
};

/// Columns t_p_us,z,s_bar,master.
void write_collapse_csv(std::ostream& out, std::span<const CollapseGroup> groups);

/// Opens a file for writing or throws IoError.
std::ofstream open_output(const std::filesystem::path& path);

}  // namespace femsyn::io
