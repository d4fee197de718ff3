#include "femsyn/plotdata.hpp"

#include <fstream>

#include "femsyn/errors.hpp"
#include "femsyn/io.hpp"

namespace femsyn::plot {

namespace fs = std::filesystem;
using io::format_number;
using io::format_us;

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

struct Writer {
    fs::path dir;
    std::vector<fs::path> written;

    std::ofstream open(const std::string& name) {
        const auto path = dir / name;
        auto out = io::open_output(path);
        written.push_back(path);
        return out;
    }

    void operator()(const FitOverlay& p) {
        if (p.curves.size() != p.fits.size()) throw ConfigError("fit-overlay: curves and fits differ in count");
        for (std::size_t i = 0; i < p.curves.size(); ++i) {
            auto out = open("fit_overlay_" + format_us(p.curves[i].t_p) + "us.csv");
            out << "V_p_V,data,model\n";
            for (const auto& s : p.curves[i].samples) {
                out << format_number(s.v_p) << ',' << format_number(s.value) << ','
                    << format_number(p.fits[i].model(s.v_p)) << '\n';
            }
        }
    }

    void operator()(const Pdf& p) {
        if (p.grid_points < 2) throw ConfigError("pdf: need at least two grid points");
        for (const auto& f : p.fits) {
            auto out = open("pdf_" + format_us(f.t_p) + "us.csv");
            out << "x_log10_V,density\n";
            const double lo = f.mu - 10.0 * f.w;
            const double h = 20.0 * f.w / static_cast<double>(p.grid_points - 1);
            for (int i = 0; i < p.grid_points; ++i) {
                const double x = lo + h * i;
                out << format_number(x) << ',' << format_number(threshold_pdf(f.distribution(), x)) << '\n';
            }
        }
    }

    void operator()(const Collapse& p) {
        if (p.t_p.size() != p.points.size()) throw ConfigError("collapse: t_p and point groups differ in count");
        auto out = open("collapse.csv");
        std::vector<io::CollapseGroup> groups;
        for (std::size_t i = 0; i < p.t_p.size(); ++i) groups.push_back({p.t_p[i], p.points[i]});
        io::write_collapse_csv(out, groups);
    }

    void operator()(const MerzLine& p) {
        auto out = open("merz_line.csv");
        io::write_merz_report(out, p.regression);
    }

    void operator()(const StaircasePlot& p) {
        auto out = open("staircase_" + format_us(p.t_p) + "us.csv");
        out << "V_p_V,level\n";
        int level = 0;
        for (double v : p.staircase.breakpoints) out << format_number(v) << ',' << ++level << '\n';
    }
};

}  // namespace

std::string_view kind_name(const Payload& payload) noexcept {
    return std::visit(Overloaded{[](const FitOverlay&) { return std::string_view("fit-overlay"); },
                                 [](const Pdf&) { return std::string_view("pdf"); },
                                 [](const Collapse&) { return std::string_view("collapse"); },
                                 [](const MerzLine&) { return std::string_view("merz-line"); },
                                 [](const StaircasePlot&) { return std::string_view("staircase"); }},
                      payload);
}

std::vector<fs::path> emit_plotdata(const fs::path& dir, std::span<const Payload> payloads) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

    Writer writer{dir, {}};
    std::vector<std::pair<std::string_view, std::size_t>> ranges;
    for (const auto& p : payloads) {
        const auto before = writer.written.size();
        std::visit(writer, p);
        ranges.emplace_back(kind_name(p), writer.written.size() - before);
    }

    auto index = io::open_output(dir / "index.txt");
    std::size_t k = 0;
    for (const auto& [kind, count] : ranges) {
        for (std::size_t i = 0; i < count; ++i, ++k) {
            index << kind << ' ' << writer.written[k].filename().string() << '\n';
        }
    }
    if (!index) throw IoError("write failed: " + (dir / "index.txt").string());
    writer.written.push_back(dir / "index.txt");
    return writer.written;
}

}  // namespace femsyn::plot
