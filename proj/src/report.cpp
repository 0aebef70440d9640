#include <ioncrystal/report.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include <ioncrystal/errors.hpp>
#include <ioncrystal/version.hpp>

namespace ioncrystal {

namespace {

constexpr double kTwoPi = 6.28318530717958647692;

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw ConfigError("cannot open output file: " + path);
    out.imbue(std::locale::classic());
    return out;
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_header(std::ofstream& out, const MetadataBlock& meta) {
    out << "# generator: ioncrystal " << kVersion << "\n";
    for (const auto& [key, value] : meta.entries)
        out << "# " << key << ": " << value << "\n";
}

std::string microseconds_field(double tau, double nu_x) {
    if (nu_x <= 0.0)
        return "";
    return num(tau / nu_x * 1e6);
}

// Base colors per structure kind; cells stable for several kinds blend them.
std::array<int, 3> kind_color(StructureKind kind) {
    switch (kind) {
        case StructureKind::lin_x: return {78, 121, 167};
        case StructureKind::zigzag_x: return {242, 142, 43};
        case StructureKind::zigzag_y: return {89, 161, 79};
        case StructureKind::lin_x_star: return {78, 121, 167};
        case StructureKind::tria_star: return {225, 87, 89};
        case StructureKind::other: return {140, 140, 140};
    }
    return {0, 0, 0};
}

std::string mask_color(std::uint8_t mask) {
    if (mask == 0)
        return "#ffffff";
    int r = 0, g = 0, b = 0, count = 0;
    for (int k = 0; k < 6; ++k) {
        if (mask & (1u << k)) {
            const auto c = kind_color(static_cast<StructureKind>(k));
            r += c[0];
            g += c[1];
            b += c[2];
            ++count;
        }
    }
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r / count, g / count, b / count);
    return buf;
}

std::string mask_names(std::uint8_t mask) {
    std::string names;
    for (int k = 0; k < 6; ++k) {
        if (mask & (1u << k)) {
            if (!names.empty())
                names += "+";
            names += to_string(static_cast<StructureKind>(k));
        }
    }
    return names.empty() ? "none" : names;
}

} // namespace

void write_series_csv(const std::string& path, const OverlapSeries& series,
                      const MetadataBlock& meta) {
    auto out = open_out(path);
    write_header(out, meta);
    out << "t_dimensionless,t_us,re_i,im_i,abs_i\n";
    for (std::size_t i = 0; i < series.times.size(); ++i) {
        const auto& v = series.values[i];
        out << num(series.times[i]) << ','
            << microseconds_field(series.times[i], series.metadata.nu_x) << ',' << num(v.real())
            << ',' << num(v.imag()) << ',' << num(std::abs(v)) << '\n';
    }
}

void write_probability_csv(const std::string& path, const OverlapSeries& series,
                           const std::vector<double>& p1, const std::vector<double>& p2,
                           const MetadataBlock& meta) {
    auto out = open_out(path);
    write_header(out, meta);
    out << "t_dimensionless,t_us,p1,p2\n";
    for (std::size_t i = 0; i < series.times.size(); ++i)
        out << num(series.times[i]) << ','
            << microseconds_field(series.times[i], series.metadata.nu_x) << ',' << num(p1[i])
            << ',' << num(p2[i]) << '\n';
}

void write_spectrum_csv(const std::string& path, const Spectrum& spectrum, double nu_x,
                        const MetadataBlock& meta) {
    auto out = open_out(path);
    write_header(out, meta);
    out << "omega_nu_x,f_khz,magnitude\n";
    for (std::size_t k = 0; k < spectrum.frequencies.size(); ++k) {
        out << num(spectrum.frequencies[k]) << ',';
        if (nu_x > 0.0)
            out << num(spectrum.frequencies[k] * nu_x / (kTwoPi * 1e3));
        out << ',' << num(spectrum.magnitudes[k]) << '\n';
    }
}

void write_equilibrium_csv(const std::string& path, const EquilibriumResult& result,
                           const MetadataBlock& meta) {
    auto out = open_out(path);
    write_header(out, meta);
    out << "# kind: " << to_string(result.kind) << "\n";
    out << "# energy: " << num(result.energy) << "\n";
    out << "# gradient_norm: " << num(result.gradient_norm) << "\n";
    out << "# min_eigenvalue: " << num(result.min_eigenvalue) << "\n";
    out << "# stable: " << (result.stable ? "true" : "false") << "\n";
    out << "ion,x,y\n";
    for (int j = 0; j < result.configuration.n_ions(); ++j)
        out << j << ',' << num(result.configuration.x(j)) << ','
            << num(result.configuration.y(j)) << '\n';
}

void write_equilibrium_json(const std::string& path, const EquilibriumResult& result,
                            const MetadataBlock& meta) {
    nlohmann::json record;
    record["generator"] = std::string("ioncrystal ") + kVersion;
    for (const auto& [key, value] : meta.entries)
        record["metadata"][key] = value;
    record["kind"] = to_string(result.kind);
    record["energy"] = result.energy;
    record["gradient_norm"] = result.gradient_norm;
    record["min_eigenvalue"] = result.min_eigenvalue;
    record["stable"] = result.stable;
    record["iterations"] = result.iterations;
    auto& positions = record["positions"];
    for (int j = 0; j < result.configuration.n_ions(); ++j)
        positions.push_back({{"x", result.configuration.x(j)}, {"y", result.configuration.y(j)}});
    auto out = open_out(path);
    out << record.dump(2) << '\n';
}

void write_modes_csv(const std::string& path, const std::vector<ModesRow>& rows,
                     const MetadataBlock& meta) {
    auto out = open_out(path);
    write_header(out, meta);
    std::size_t n_freqs = 0;
    for (const auto& row : rows)
        n_freqs = std::max(n_freqs, row.frequencies.size());
    out << "alpha,delta_alpha,structure";
    for (std::size_t k = 0; k < n_freqs; ++k)
        out << ",omega_" << k + 1;
    out << '\n';
    for (const auto& row : rows) {
        out << num(row.alpha) << ',' << num(row.delta_alpha) << ',' << row.structure;
        for (std::size_t k = 0; k < n_freqs; ++k) {
            out << ',';
            if (k < row.frequencies.size())
                out << num(row.frequencies[k]);
        }
        out << '\n';
    }
}

void write_diagram_csv(const std::string& path, const StabilityDiagram& diagram,
                       const MetadataBlock& meta) {
    auto out = open_out(path);
    write_header(out, meta);
    out << "# bitmask bits: 1=lin_x 2=zigzag_x 4=zigzag_y 8=lin_x_star 16=tria_star\n";
    out << "alpha,delta_alpha,stable_kinds,stable_kinds_names\n";
    for (int j = 0; j < diagram.delta_alpha.cells; ++j)
        for (int i = 0; i < diagram.alpha.cells; ++i) {
            const std::uint8_t mask = diagram.mask_at(i, j);
            out << num(diagram.alpha.center(i)) << ',' << num(diagram.delta_alpha.center(j))
                << ',' << int(mask) << ',' << mask_names(mask) << '\n';
        }
}

void write_boundaries_csv(const std::string& path, const StabilityDiagram& diagram,
                          const MetadataBlock& meta) {
    auto out = open_out(path);
    write_header(out, meta);
    out << "kind,alpha,delta_alpha\n";
    for (const auto& segment : diagram.boundaries)
        for (const auto& [alpha, dalpha] : segment.points)
            out << to_string(segment.kind) << ',' << num(alpha) << ',' << num(dalpha) << '\n';
}

namespace {

struct PlotFrame {
    double x0 = 80, y0 = 40, width = 720, height = 560; // plot area in px
    double ax_lo, ax_hi, ay_lo, ay_hi;

    double px(double ax) const { return x0 + (ax - ax_lo) / (ax_hi - ax_lo) * width; }
    double py(double ay) const { return y0 + (ay_hi - ay) / (ay_hi - ay_lo) * height; }
};

void svg_axes(std::ofstream& out, const PlotFrame& f, const std::string& xlabel,
              const std::string& ylabel) {
    out << "<rect x='" << f.x0 << "' y='" << f.y0 << "' width='" << f.width << "' height='"
        << f.height << "' fill='none' stroke='black'/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double ax = f.ax_lo + (f.ax_hi - f.ax_lo) * k / 4;
        const double ay = f.ay_lo + (f.ay_hi - f.ay_lo) * k / 4;
        char label[32];
        std::snprintf(label, sizeof label, "%.3g", ax);
        out << "<text x='" << f.px(ax) << "' y='" << f.y0 + f.height + 20
            << "' font-size='12' text-anchor='middle'>" << label << "</text>\n";
        std::snprintf(label, sizeof label, "%.3g", ay);
        out << "<text x='" << f.x0 - 8 << "' y='" << f.py(ay) + 4
            << "' font-size='12' text-anchor='end'>" << label << "</text>\n";
    }
    out << "<text x='" << f.x0 + f.width / 2 << "' y='" << f.y0 + f.height + 38
        << "' font-size='14' text-anchor='middle'>" << xlabel << "</text>\n";
    out << "<text x='" << 20 << "' y='" << f.y0 + f.height / 2
        << "' font-size='14' text-anchor='middle' transform='rotate(-90 20 "
        << f.y0 + f.height / 2 << ")'>" << ylabel << "</text>\n";
}

} // namespace

void render_diagram_svg(const std::string& path, const StabilityDiagram& diagram,
                        const std::vector<AnalyticCurve>& overlays) {
    auto out = open_out(path);
    PlotFrame frame;
    frame.ax_lo = diagram.alpha.lo;
    frame.ax_hi = diagram.alpha.hi;
    frame.ay_lo = diagram.delta_alpha.lo;
    frame.ay_hi = diagram.delta_alpha.hi;

    out << "<svg xmlns='http://www.w3.org/2000/svg' width='880' height='680' "
           "font-family='sans-serif'>\n";
    out << "<rect width='880' height='680' fill='white'/>\n";

    // Cells, merged into horizontal runs of equal mask to keep the file small.
    const double cell_w = frame.width / diagram.alpha.cells;
    const double cell_h = frame.height / diagram.delta_alpha.cells;
    for (int j = 0; j < diagram.delta_alpha.cells; ++j) {
        int run_start = 0;
        while (run_start < diagram.alpha.cells) {
            const std::uint8_t mask = diagram.mask_at(run_start, j);
            int run_end = run_start + 1;
            while (run_end < diagram.alpha.cells && diagram.mask_at(run_end, j) == mask)
                ++run_end;
            if (mask != 0) {
                const double x = frame.x0 + run_start * cell_w;
                const double y = frame.y0 + (diagram.delta_alpha.cells - 1 - j) * cell_h;
                out << "<rect x='" << x << "' y='" << y << "' width='"
                    << cell_w * (run_end - run_start) << "' height='" << cell_h << "' fill='"
                    << mask_color(mask) << "'/>\n";
            }
            run_start = run_end;
        }
    }

    for (const auto& segment : diagram.boundaries)
        for (const auto& [alpha, dalpha] : segment.points)
            out << "<circle cx='" << frame.px(alpha) << "' cy='" << frame.py(dalpha)
                << "' r='1' fill='black'/>\n";

    for (const auto& curve : overlays)
        for (const auto& [alpha, dalpha] : curve.points)
            out << "<circle cx='" << frame.px(alpha) << "' cy='" << frame.py(dalpha)
                << "' r='1.2' fill='#222288'/>\n";

    svg_axes(out, frame, "alpha", "delta_alpha");

    double ly = 20;
    for (int k = 0; k < 6; ++k) {
        bool used = false;
        for (const auto& cell : diagram.cells)
            if (cell & (1u << k))
                used = true;
        if (!used)
            continue;
        out << "<rect x='" << 740 << "' y='" << ly - 10 << "' width='14' height='14' fill='"
            << mask_color(static_cast<std::uint8_t>(1u << k)) << "'/>\n";
        out << "<text x='" << 760 << "' y='" << ly + 2 << "' font-size='12'>"
            << to_string(static_cast<StructureKind>(k)) << "</text>\n";
        ly += 20;
    }
    out << "</svg>\n";
}

void render_series_svg(const std::string& path, const OverlapSeries& series) {
    auto out = open_out(path);
    PlotFrame frame;
    frame.ax_lo = series.times.front();
    frame.ax_hi = series.times.back();
    frame.ay_lo = 0.0;
    frame.ay_hi = 1.05;

    out << "<svg xmlns='http://www.w3.org/2000/svg' width='880' height='680' "
           "font-family='sans-serif'>\n";
    out << "<rect width='880' height='680' fill='white'/>\n";
    out << "<polyline fill='none' stroke='#4e79a7' stroke-width='1' points='";
    for (std::size_t i = 0; i < series.times.size(); ++i)
        out << frame.px(series.times[i]) << ',' << frame.py(std::abs(series.values[i])) << ' ';
    out << "'/>\n";
    svg_axes(out, frame, "t (units of 1/nu_x)", "|I(t)|");
    out << "</svg>\n";
}

OverlapSeries read_series_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open series file: " + path);
    OverlapSeries series;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#')
            continue;
        if (!header_seen) { // column header
            header_seen = true;
            continue;
        }
        std::istringstream row(line);
        row.imbue(std::locale::classic());
        std::string field;
        std::array<std::string, 4> fields;
        int idx = 0;
        while (idx < 4 && std::getline(row, field, ','))
            fields[idx++] = field;
        if (idx < 4)
            throw ConfigError("malformed series row: " + line);
        try {
            series.times.push_back(std::stod(fields[0]));
            series.values.emplace_back(std::stod(fields[2]), std::stod(fields[3]));
        } catch (const std::exception&) {
            throw ConfigError("malformed series row: " + line);
        }
    }
    if (series.times.empty())
        throw ConfigError("series file has no data rows: " + path);
    return series;
}

} // namespace ioncrystal
