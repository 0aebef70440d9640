#pragma once

#include <string>
#include <utility>
#include <vector>

#include <ioncrystal/crystal.hpp>
#include <ioncrystal/gaussian.hpp>
#include <ioncrystal/ramsey.hpp>
#include <ioncrystal/stability.hpp>

namespace ioncrystal {

/// Key/value lines prepended to every CSV as '# key: value'. Callers put the
/// tool version, config hash and the unit/phase conventions here so each
/// artifact is self-describing.
struct MetadataBlock {
    std::vector<std::pair<std::string, std::string>> entries;

    void add(std::string key, std::string value) {
        entries.emplace_back(std::move(key), std::move(value));
    }
};

/// Columns: t_dimensionless, t_us, re_i, im_i, abs_i. The microsecond column
/// is left empty when metadata carries no physical nu_x.
void write_series_csv(const std::string& path, const OverlapSeries& series,
                      const MetadataBlock& meta);

/// Columns: t_dimensionless, t_us, p1, p2.
void write_probability_csv(const std::string& path, const OverlapSeries& series,
                           const std::vector<double>& p1, const std::vector<double>& p2,
                           const MetadataBlock& meta);

/// Columns: omega_nu_x (angular, units of nu_x), f_khz (empty without nu_x),
/// magnitude.
void write_spectrum_csv(const std::string& path, const Spectrum& spectrum, double nu_x,
                        const MetadataBlock& meta);

/// Columns: ion, x, y; classification and energetics go into the header.
void write_equilibrium_csv(const std::string& path, const EquilibriumResult& result,
                           const MetadataBlock& meta);

/// Same content as a structured JSON record.
void write_equilibrium_json(const std::string& path, const EquilibriumResult& result,
                            const MetadataBlock& meta);

struct ModesRow {
    double alpha = 0.0;
    double delta_alpha = 0.0;
    std::string structure;
    std::vector<double> frequencies;
};

/// Columns: alpha, delta_alpha, structure, omega_1..omega_2N.
void write_modes_csv(const std::string& path, const std::vector<ModesRow>& rows,
                     const MetadataBlock& meta);

/// Columns: alpha, delta_alpha, stable_kinds (bitmask), stable_kinds_names.
void write_diagram_csv(const std::string& path, const StabilityDiagram& diagram,
                       const MetadataBlock& meta);

/// Columns: kind, alpha, delta_alpha — the bisected numeric boundary points.
void write_boundaries_csv(const std::string& path, const StabilityDiagram& diagram,
                          const MetadataBlock& meta);

/// Region-colored stability diagram with numeric boundary points and the
/// closed-form curves overlaid. Pure presentation; all numbers come in.
void render_diagram_svg(const std::string& path, const StabilityDiagram& diagram,
                        const std::vector<AnalyticCurve>& overlays);

/// Simple |I(t)| line plot.
void render_series_svg(const std::string& path, const OverlapSeries& series);

/// Reads back a CSV written by write_series_csv (header lines are skipped;
/// the time and Re/Im columns are used). Throws ConfigError on malformed
/// input.
OverlapSeries read_series_csv(const std::string& path);

} // namespace ioncrystal
