// Acceptance runner: one PASS/FAIL line per criterion, exit code = number of
// failed criteria. Tolerances and runtime budgets are pinned here on purpose;
// loosening them is a behavior change, not a cleanup.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include <ioncrystal/crystal.hpp>
#include <ioncrystal/errors.hpp>
#include <ioncrystal/gaussian.hpp>
#include <ioncrystal/modes.hpp>
#include <ioncrystal/ramsey.hpp>
#include <ioncrystal/stability.hpp>
#include <ioncrystal/units.hpp>

#include "oracles.hpp"
#include "run_config.hpp"

using namespace ioncrystal;
using nlohmann::json;

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> out(n);
    for (int k = 0; k < n; ++k)
        out[k] = lo + (hi - lo) * k / (n - 1.0);
    return out;
}

json load_shipped_config(const std::string& stem) {
    std::string hash;
    return runcfg::load_config(std::string(ACCEPTANCE_CONFIG_DIR) + "/" + stem + ".json", hash);
}

/// Structures and quadratic models for one quench, shared energy zero.
struct QuenchModels {
    EquilibriumResult ground;
    EquilibriumResult excited;
    QuadraticModel model_g;
    QuadraticModel model_e;
};

QuenchModels build_quench(const runcfg::TrapSetup& setup, std::uint64_t seed) {
    QuenchModels quench;
    const SpinPattern spins_g = all_ground(3);
    const SpinPattern spins_e = center_excited(3);
    quench.ground = runcfg::solve_auto(setup.params, spins_g, seed, std::nullopt);
    quench.excited = runcfg::solve_auto(setup.params, spins_e, seed, quench.ground.kind);
    quench.model_g = make_model(quench.ground.configuration, setup.params, spins_g, setup.sigma,
                                quench.ground.energy);
    quench.model_e = make_model(quench.excited.configuration, setup.params, spins_e, setup.sigma,
                                quench.ground.energy);
    return quench;
}

QuadraticModel toy_model(double omega0, double omega1, double displacement0,
                         double energy_offset = 0.0) {
    QuadraticModel model;
    model.equilibrium = IonConfiguration::from_xy({displacement0}, {0.0});
    model.modes.eigenvalues = Eigen::Vector2d(omega0 * omega0, omega1 * omega1);
    model.modes.frequencies = Eigen::Vector2d(omega0, omega1);
    model.modes.vectors = Eigen::Matrix2d::Identity();
    model.modes.stable = true;
    model.energy_offset = energy_offset;
    model.sigma = 1.0;
    return model;
}

QuadraticModel rotated_model(const Eigen::Matrix2d& stiffness, const Eigen::Vector2d& shift,
                             double energy_offset) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> solver(stiffness);
    QuadraticModel model;
    model.equilibrium = IonConfiguration(Eigen::VectorXd(shift));
    model.modes.eigenvalues = solver.eigenvalues();
    model.modes.frequencies = solver.eigenvalues().cwiseSqrt();
    model.modes.vectors = solver.eigenvectors();
    model.modes.stable = true;
    model.energy_offset = energy_offset;
    model.sigma = 1.0;
    return model;
}

// ---------------------------------------------------------------------------
// criterion 1: homogeneous linear/zigzag critical point

std::string criterion_1() {
    const double closed = homogeneous_critical_alpha();
    if (std::abs(closed - std::sqrt(12.0 / 5.0)) > 1e-14)
        return "closed form is not sqrt(12/5)";
    const double numeric = homogeneous_critical_alpha_numeric(1e-8);
    const double error = std::abs(numeric - closed);
    if (error > 1e-6)
        return "soft-mode bisection lands " + num(error) + " away from sqrt(12/5)";
    return {};
}

// ---------------------------------------------------------------------------
// criterion 2: linear-chain closed forms

std::string criterion_2() {
    const double half_span = std::cbrt(1.25);
    const SpinPattern spins = all_ground(3);
    for (double alpha : {1.6, 1.8, 2.0}) {
        const TrapParams trap{3, alpha, 0.0};
        const auto result =
            find_equilibrium(analytic_equilibrium(StructureKind::lin_x, trap, spins), trap, spins);
        const auto& ions = result.configuration;
        const double position_error =
            std::max({std::abs(ions.x(0) + half_span), std::abs(ions.x(1)),
                      std::abs(ions.x(2) - half_span), std::abs(ions.y(0)), std::abs(ions.y(1)),
                      std::abs(ions.y(2))});
        if (position_error > 1e-10)
            return "positions at alpha=" + num(alpha) + " off by " + num(position_error);

        const auto modes = normal_modes(ions, trap, spins);
        std::vector<double> expected = {1.0,
                                        std::sqrt(3.0),
                                        std::sqrt(29.0 / 5.0),
                                        std::sqrt(alpha * alpha - 12.0 / 5.0),
                                        std::sqrt(alpha * alpha - 1.0),
                                        alpha};
        std::sort(expected.begin(), expected.end());
        double frequency_error = 0.0;
        for (int k = 0; k < 6; ++k)
            frequency_error =
                std::max(frequency_error, std::abs(modes.frequencies[k] - expected[k]));
        if (frequency_error > 1e-10)
            return "mode frequencies at alpha=" + num(alpha) + " off by " + num(frequency_error);
    }
    return {};
}

// ---------------------------------------------------------------------------
// criterion 3: center-excited six-frequency formula

std::string criterion_3() {
    const SpinPattern spins = center_excited(3);
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        const double alpha = 1.6 + 0.4 * i / 49.0;
        for (int j = 0; j < 50; ++j) {
            const double delta = -0.1 + 0.9 * j / 49.0;
            const TrapParams trap{3, alpha, delta};
            const auto chain = analytic_equilibrium(StructureKind::lin_x, trap, spins);
            const auto modes = normal_modes(chain, trap, spins);
            const auto closed = linear_center_excited_frequencies(alpha, delta);
            for (int k = 0; k < 6; ++k)
                worst = std::max(worst, std::abs(modes.frequencies[k] - closed[k]));
        }
    }
    if (worst > 1e-8)
        return "closed-form frequencies deviate by " + num(worst) + " on the 50x50 grid";

    double worst_zero = 0.0;
    for (double alpha : {1.6, 1.8, 2.0}) {
        const auto at_boundary =
            linear_center_excited_frequencies(alpha, delta_alpha_critical(alpha));
        worst_zero = std::max(worst_zero, std::abs(at_boundary[0]));
    }
    if (worst_zero > 1e-8)
        return "lowest frequency at the critical detuning is " + num(worst_zero) + ", not 0";
    return {};
}

// ---------------------------------------------------------------------------
// criterion 4: stability diagram scans

std::size_t count_kind(const StabilityDiagram& diagram, StructureKind kind) {
    std::size_t count = 0;
    for (auto mask : diagram.cells)
        if (mask & kind_bit(kind))
            ++count;
    return count;
}

std::string check_curves_against_scan(
    const StabilityDiagram& diagram, ScanSector sector, ScanRange alpha_range,
    ScanRange dalpha_range,
    const std::vector<std::pair<std::string, StructureKind>>& curve_kinds) {
    const auto curves = analytic_boundary_curves(sector, alpha_range, dalpha_range);
    if (curves.size() != curve_kinds.size())
        return "expected " + std::to_string(curve_kinds.size()) + " analytic curves, got " +
               std::to_string(curves.size());
    const double cell_w = alpha_range.cell_width();
    const double cell_h = dalpha_range.cell_width();
    for (const auto& curve : curves) {
        StructureKind kind = StructureKind::other;
        for (const auto& [label, mapped] : curve_kinds)
            if (label == curve.label)
                kind = mapped;
        if (kind == StructureKind::other)
            return "unexpected analytic curve '" + curve.label + "'";

        std::vector<std::pair<double, double>> numeric;
        for (const auto& segment : diagram.boundaries)
            if (segment.kind == kind)
                numeric.insert(numeric.end(), segment.points.begin(), segment.points.end());
        if (numeric.empty())
            return "scan produced no numeric boundary for '" + curve.label + "'";

        double worst_cells = 0.0;
        for (const auto& [a, d] : curve.points) {
            // near the window edge the numeric flip can fall outside the scan
            if (a < alpha_range.lo + 2 * cell_w || a > alpha_range.hi - 2 * cell_w)
                continue;
            if (d < dalpha_range.lo + 2 * cell_h || d > dalpha_range.hi - 2 * cell_h)
                continue;
            double best = 1e300;
            for (const auto& [na, nd] : numeric)
                best = std::min(best,
                                std::max(std::abs(na - a) / cell_w, std::abs(nd - d) / cell_h));
            worst_cells = std::max(worst_cells, best);
        }
        if (worst_cells > 1.0)
            return "'" + curve.label + "' strays " + num(worst_cells) +
                   " cells from the numeric boundary";
    }
    return {};
}

std::string criterion_4(int threads) {
    ScanOptions options;
    options.threads = threads;
    const ScanRange alpha_range{1.0, 2.0, 200};
    const ScanRange dalpha_range{-0.5, 1.5, 200};

    const auto center = scan_diagram(center_excited(3), alpha_range, dalpha_range, options);
    if (count_kind(center, StructureKind::lin_x) == 0 ||
        count_kind(center, StructureKind::zigzag_x) == 0 ||
        count_kind(center, StructureKind::zigzag_y) == 0)
        return "center-excited scan misses one of the three structure regions";
    std::size_t overlap_cells = 0;
    for (auto mask : center.cells) {
        const int bits = !!(mask & 1u) + !!(mask & 2u) + !!(mask & 4u);
        if (bits >= 2)
            ++overlap_cells;
    }
    if (overlap_cells == 0)
        return "center-excited scan has no multistable cells";
    if (auto failure = check_curves_against_scan(
            center, ScanSector::center_excited, alpha_range, dalpha_range,
            {{"center-excited linear boundary", StructureKind::lin_x},
             {"zigzag-Y boundary", StructureKind::zigzag_y}});
        !failure.empty())
        return failure;

    const auto outer = scan_diagram(outer_excited(3), alpha_range, dalpha_range, options);
    std::size_t white_cells = 0;
    for (auto mask : outer.cells)
        if (mask == 0)
            ++white_cells;
    if (count_kind(outer, StructureKind::lin_x_star) == 0 ||
        count_kind(outer, StructureKind::tria_star) == 0 || white_cells == 0)
        return "outer-excited scan misses a chain, triangle, or empty region";
    if (auto failure = check_curves_against_scan(
            outer, ScanSector::outer_excited, alpha_range, dalpha_range,
            {{"outer-excited linear boundary", StructureKind::lin_x_star}});
        !failure.empty())
        return failure;
    return {};
}

// ---------------------------------------------------------------------------
// criterion 5: echo correctness properties

std::string criterion_5(const runcfg::CommonArgs& args, double& oracle_seconds) {
    // (a) every shipped figure config stays normalized
    std::size_t variants_checked = 0;
    for (const char* stem : {"fig4a", "fig4b", "fig4c", "fig5_spectra", "fig6", "fig7", "fig8"}) {
        const auto config = load_shipped_config(stem);
        for (auto& [label, variant] : runcfg::expand_variants(config)) {
            json merged = variant;
            merged["time"] = json{{"t_max", 60.0}, {"samples", 600}};
            const auto run = runcfg::compute_echo(merged, args);
            const auto name = std::string(stem) + "/" + label;
            if (std::abs(run.series.values.front() - 1.0) > 1e-10)
                return "(a) " + name + ": I(0) deviates from 1 by " +
                       num(std::abs(run.series.values.front() - 1.0));
            double sup = 0.0;
            for (const auto& value : run.series.values)
                sup = std::max(sup, std::abs(value));
            if (sup > 1.0 + 1e-10)
                return "(a) " + name + ": |I| exceeds 1 by " + num(sup - 1.0);
            ++variants_checked;
        }
    }
    if (variants_checked != 22)
        return "(a) expected 22 figure variants, ran " + std::to_string(variants_checked);

    // (b) single decoupled mode against the closed form
    {
        const auto ground = toy_model(1.1, 0.9, 0.0);
        const auto excited = toy_model(0.6, 0.9, 0.5);
        const auto times = linspace(0.0, 40.0, 400);
        const auto series = loschmidt_echo(ground, excited, times);
        double worst = 0.0;
        for (std::size_t k = 0; k < times.size(); ++k)
            worst = std::max(worst, std::abs(series.values[k] -
                                             single_mode_echo_reference(1.1, 0.6, 0.5, times[k])));
        if (worst > 1e-10)
            return "(b) single-mode echo deviates from the closed form by " + num(worst);
    }

    // (c) coupled two-mode quench against the number-basis oracle
    {
        const Eigen::Vector2d omega_g(1.0, 1.7);
        Eigen::Matrix2d rotation;
        const double angle = 0.4;
        rotation << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
        const Eigen::Matrix2d stiffness =
            rotation * Eigen::Vector2d(1.3 * 1.3, 2.2 * 2.2).asDiagonal() * rotation.transpose();
        const Eigen::Vector2d shift(0.15, -0.1);
        const double offset = 0.3;

        const auto ground = toy_model(omega_g[0], omega_g[1], 0.0);
        const auto excited = rotated_model(stiffness, shift, offset);
        const auto times = linspace(0.0, 3.0 * M_PI / 1.3, 90); // three squeezing periods
        const auto series = loschmidt_echo(ground, excited, times);

        const auto oracle_start = std::chrono::steady_clock::now();
        const auto reference = oracle::fock_echo(omega_g, stiffness, shift, offset, times);
        oracle_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                                       oracle_start)
                             .count();
        double worst = 0.0;
        for (std::size_t k = 0; k < times.size(); ++k)
            worst = std::max(worst, std::abs(series.values[k] - reference[k]));
        if (worst > 1e-4)
            return "(c) two-mode echo deviates from the Fock oracle by " + num(worst);
        if (oracle_seconds > 60.0)
            return "(c) oracle took " + num(oracle_seconds) + " s, budget is 60 s";
    }

    // (d) zero detuning leaves the overlap pinned at 1
    {
        const double sigma =
            to_dimensionless(PhysicalTrap::from_khz(*find_species("Be9"), 500.0, 775.0, 10.0))
                .sigma;
        json flat = {{"trap", {{"alpha", 1.55}, {"delta_alpha", 0.0}, {"sigma", sigma}}},
                     {"pattern", "center"},
                     {"time", {{"t_max", 50.0}, {"samples", 500}}}};
        const auto run = runcfg::compute_echo(flat, args);
        for (const auto& value : run.series.values)
            if (std::abs(value - 1.0) > 1e-10)
                return "(d) delta_alpha=0 echo leaves 1 by " + num(std::abs(value - 1.0));
    }
    return {};
}

// ---------------------------------------------------------------------------
// criterion 6: periodic full recurrences and the doubled soft-mode peak

std::string criterion_6(const runcfg::CommonArgs& args) {
    json config = {{"trap",
                    {{"species", "Be9"},
                     {"nu_x_khz", 500.0},
                     {"nu_y_khz", 775.0},
                     {"delta_nu_y_khz", 10.0}}},
                   {"pattern", "center"}};
    const auto setup = runcfg::parse_trap(config);
    const auto quench = build_quench(setup, args.seed);

    const auto coarse =
        loschmidt_echo(quench.model_g, quench.model_e, linspace(0.0, 300.0, 6144));

    // candidate recurrence times: coarse local maxima close to 1, clustered
    std::vector<std::pair<double, double>> peaks; // (t, |I|)
    const auto& values = coarse.values;
    for (std::size_t i = 1; i + 1 < values.size(); ++i) {
        const double h = std::abs(values[i]);
        if (h > 0.995 && h > std::abs(values[i - 1]) && h >= std::abs(values[i + 1]))
            peaks.emplace_back(coarse.times[i], h);
    }
    std::vector<std::pair<double, double>> candidates;
    for (const auto& peak : peaks) {
        if (candidates.empty() || peak.first - candidates.back().first > 2.0)
            candidates.push_back(peak);
        else if (peak.second > candidates.back().second)
            candidates.back() = peak;
    }
    if (candidates.empty())
        return "no recurrence candidate rises above 0.995";

    std::vector<double> deep_times;
    double best_deficit = 1.0;
    for (const auto& [t0, h0] : candidates) {
        const double lo = std::max(0.5, t0 - 0.3);
        const int fine_samples = static_cast<int>((t0 + 0.3 - lo) / 2e-4) + 1;
        const auto fine =
            loschmidt_echo(quench.model_g, quench.model_e, linspace(lo, t0 + 0.3, fine_samples));
        double peak_height = 0.0;
        double peak_time = 0.0;
        for (std::size_t k = 0; k < fine.values.size(); ++k)
            if (std::abs(fine.values[k]) > peak_height) {
                peak_height = std::abs(fine.values[k]);
                peak_time = fine.times[k];
            }
        best_deficit = std::min(best_deficit, 1.0 - peak_height);
        if (1.0 - peak_height < 1e-6)
            deep_times.push_back(peak_time);
    }
    if (deep_times.size() < 2)
        return "fewer than two recurrences return to 1 within 1e-6 (closest deficit " +
               num(best_deficit) + ")";
    std::sort(deep_times.begin(), deep_times.end());
    if (std::abs(deep_times[1] - 2.0 * deep_times[0]) > 1.0)
        return "recurrences at " + num(deep_times[0]) + " and " + num(deep_times[1]) +
               " are not periodic";

    // dominant nonzero spectral peak at twice the excited chain's soft mode
    const auto series = loschmidt_echo(quench.model_g, quench.model_e, linspace(0.0, 200.0, 4096));
    const auto spec = spectrum(series);
    std::size_t peak_bin = 1;
    for (std::size_t k = 2; k < spec.magnitudes.size(); ++k)
        if (spec.magnitudes[k] > spec.magnitudes[peak_bin])
            peak_bin = k;
    const auto excited_modes =
        normal_modes(quench.excited.configuration, setup.params, center_excited(3));
    const double doubled_soft = 2.0 * excited_modes.frequencies[0];
    const double peak_error = std::abs(spec.frequencies[peak_bin] - doubled_soft);
    if (peak_error > spec.bin_width)
        return "spectral peak at omega=" + num(spec.frequencies[peak_bin]) + " vs 2*omega_soft=" +
               num(doubled_soft) + " misses by " + num(peak_error) + " (> bin " +
               num(spec.bin_width) + ")";
    return {};
}

// ---------------------------------------------------------------------------
// criterion 7: revival spacing phenomenology

std::string criterion_7(const runcfg::CommonArgs& args) {
    // zigzag -> zigzag quenches: first revival at the excited soft-mode period
    const auto fig4a = load_shipped_config("fig4a");
    for (const auto& [label, merged] : runcfg::expand_variants(fig4a)) {
        const auto setup = runcfg::parse_trap(merged);
        const auto quench = build_quench(setup, args.seed);
        if (quench.ground.kind != StructureKind::zigzag_x ||
            quench.excited.kind != StructureKind::zigzag_x)
            return label + " is not a zigzag-to-zigzag quench";

        const auto excited_modes =
            normal_modes(quench.excited.configuration, setup.params, center_excited(3));
        const double period = kTwoPi / excited_modes.frequencies[0];
        const auto series =
            loschmidt_echo(quench.model_g, quench.model_e, linspace(0.0, 1.6 * period, 3200));
        double revival_height = 0.0;
        double revival_time = 0.0;
        for (std::size_t k = 0; k < series.times.size(); ++k) {
            const double t = series.times[k];
            if (t < 0.5 * period || t > 1.5 * period)
                continue;
            if (std::abs(series.values[k]) > revival_height) {
                revival_height = std::abs(series.values[k]);
                revival_time = t;
            }
        }
        if (std::abs(revival_time - period) > 0.1 * period)
            return label + ": first revival at " + num(revival_time / period) +
                   " soft-mode periods, outside 1 +- 0.1";
    }

    // revival spacing shrinks as the detuning grows
    const auto fig6 = load_shipped_config("fig6");
    std::vector<double> spacings;
    for (const auto& [label, merged] : runcfg::expand_variants(fig6)) {
        const auto run = runcfg::compute_echo(merged, args);
        const auto spacing = revival_spacing(run.series);
        if (!spacing)
            return label + ": no revival spacing detected";
        spacings.push_back(*spacing);
    }
    if (!(spacings.size() == 3 && spacings[0] > spacings[1] && spacings[1] > spacings[2]))
        return "spacing not monotone decreasing in the detuning: " + num(spacings[0]) + ", " +
               num(spacings[1]) + ", " + num(spacings[2]);
    return {};
}

// ---------------------------------------------------------------------------
// criterion 8: revival amplitude ordering across ion species

std::string criterion_8(const runcfg::CommonArgs& args) {
    const auto fig8 = load_shipped_config("fig8");
    struct Entry {
        std::string label;
        double sigma = 0.0;
        double amplitude = 0.0;
    };
    std::vector<Entry> entries;
    for (const auto& [label, variant] : runcfg::expand_variants(fig8)) {
        json merged = variant;
        merged["time"] = json{{"t_max", 40.0}, {"samples", 2000}};
        const auto run = runcfg::compute_echo(merged, args);
        Entry entry{label, run.trap.sigma, 0.0};
        for (std::size_t k = 0; k < run.series.times.size(); ++k)
            if (run.series.times[k] >= 20.0)
                entry.amplitude = std::max(entry.amplitude, std::abs(run.series.values[k]));
        entries.push_back(std::move(entry));
    }
    if (entries.size() != 3)
        return "expected the three species variants, got " + std::to_string(entries.size());
    for (std::size_t k = 1; k < entries.size(); ++k) {
        if (!(entries[k - 1].sigma > entries[k].sigma))
            return "species are not ordered by decreasing sigma";
        if (!(entries[k - 1].amplitude > entries[k].amplitude))
            return "revival amplitude not monotone with sigma: " + entries[k - 1].label + "=" +
                   num(entries[k - 1].amplitude) + " vs " + entries[k].label + "=" +
                   num(entries[k].amplitude);
    }
    return {};
}

// ---------------------------------------------------------------------------
// criterion 9: seed robustness of the asymmetric-triangle search

std::string criterion_9() {
    const TrapParams trap{3, 1.3, 0.5};
    const SpinPattern spins = outer_excited(3);
    std::vector<double> energies;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto search = metropolis_search(trap, spins, seed, {}, SearchConstraint{true, 1e-2});
        if (search.result && search.result->kind == StructureKind::tria_star)
            energies.push_back(search.result->energy);
    }
    std::size_t best_count = 0;
    for (double anchor : energies) {
        std::size_t count = 0;
        for (double energy : energies)
            if (std::abs(energy - anchor) <= 1e-8)
                ++count;
        best_count = std::max(best_count, count);
    }
    if (best_count < 19)
        return "only " + std::to_string(best_count) +
               "/20 seeds agree on the refined triangle energy";
    return {};
}

// ---------------------------------------------------------------------------

bool run_criterion(int index, const char* label, std::optional<double> budget_seconds,
                   const std::function<std::string()>& body) {
    const auto start = std::chrono::steady_clock::now();
    std::string failure;
    try {
        failure = body();
    } catch (const std::exception& e) {
        failure = std::string("exception: ") + e.what();
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (failure.empty() && budget_seconds && elapsed > *budget_seconds)
        failure = "runtime " + num(elapsed) + " s exceeds the " + num(*budget_seconds) +
                  " s budget";
    if (failure.empty())
        std::printf("PASS criterion %d (%s) [%.2f s]\n", index, label, elapsed);
    else
        std::printf("FAIL criterion %d (%s): %s [%.2f s]\n", index, label, failure.c_str(),
                    elapsed);
    std::fflush(stdout);
    return failure.empty();
}

} // namespace

int main() {
    runcfg::CommonArgs args; // default seed; threads = hardware concurrency

    int failed = 0;
    double oracle_seconds = 0.0;
    failed += !run_criterion(1, "homogeneous critical aspect ratio", 1.0, criterion_1);
    failed += !run_criterion(2, "linear-chain closed forms", 1.0, criterion_2);
    failed += !run_criterion(3, "center-excited six-frequency formula", 10.0, criterion_3);
    failed += !run_criterion(4, "stability diagram scans", 300.0,
                             [&] { return criterion_4(args.threads); });
    failed += !run_criterion(5, "echo correctness properties", std::nullopt,
                             [&] { return criterion_5(args, oracle_seconds); });
    failed += !run_criterion(6, "periodic recurrences and doubled soft-mode peak", 10.0,
                             [&] { return criterion_6(args); });
    failed += !run_criterion(7, "revival spacing phenomenology", 30.0,
                             [&] { return criterion_7(args); });
    failed += !run_criterion(8, "revival amplitude vs ion mass", 30.0,
                             [&] { return criterion_8(args); });
    failed += !run_criterion(9, "triangle search seed robustness", 60.0, criterion_9);

    std::printf("%d/9 criteria passed\n", 9 - failed);
    return failed;
}
