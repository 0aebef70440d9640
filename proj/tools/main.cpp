// ioncrystal: batch front end for the three-ion crystal toolkit.
//
// Every subcommand reads one JSON config, writes CSV (and optionally SVG)
// into --out, and prints a one-line summary per artifact. Determinism
// contract: identical config + seed give byte-identical CSV output,
// independent of --threads.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <ioncrystal/errors.hpp>
#include <ioncrystal/modes.hpp>
#include <ioncrystal/ramsey.hpp>
#include <ioncrystal/report.hpp>
#include <ioncrystal/version.hpp>

#include "run_config.hpp"

using nlohmann::json;
using namespace ioncrystal;
using namespace ioncrystal::runcfg;

namespace {

MetadataBlock run_metadata(const std::string& command, const CommonArgs& args,
                           const std::string& config_hash) {
    MetadataBlock meta;
    meta.add("command", command);
    meta.add("config", std::filesystem::path(args.config_path).filename().string());
    meta.add("config_fnv1a", config_hash);
    return meta;
}

MetadataBlock base_metadata(const std::string& command, const CommonArgs& args,
                            const std::string& config_hash, const TrapSetup& trap) {
    auto meta = run_metadata(command, args, config_hash);
    meta.add("alpha", fmt(trap.params.alpha));
    meta.add("delta_alpha", fmt(trap.params.delta_alpha));
    if (trap.sigma > 0.0)
        meta.add("sigma", fmt(trap.sigma));
    if (!trap.species.empty()) {
        meta.add("species", trap.species);
        const auto& physical = *trap.physical;
        meta.add("nu_x_khz", fmt(physical.nu_x / (kTwoPi * 1e3)));
        meta.add("nu_y_khz", fmt(physical.nu_y / (kTwoPi * 1e3)));
        meta.add("delta_nu_y_khz", fmt(physical.delta_nu_y / (kTwoPi * 1e3)));
        meta.add("length_scale_m", fmt(length_scale(physical.species, physical.nu_x)));
    }
    meta.add("units", "lengths in l, energies in m*nu_x^2*l^2, times in 1/nu_x, "
                      "angular frequencies in nu_x");
    return meta;
}

void add_phase_convention(MetadataBlock& meta) {
    meta.add("phase_convention",
             "dynamical phase accumulates (H_e - E_ground_level)/hbar with the ground-sector "
             "level (classical minimum + zero point) as zero; |I| is convention independent, "
             "P1/P2 are not");
}

std::filesystem::path prepare_out_dir(const CommonArgs& args) {
    std::filesystem::path out(args.out_dir);
    std::error_code ec;
    std::filesystem::create_directories(out, ec);
    if (ec)
        throw ConfigError("cannot create output directory " + out.string() + ": " + ec.message());
    return out;
}

// ---------------------------------------------------------------------------
// equilibrium

int cmd_equilibrium(const json& config, const CommonArgs& args, const std::string& hash) {
    const auto trap = parse_trap(config);
    const auto spins = parse_pattern(config, "ground");
    const auto result = solve_requested(config, "structure", trap.params, spins, args.seed,
                                        std::nullopt);

    auto meta = base_metadata("equilibrium", args, hash, trap);
    const auto out = prepare_out_dir(args);
    const std::string prefix = config.value("output_prefix", std::string("equilibrium"));
    write_equilibrium_csv((out / (prefix + ".csv")).string(), result, meta);
    write_equilibrium_json((out / (prefix + ".json")).string(), result, meta);
    std::cout << "equilibrium: " << to_string(result.kind) << " energy=" << fmt(result.energy)
              << " stable=" << (result.stable ? "yes" : "no") << " -> "
              << (out / (prefix + ".csv")).string() << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// modes

int cmd_modes(const json& config, const CommonArgs& args, const std::string& hash) {
    const auto trap = parse_trap(config);
    const auto spins = parse_pattern(config, "ground");

    std::vector<double> alphas;
    if (config.contains("alpha_sweep")) {
        const json& sweep = config["alpha_sweep"];
        const double lo = require_number(sweep, "lo", "alpha_sweep");
        const double hi = require_number(sweep, "hi", "alpha_sweep");
        const int samples = static_cast<int>(require_number(sweep, "samples", "alpha_sweep"));
        if (samples < 2 || hi <= lo)
            throw ConfigError("alpha_sweep needs lo < hi and samples >= 2");
        for (int i = 0; i < samples; ++i)
            alphas.push_back(lo + (hi - lo) * i / (samples - 1));
    } else {
        alphas.push_back(trap.params.alpha);
    }

    std::vector<std::string> structures;
    if (config.contains("structures"))
        structures = config["structures"].get<std::vector<std::string>>();
    else
        structures = {"lin_x", "zigzag_x", "zigzag_y"};

    std::vector<ModesRow> rows;
    for (double alpha : alphas) {
        TrapParams params = trap.params;
        params.alpha = alpha;
        if (params.alpha < 1.0)
            continue;
        for (const auto& name : structures) {
            try {
                const auto result = solve_structure(parse_kind(name), params, spins, args.seed);
                const auto modes = normal_modes(result.configuration, params, spins);
                ModesRow row;
                row.alpha = alpha;
                row.delta_alpha = params.delta_alpha;
                row.structure = to_string(result.kind);
                row.frequencies.assign(modes.frequencies.begin(), modes.frequencies.end());
                rows.push_back(std::move(row));
            } catch (const DomainError&) {
                // shape absent at this alpha; branch simply ends
            }
        }
    }
    if (rows.empty())
        throw DomainError("no requested structure exists anywhere in the sweep range");

    auto meta = base_metadata("modes", args, hash, trap);
    meta.add("frequency_sign", "negative omega marks an unstable direction");
    const auto out = prepare_out_dir(args);
    const std::string prefix = config.value("output_prefix", std::string("modes"));
    write_modes_csv((out / (prefix + ".csv")).string(), rows, meta);
    std::cout << "modes: " << rows.size() << " rows over " << alphas.size() << " alpha samples -> "
              << (out / (prefix + ".csv")).string() << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// stability

ScanRange parse_range(const json& config, const char* key) {
    if (!config.contains(key) || !config[key].is_object())
        throw ConfigError(std::string("stability config needs a '") + key +
                          "' object with lo/hi/cells");
    const json& j = config[key];
    ScanRange range;
    range.lo = require_number(j, "lo", key);
    range.hi = require_number(j, "hi", key);
    range.cells = static_cast<int>(j.value("cells", 200.0));
    if (range.hi <= range.lo || range.cells < 1)
        throw ConfigError(std::string(key) + " needs lo < hi and cells >= 1");
    return range;
}

int cmd_stability(const json& config, const CommonArgs& args, const std::string& hash) {
    const auto spins = parse_pattern(config, "center");
    const auto alpha_range = parse_range(config, "alpha");
    const auto dalpha_range = parse_range(config, "delta_alpha");

    ScanOptions options;
    options.threads = args.threads;
    options.seed = args.seed;
    options.extract_boundaries = config.value("boundaries", true);
    const auto diagram = scan_diagram(spins, alpha_range, dalpha_range, options);

    std::vector<AnalyticCurve> overlays;
    if (config.value("overlays", true))
        overlays = analytic_boundary_curves(diagram.sector, alpha_range, dalpha_range);

    auto meta = run_metadata("stability", args, hash);
    meta.add("alpha_range", fmt(alpha_range.lo) + ".." + fmt(alpha_range.hi));
    meta.add("delta_alpha_range", fmt(dalpha_range.lo) + ".." + fmt(dalpha_range.hi));
    meta.add("cells", std::to_string(alpha_range.cells) + "x" + std::to_string(dalpha_range.cells));
    meta.add("seed", std::to_string(args.seed));
    meta.add("residual_sign", "analytic boundary residuals are positive on the stable side");

    const auto out = prepare_out_dir(args);
    const std::string prefix = config.value("output_prefix", std::string("diagram"));
    write_diagram_csv((out / (prefix + ".csv")).string(), diagram, meta);
    if (options.extract_boundaries)
        write_boundaries_csv((out / (prefix + "_boundaries.csv")).string(), diagram, meta);
    render_diagram_svg((out / (prefix + ".svg")).string(), diagram, overlays);

    std::size_t stable_cells = 0;
    for (auto mask : diagram.cells)
        if (mask)
            ++stable_cells;
    std::cout << "stability: " << stable_cells << "/" << diagram.cells.size()
              << " cells have a stable structure -> " << (out / (prefix + ".csv")).string()
              << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// echo / spectrum / ramsey

void annotate_echo(MetadataBlock& meta, const EchoRun& run) {
    meta.add("ground_structure", to_string(run.ground.kind));
    meta.add("excited_structure", to_string(run.excited.kind));
    add_phase_convention(meta);
}

std::string labeled(const std::string& stem, const std::string& label, const char* ext) {
    return label.empty() ? stem + ext : stem + "_" + label + ext;
}

int cmd_echo(const json& config, const CommonArgs& args, const std::string& hash) {
    const auto out = prepare_out_dir(args);
    for (const auto& [label, merged] : expand_variants(config)) {
        const auto run = compute_echo(merged, args);
        auto meta = base_metadata("echo", args, hash, run.trap);
        if (!label.empty())
            meta.add("variant", label);
        annotate_echo(meta, run);
        const auto csv = out / labeled("echo", label, ".csv");
        write_series_csv(csv.string(), run.series, meta);
        if (merged.value("svg", false))
            render_series_svg((out / labeled("echo", label, ".svg")).string(), run.series);
        double min_abs = 1.0;
        for (const auto& v : run.series.values)
            min_abs = std::min(min_abs, std::abs(v));
        std::cout << "echo" << (label.empty() ? "" : " " + label) << ": "
                  << to_string(run.ground.kind) << " -> " << to_string(run.excited.kind)
                  << ", min|I|=" << fmt(min_abs) << " -> " << csv.string() << "\n";
    }
    return 0;
}

int cmd_spectrum(const json& config, const CommonArgs& args, const std::string& hash) {
    const auto out = prepare_out_dir(args);
    const auto window = [&config] {
        const std::string name = config.value("window", std::string("rectangular"));
        if (name == "rectangular")
            return SpectralWindow::rectangular;
        if (name == "hann")
            return SpectralWindow::hann;
        throw ConfigError("unknown window '" + name + "' (expected rectangular|hann)");
    }();

    if (config.contains("input_csv")) {
        auto series = read_series_csv(config["input_csv"].get<std::string>());
        if (config.contains("nu_x_khz"))
            series.metadata.nu_x = config["nu_x_khz"].get<double>() * kTwoPi * 1e3;
        const auto spec = spectrum(series, window);
        auto meta = run_metadata("spectrum", args, hash);
        meta.add("input_csv", config["input_csv"].get<std::string>());
        meta.add("window", config.value("window", std::string("rectangular")));
        meta.add("transform", "one-sided DFT magnitude of |I(t)|, DC bin retained");
        const auto csv = out / labeled("spectrum", config.value("label", std::string()), ".csv");
        write_spectrum_csv(csv.string(), spec, series.metadata.nu_x, meta);
        std::cout << "spectrum: " << spec.frequencies.size() << " bins, d_omega="
                  << fmt(spec.bin_width) << " -> " << csv.string() << "\n";
        return 0;
    }

    for (const auto& [label, merged] : expand_variants(config)) {
        const auto run = compute_echo(merged, args);
        const auto spec = spectrum(run.series, window);
        auto meta = base_metadata("spectrum", args, hash, run.trap);
        if (!label.empty())
            meta.add("variant", label);
        annotate_echo(meta, run);
        meta.add("window", merged.value("window", std::string("rectangular")));
        meta.add("transform", "one-sided DFT magnitude of |I(t)|, DC bin retained");
        const auto csv = out / labeled("spectrum", label, ".csv");
        write_spectrum_csv(csv.string(), spec, run.trap.nu_x, meta);
        if (merged.value("write_series", false))
            write_series_csv((out / labeled("echo", label, ".csv")).string(), run.series, meta);
        std::cout << "spectrum" << (label.empty() ? "" : " " + label) << ": "
                  << spec.frequencies.size() << " bins, d_omega=" << fmt(spec.bin_width)
                  << " -> " << csv.string() << "\n";
    }
    return 0;
}

int cmd_ramsey(const json& config, const CommonArgs& args, const std::string& hash) {
    const auto out = prepare_out_dir(args);
    for (const auto& [label, merged] : expand_variants(config)) {
        const auto run = compute_echo(merged, args);
        const auto p1 = ramsey_p1(run.series);
        const auto p2 = ramsey_p2(run.series);
        auto meta = base_metadata("ramsey", args, hash, run.trap);
        if (!label.empty())
            meta.add("variant", label);
        annotate_echo(meta, run);
        if (const auto spacing = revival_spacing(run.series))
            meta.add("revival_spacing", fmt(*spacing));
        const auto csv = out / labeled("ramsey", label, ".csv");
        write_probability_csv(csv.string(), run.series, p1, p2, meta);
        if (merged.value("write_series", false))
            write_series_csv((out / labeled("echo", label, ".csv")).string(), run.series, meta);
        std::cout << "ramsey" << (label.empty() ? "" : " " + label) << ": "
                  << run.series.times.size() << " samples -> " << csv.string() << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Three-ion planar crystal toolkit: equilibria, normal modes, structural "
                 "stability diagrams, and spin-echo interferometry of structural "
                 "superpositions"};
    app.fallthrough(true);
    app.require_subcommand(1);

    CommonArgs args;
    app.add_option("--config", args.config_path, "JSON run configuration")->required();
    app.add_option("--out", args.out_dir, "output directory (created if absent)");
    app.add_option("--threads", args.threads, "worker threads, 0 = hardware concurrency");
    auto* seed_opt = app.add_option("--seed", args.seed, "seed for stochastic searches");

    auto* equilibrium = app.add_subcommand("equilibrium", "solve one crystal structure");
    auto* modes = app.add_subcommand("modes", "normal-mode branches over an alpha sweep");
    auto* stability = app.add_subcommand("stability", "structural stability diagram scan");
    auto* echo = app.add_subcommand("echo", "overlap series I(t) after a spin quench");
    auto* spectrum_cmd = app.add_subcommand("spectrum", "DFT of an overlap series");
    auto* ramsey = app.add_subcommand("ramsey", "interferometer outcome probabilities");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        std::string hash;
        const json config = load_config(args.config_path, hash);
        if (!seed_opt->count() && config.contains("seed"))
            args.seed = config["seed"].get<std::uint64_t>();

        if (*equilibrium)
            return cmd_equilibrium(config, args, hash);
        if (*modes)
            return cmd_modes(config, args, hash);
        if (*stability)
            return cmd_stability(config, args, hash);
        if (*echo)
            return cmd_echo(config, args, hash);
        if (*spectrum_cmd)
            return cmd_spectrum(config, args, hash);
        if (*ramsey)
            return cmd_ramsey(config, args, hash);
        return 2; // unreachable given require_subcommand
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
