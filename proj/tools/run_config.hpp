#pragma once

// JSON run-configuration plumbing shared by the CLI and the acceptance
// runner. Everything here turns a config document into library calls; no
// numerics of its own.

#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <ioncrystal/crystal.hpp>
#include <ioncrystal/errors.hpp>
#include <ioncrystal/gaussian.hpp>
#include <ioncrystal/stability.hpp>
#include <ioncrystal/units.hpp>

namespace ioncrystal::runcfg {

using nlohmann::json;

inline constexpr double kStabilityFloor = 1e-9;
inline constexpr double kTwoPi = 6.28318530717958647692;

struct CommonArgs {
    std::string config_path;
    std::string out_dir = ".";
    int threads = 0;
    std::uint64_t seed = 20260823;
};

inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

inline json load_config(const std::string& path, std::string& hash_out) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("cannot read config file: " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string bytes = buffer.str();
    hash_out = fnv1a_hex(bytes);
    try {
        return json::parse(bytes);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
}

inline double require_number(const json& j, const char* key, const char* where) {
    if (!j.contains(key) || !j[key].is_number())
        throw ConfigError(std::string(where) + " needs a numeric '" + key + "' field");
    return j[key].get<double>();
}

struct TrapSetup {
    TrapParams params;   // n_ions = 3 throughout
    double sigma = 0.0;  // 0 = unset; only the quantum commands need it
    std::string species; // empty for dimensionless input
    double nu_x = 0.0;   // rad/s; 0 for dimensionless input
    std::optional<PhysicalTrap> physical;
};

inline TrapSetup parse_trap(const json& config) {
    if (!config.contains("trap") || !config["trap"].is_object())
        throw ConfigError("config needs a 'trap' object");
    const json& t = config["trap"];
    TrapSetup setup;
    if (t.contains("species")) {
        const auto name = t["species"].get<std::string>();
        const auto species = find_species(name);
        if (!species)
            throw ConfigError("unknown species '" + name + "' (known: Be9, Mg24, Ca40, Sr88)");
        const double nu_x_khz = require_number(t, "nu_x_khz", "trap");
        const double nu_y_khz = require_number(t, "nu_y_khz", "trap");
        const double delta_khz = t.value("delta_nu_y_khz", 0.0);
        if (nu_x_khz <= 0.0 || nu_y_khz <= 0.0)
            throw ConfigError("trap frequencies must be positive");
        const auto physical = PhysicalTrap::from_khz(*species, nu_x_khz, nu_y_khz, delta_khz);
        const auto scales = to_dimensionless(physical);
        setup.params.alpha = scales.alpha;
        setup.params.delta_alpha = scales.delta_alpha;
        setup.sigma = scales.sigma;
        setup.species = species->name;
        setup.nu_x = physical.nu_x;
        setup.physical = physical;
    } else {
        setup.params.alpha = require_number(t, "alpha", "trap");
        setup.params.delta_alpha = t.value("delta_alpha", 0.0);
        setup.sigma = t.value("sigma", 0.0);
        if (setup.sigma < 0.0)
            throw ConfigError("trap.sigma must be positive when given");
    }
    setup.params.validate();
    return setup;
}

inline SpinPattern parse_pattern(const json& config, const std::string& fallback) {
    const std::string name = config.value("pattern", fallback);
    if (name == "ground")
        return all_ground(3);
    if (name == "excited")
        return all_excited(3);
    if (name == "center")
        return center_excited(3);
    if (name == "outer")
        return outer_excited(3);
    throw ConfigError("unknown pattern '" + name + "' (expected ground|excited|center|outer)");
}

inline StructureKind parse_kind(const std::string& name) {
    for (auto kind : {StructureKind::lin_x, StructureKind::zigzag_x, StructureKind::zigzag_y,
                      StructureKind::lin_x_star, StructureKind::tria_star})
        if (name == to_string(kind))
            return kind;
    throw ConfigError("unknown structure '" + name + "'");
}

inline std::string sector_diagnostic(const TrapParams& trap) {
    return "alpha=" + fmt(trap.alpha) + ", delta_alpha=" + fmt(trap.delta_alpha);
}

inline EquilibriumResult solve_structure(StructureKind kind, const TrapParams& trap,
                                         const SpinPattern& spins, std::uint64_t seed) {
    if (kind == StructureKind::tria_star) {
        auto search = metropolis_search(trap, spins, seed, {}, SearchConstraint{true, 1e-2});
        if (!search.result)
            throw DomainError("structure search found no asymmetric stable crystal at " +
                              sector_diagnostic(trap));
        return *search.result;
    }
    const auto base = kind == StructureKind::lin_x_star ? StructureKind::lin_x : kind;
    return find_equilibrium(analytic_equilibrium(base, trap, spins), trap, spins);
}

/// Structure selection used by `"structure": "auto"`. Closed-form candidates
/// are all evaluated; among the stable ones the preferred kind wins if it is
/// present (the quench protocol continues the ground-sector branch), else the
/// lowest energy. The outer-excited sector falls back to a seeded search for
/// the asymmetric triangle when the chain is unstable.
inline EquilibriumResult solve_auto(const TrapParams& trap, const SpinPattern& spins,
                                    std::uint64_t seed, std::optional<StructureKind> prefer) {
    if (sector_for(spins) == ScanSector::outer_excited) {
        auto chain = solve_structure(StructureKind::lin_x_star, trap, spins, seed);
        if (chain.min_eigenvalue > kStabilityFloor)
            return chain;
        return solve_structure(StructureKind::tria_star, trap, spins, seed);
    }
    std::vector<EquilibriumResult> stable;
    for (auto kind : {StructureKind::lin_x, StructureKind::zigzag_x, StructureKind::zigzag_y}) {
        try {
            auto result = solve_structure(kind, trap, spins, seed);
            if (result.min_eigenvalue > kStabilityFloor)
                stable.push_back(std::move(result));
        } catch (const DomainError&) {
            // shape does not exist at these parameters
        }
    }
    if (stable.empty())
        throw DomainError("no stable crystal structure at " + sector_diagnostic(trap));
    if (prefer)
        for (auto& candidate : stable)
            if (candidate.kind == *prefer)
                return candidate;
    auto best = &stable.front();
    for (auto& candidate : stable)
        if (candidate.energy < best->energy)
            best = &candidate;
    return *best;
}

inline EquilibriumResult solve_requested(const json& config, const char* key,
                                         const TrapParams& trap, const SpinPattern& spins,
                                         std::uint64_t seed,
                                         std::optional<StructureKind> prefer) {
    const std::string request = config.value(key, std::string("auto"));
    if (request == "auto")
        return solve_auto(trap, spins, seed, prefer);
    return solve_structure(parse_kind(request), trap, spins, seed);
}

/// Time grid: `time: {t_max | t_max_us, samples}`, defaulting to 4096 samples
/// over 200/nu_x.
inline std::vector<double> parse_time_grid(const json& config, const TrapSetup& trap) {
    double t_max = 200.0;
    int samples = 4096;
    if (config.contains("time")) {
        if (!config["time"].is_object())
            throw ConfigError("'time' must be an object with t_max (or t_max_us) and samples");
        const json& t = config["time"];
        if (t.contains("t_max_us")) {
            if (!trap.physical)
                throw ConfigError("t_max_us needs a physical trap (species + frequencies)");
            t_max = to_dimensionless_time(t["t_max_us"].get<double>() * 1e-6, *trap.physical);
        } else if (t.contains("t_max")) {
            t_max = require_number(t, "t_max", "time");
        }
        samples = static_cast<int>(t.value("samples", 4096.0));
    }
    if (t_max <= 0.0 || samples < 2)
        throw ConfigError("time grid needs t_max > 0 and samples >= 2");
    std::vector<double> times(samples);
    for (int i = 0; i < samples; ++i)
        times[i] = t_max * i / (samples - 1.0);
    return times;
}

/// Variants let one config produce a family of curves: each entry is a
/// partial config merged over the base (trap keys merge, everything else
/// replaces) plus a label used in file names.
inline std::vector<std::pair<std::string, json>> expand_variants(const json& config) {
    std::vector<std::pair<std::string, json>> runs;
    if (!config.contains("variants")) {
        runs.emplace_back(config.value("label", std::string()), config);
        return runs;
    }
    if (!config["variants"].is_array() || config["variants"].empty())
        throw ConfigError("'variants' must be a non-empty array");
    for (const auto& variant : config["variants"]) {
        if (!variant.is_object() || !variant.contains("label"))
            throw ConfigError("every variant needs a 'label'");
        json merged = config;
        merged.erase("variants");
        for (const auto& [key, value] : variant.items()) {
            if (key == "trap" && merged.contains("trap")) {
                for (const auto& [tkey, tvalue] : value.items())
                    merged["trap"][tkey] = tvalue;
            } else {
                merged[key] = value;
            }
        }
        runs.emplace_back(variant["label"].get<std::string>(), merged);
    }
    return runs;
}

struct EchoRun {
    TrapSetup trap;
    OverlapSeries series;
    EquilibriumResult ground;
    EquilibriumResult excited;
};

inline EchoRun compute_echo(const json& config, const CommonArgs& args) {
    EchoRun run;
    run.trap = parse_trap(config);
    if (run.trap.sigma <= 0.0)
        throw ConfigError("echo needs trap.sigma > 0 (or a physical trap, which implies it)");
    const auto spins_excited = parse_pattern(config, "center");
    if (excited_count(spins_excited) == 0)
        throw ConfigError("echo needs a pattern with at least one excited ion");
    const auto spins_ground = all_ground(3);

    run.ground = solve_requested(config, "ground_structure", run.trap.params, spins_ground,
                                 args.seed, std::nullopt);
    if (run.ground.min_eigenvalue <= kStabilityFloor)
        throw DomainError("ground sector is not stable at " + sector_diagnostic(run.trap.params));
    run.excited = solve_requested(config, "excited_structure", run.trap.params, spins_excited,
                                  args.seed, run.ground.kind);
    if (run.excited.min_eigenvalue <= kStabilityFloor)
        throw DomainError("excited sector is not stable at " + sector_diagnostic(run.trap.params));

    const auto model_g = make_model(run.ground.configuration, run.trap.params, spins_ground,
                                    run.trap.sigma, run.ground.energy);
    const auto model_e = make_model(run.excited.configuration, run.trap.params, spins_excited,
                                    run.trap.sigma, run.ground.energy);

    EchoOptions options;
    options.threads = args.threads;
    run.series = loschmidt_echo(model_g, model_e, parse_time_grid(config, run.trap), options);
    run.series.metadata.alpha = run.trap.params.alpha;
    run.series.metadata.delta_alpha = run.trap.params.delta_alpha;
    run.series.metadata.species = run.trap.species;
    run.series.metadata.nu_x = run.trap.nu_x;
    return run;
}

} // namespace ioncrystal::runcfg
