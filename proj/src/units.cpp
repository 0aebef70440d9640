#include "ioncrystal/units.hpp"

#include <cmath>
#include <numbers>

#include "ioncrystal/errors.hpp"

namespace ioncrystal {

namespace {

std::map<std::string, IonSpecies> make_species_table() {
    std::map<std::string, IonSpecies> table;
    table["Be9"] = IonSpecies{"Be9", 9.0122};
    table["Mg24"] = IonSpecies{"Mg24", 23.98504};
    table["Ca40"] = IonSpecies{"Ca40", 39.96259};
    table["Sr88"] = IonSpecies{"Sr88", 87.90561};
    return table;
}

std::string canonical_name(const std::string& name) {
    if (name == "9Be+" || name == "Be+" || name == "9Be") return "Be9";
    if (name == "24Mg+" || name == "Mg+" || name == "24Mg") return "Mg24";
    if (name == "40Ca+" || name == "Ca+" || name == "40Ca") return "Ca40";
    if (name == "88Sr+" || name == "Sr+" || name == "88Sr") return "Sr88";
    return name;
}

void check_trap(const PhysicalTrap& trap) {
    if (trap.species.mass_amu <= 0.0)
        throw ConfigError("species mass must be positive");
    if (trap.species.charge <= 0.0)
        throw ConfigError("species charge must be positive");
    if (trap.nu_x <= 0.0)
        throw ConfigError("axial frequency nu_x must be positive");
    if (trap.nu_y <= 0.0)
        throw ConfigError("transverse frequency nu_y must be positive");
}

} // namespace

const std::map<std::string, IonSpecies>& species_table() {
    static const auto table = make_species_table();
    return table;
}

std::optional<IonSpecies> find_species(const std::string& name) {
    const auto& table = species_table();
    const auto it = table.find(canonical_name(name));
    if (it == table.end()) return std::nullopt;
    return it->second;
}

PhysicalTrap PhysicalTrap::from_khz(IonSpecies species, double nu_x_khz,
                                    double nu_y_khz, double delta_nu_y_khz) {
    constexpr double two_pi_k = 2.0 * std::numbers::pi * 1e3;
    return PhysicalTrap{std::move(species), two_pi_k * nu_x_khz,
                        two_pi_k * nu_y_khz, two_pi_k * delta_nu_y_khz};
}

double length_scale(const IonSpecies& species, double nu_x) {
    const double q = species.charge;
    const double m = species.mass_kg();
    const double denom = 4.0 * std::numbers::pi * constants::vacuum_permittivity * m * nu_x * nu_x;
    return std::cbrt(q * q / denom);
}

double energy_scale(const IonSpecies& species, double nu_x) {
    const double l = length_scale(species, nu_x);
    return species.mass_kg() * nu_x * nu_x * l * l;
}

double quantum_scale(const IonSpecies& species, double nu_x) {
    const double l = length_scale(species, nu_x);
    return std::sqrt(constants::hbar / (species.mass_kg() * nu_x)) / l;
}

DimensionlessTrap to_dimensionless(const PhysicalTrap& trap) {
    check_trap(trap);
    DimensionlessTrap out;
    out.alpha = trap.nu_y / trap.nu_x;
    out.delta_alpha = trap.delta_nu_y / trap.nu_x;
    out.sigma = quantum_scale(trap.species, trap.nu_x);
    out.length_m = length_scale(trap.species, trap.nu_x);
    out.energy_j = energy_scale(trap.species, trap.nu_x);
    out.time_s = 1.0 / trap.nu_x;
    return out;
}

double to_physical_time(double tau, const PhysicalTrap& trap) {
    check_trap(trap);
    return tau / trap.nu_x;
}

double to_dimensionless_time(double seconds, const PhysicalTrap& trap) {
    check_trap(trap);
    return seconds * trap.nu_x;
}

} // namespace ioncrystal
