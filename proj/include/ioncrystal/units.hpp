#pragma once

#include <map>
#include <optional>
#include <string>

namespace ioncrystal {

/// CODATA 2018 values, SI.
namespace constants {
inline constexpr double elementary_charge = 1.602176634e-19;    // C
inline constexpr double vacuum_permittivity = 8.8541878128e-12; // F/m
inline constexpr double atomic_mass_unit = 1.66053906660e-27;   // kg
inline constexpr double hbar = 1.054571817e-34;                 // J s
} // namespace constants

struct IonSpecies {
    std::string name;
    double mass_amu = 0.0;
    double charge = constants::elementary_charge; // C, singly ionized by default

    double mass_kg() const { return mass_amu * constants::atomic_mass_unit; }
};

/// Built-in singly ionized species. Keys are the canonical names
/// ("Be9", "Mg24", "Ca40", "Sr88"); common isotope notations such as
/// "9Be+" are accepted by find_species. The table is a starting point,
/// not a restriction: any IonSpecies value works everywhere.
const std::map<std::string, IonSpecies>& species_table();

/// Looks up a species by canonical name or alias; empty if unknown.
std::optional<IonSpecies> find_species(const std::string& name);

/// Trap description in laboratory units. Frequencies are angular (rad/s);
/// the factory below accepts the nu/2pi convention in kHz used throughout
/// the configuration files.
struct PhysicalTrap {
    IonSpecies species;
    double nu_x = 0.0;         // rad/s, axial
    double nu_y = 0.0;         // rad/s, transverse, spin |g>
    double delta_nu_y = 0.0;   // rad/s, transverse shift seen by spin |e>

    static PhysicalTrap from_khz(IonSpecies species, double nu_x_khz,
                                 double nu_y_khz, double delta_nu_y_khz);
};

/// Characteristic Coulomb length l = (q^2 / (4 pi eps0 m nu_x^2))^(1/3).
/// All dimensionless positions are measured in units of l.
double length_scale(const IonSpecies& species, double nu_x);

/// Characteristic energy m nu_x^2 l^2; dimensionless potentials are in
/// units of this.
double energy_scale(const IonSpecies& species, double nu_x);

/// Quantum fluctuation scale sigma = sqrt(hbar / (m nu_x)) / l. This is the
/// ratio of the ground-state wave-packet size to the crystal length scale;
/// it is the only place the ion mass enters the quantum dynamics.
double quantum_scale(const IonSpecies& species, double nu_x);

/// Dimensionless trap parameters plus the scales needed to convert back.
struct DimensionlessTrap {
    double alpha = 0.0;        // nu_y / nu_x
    double delta_alpha = 0.0;  // delta_nu_y / nu_x
    double sigma = 0.0;        // quantum fluctuation scale
    double length_m = 0.0;     // l in metres
    double energy_j = 0.0;     // energy unit in joules
    double time_s = 0.0;       // duration of one dimensionless time unit
};

DimensionlessTrap to_dimensionless(const PhysicalTrap& trap);

/// tau (units of 1/nu_x) -> seconds.
double to_physical_time(double tau, const PhysicalTrap& trap);

/// seconds -> tau.
double to_dimensionless_time(double seconds, const PhysicalTrap& trap);

} // namespace ioncrystal
