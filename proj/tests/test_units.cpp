#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <ioncrystal/units.hpp>

#include "oracles.hpp"

using namespace ioncrystal;

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

PhysicalTrap be_trap(double nu_x_khz = 500.0, double nu_y_khz = 773.5,
                     double delta_nu_y_khz = 10.0) {
    return PhysicalTrap::from_khz(*find_species("Be9"), nu_x_khz, nu_y_khz, delta_nu_y_khz);
}

} // namespace

TEST_CASE("species table contents and lookup") {
    const auto& table = species_table();
    REQUIRE(table.size() == 4);
    for (const char* name : {"Be9", "Mg24", "Ca40", "Sr88"}) {
        auto it = table.find(name);
        REQUIRE(it != table.end());
        CHECK(it->second.mass_amu > 0.0);
        CHECK(it->second.charge == constants::elementary_charge);
    }
    CHECK(table.at("Be9").mass_amu == doctest::Approx(9.0122).epsilon(1e-12));
    CHECK(table.at("Mg24").mass_amu == doctest::Approx(23.985).epsilon(1e-3));
    CHECK(table.at("Ca40").mass_amu == doctest::Approx(39.963).epsilon(1e-3));

    CHECK(find_species("Be9").has_value());
    CHECK(find_species("9Be+")->name == "Be9");
    CHECK(find_species("24Mg+")->name == "Mg24");
    CHECK(find_species("40Ca+")->name == "Ca40");
    CHECK(find_species("88Sr+")->name == "Sr88");
    CHECK(!find_species("Yb171").has_value());
    CHECK(!find_species("").has_value());
}

TEST_CASE("from_khz applies the angular-frequency convention") {
    auto trap = be_trap();
    CHECK(rel(trap.nu_x, kTwoPi * 500.0e3) < 1e-15);
    CHECK(rel(trap.nu_y, kTwoPi * 773.5e3) < 1e-15);
    CHECK(rel(trap.delta_nu_y, kTwoPi * 10.0e3) < 1e-15);
    CHECK(trap.species.name == "Be9");
}

TEST_CASE("frozen characteristic scales at nu_x = 2pi x 500 kHz") {
    for (const auto& row : oracle::kScales500kHz) {
        auto species = *find_species(row.name);
        const double nu_x = kTwoPi * 500.0e3;
        CHECK_MESSAGE(rel(length_scale(species, nu_x), row.length_m) < 1e-12, row.name);
        CHECK_MESSAGE(rel(energy_scale(species, nu_x), row.energy_j) < 1e-12, row.name);
        CHECK_MESSAGE(rel(quantum_scale(species, nu_x), row.sigma) < 1e-12, row.name);
    }
}

TEST_CASE("length scale power law in nu_x") {
    auto species = *find_species("Be9");
    const double nu_x = kTwoPi * 500.0e3;
    const double expected = length_scale(species, nu_x) * std::pow(4.0, -2.0 / 3.0);
    CHECK(rel(length_scale(species, 4.0 * nu_x), expected) < 1e-13);
}

TEST_CASE("length scale ignores the transverse frequencies") {
    auto a = to_dimensionless(be_trap(500.0, 773.5, 10.0));
    auto b = to_dimensionless(be_trap(500.0, 900.0, 0.0));
    CHECK(a.length_m == b.length_m);
    CHECK(a.energy_j == b.energy_j);
    CHECK(a.sigma == b.sigma);
}

TEST_CASE("monotonicity of the scales in the ion mass") {
    // l = (q^2 / (4 pi eps0 m nu^2))^(1/3) falls with m; E = m nu^2 l^2
    // therefore grows as m^(1/3); sigma falls as m^(-1/6).
    const double nu_x = kTwoPi * 500.0e3;
    const char* order[] = {"Be9", "Mg24", "Ca40", "Sr88"};
    for (int i = 0; i + 1 < 4; ++i) {
        auto lighter = *find_species(order[i]);
        auto heavier = *find_species(order[i + 1]);
        CHECK(length_scale(lighter, nu_x) > length_scale(heavier, nu_x));
        CHECK(energy_scale(lighter, nu_x) < energy_scale(heavier, nu_x));
        CHECK(quantum_scale(lighter, nu_x) > quantum_scale(heavier, nu_x));
        CHECK(length_scale(heavier, nu_x) > 0.0);
        CHECK(energy_scale(heavier, nu_x) > 0.0);
    }
}

TEST_CASE("to_dimensionless reproduces the reference aspect ratios") {
    SUBCASE("alpha = 1.547, delta_alpha = 0.02") {
        auto d = to_dimensionless(be_trap(500.0, 773.5, 10.0));
        CHECK(rel(d.alpha, 1.547) < 1e-12);
        CHECK(rel(d.delta_alpha, 0.02) < 1e-12);
    }
    SUBCASE("alpha = 1.55") {
        auto d = to_dimensionless(be_trap(500.0, 775.0, 0.0));
        CHECK(rel(d.alpha, 1.55) < 1e-12);
        CHECK(d.delta_alpha == 0.0);
    }
    SUBCASE("scales recorded alongside") {
        auto d = to_dimensionless(be_trap());
        CHECK(rel(d.length_m, oracle::kScales500kHz[0].length_m) < 1e-12);
        CHECK(rel(d.energy_j, oracle::kScales500kHz[0].energy_j) < 1e-12);
        CHECK(rel(d.sigma, oracle::kScales500kHz[0].sigma) < 1e-12);
        CHECK(rel(d.time_s, 1.0 / (kTwoPi * 500.0e3)) < 1e-14);
    }
}

TEST_CASE("time conversions") {
    auto trap = be_trap();
    SUBCASE("one axial period at 500 kHz is 2 microseconds") {
        CHECK(rel(to_physical_time(kTwoPi, trap), 2.0e-6) < 1e-12);
    }
    SUBCASE("zero maps to zero") {
        CHECK(to_physical_time(0.0, trap) == 0.0);
        CHECK(to_dimensionless_time(0.0, trap) == 0.0);
    }
    SUBCASE("round trips") {
        for (double t : {1e-6, 0.37, 12.0, 5400.0}) {
            CHECK(rel(to_dimensionless_time(to_physical_time(t, trap), trap), t) < 1e-12);
        }
        for (double s : {1e-9, 2.5e-6, 1e-3}) {
            CHECK(rel(to_physical_time(to_dimensionless_time(s, trap), trap), s) < 1e-12);
        }
    }
}

TEST_CASE("quantum scale is the only mass channel") {
    // Two species at traps tuned to the same alpha, delta_alpha differ only
    // through sigma once positions are dimensionless.
    auto be = to_dimensionless(be_trap());
    auto mg = to_dimensionless(
        PhysicalTrap::from_khz(*find_species("Mg24"), 500.0, 773.5, 10.0));
    CHECK(rel(be.alpha, mg.alpha) < 1e-15);
    CHECK(rel(be.delta_alpha, mg.delta_alpha) < 1e-15);
    CHECK(be.sigma > mg.sigma);
}
