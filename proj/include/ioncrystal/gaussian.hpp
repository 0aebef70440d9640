#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include <ioncrystal/crystal.hpp>
#include <ioncrystal/modes.hpp>

namespace ioncrystal {

/// Quadratic expansion of one spin sector's potential about its equilibrium.
///
/// Together with the fluctuation scale sigma this fixes the quantum problem
/// completely: positions are measured in units of sigma*l, hbar = 1, masses
/// are absorbed, so mode frequencies keep their dimensionless values and the
/// classical offset enters phases as energy_offset / sigma^2.
struct QuadraticModel {
    IonConfiguration equilibrium;
    NormalModes modes;
    double energy_offset = 0.0; // classical potential at the equilibrium
    double sigma = 1.0;

    int dim() const { return static_cast<int>(modes.frequencies.size()); }
};

/// Builds the model for one spin sector: modes from the Hessian at
/// `equilibrium` (which must be stationary) and energy_offset from the
/// classical potential, minus `energy_reference` so that several models can
/// share one energy zero.
QuadraticModel make_model(const IonConfiguration& equilibrium, const TrapParams& trap,
                          const SpinPattern& spins, double sigma,
                          double energy_reference = 0.0);

/// Pure Gaussian wavepacket  psi(x) ~ exp(-(x-q)' A (x-q)/2 + i p'(x-q) + i phase)
/// in scaled coordinates (units of sigma*l). A is complex symmetric with
/// positive definite real part; the normalization constant is implied.
struct GaussianPureState {
    Eigen::VectorXd mean_q;
    Eigen::VectorXd mean_p;
    Eigen::MatrixXcd width;
    double phase = 0.0;

    int dim() const { return static_cast<int>(mean_q.size()); }
};

/// Vibrational ground state of a stable model: A = V diag(omega) V', means at
/// the equilibrium, zero phase. Refuses unstable models and models whose
/// lowest frequency is below the soft-mode floor (1e-4): so close to the
/// instability the harmonic width diverges and the expansion is meaningless.
GaussianPureState ground_state(const QuadraticModel& model);

/// Exact evolution of a Gaussian state for time t under the model
/// Hamiltonian (quadratic, so Gaussians stay Gaussian). The accumulated
/// phase is the full dynamical phase minus phase_reference_rate * t; passing
/// the reference level of the initial sector keeps the phase O(1) instead of
/// O(energy_offset/sigma^2 * t), which is what makes the echo phases
/// numerically exact. Negative t runs backwards.
GaussianPureState evolve(const GaussianPureState& state, const QuadraticModel& model,
                         double t, double phase_reference_rate = 0.0);

/// Closed-form inner product <a|b> of two normalized Gaussian pure states,
/// including their phases. The determinant branch is fixed by taking
/// principal square roots of the eigenvalues of conj(A_a) + A_b, all of
/// which have positive real part.
std::complex<double> overlap(const GaussianPureState& a, const GaussianPureState& b);

struct SeriesMetadata {
    double alpha = 0.0;
    double delta_alpha = 0.0;
    double sigma = 0.0;
    std::string species;  // label; empty for dimensionless runs
    double nu_x = 0.0;    // rad/s; 0 when only dimensionless data exist
};

/// Time grid with complex overlap samples I(t).
struct OverlapSeries {
    std::vector<double> times; // units of 1/nu_x
    std::vector<std::complex<double>> values;
    SeriesMetadata metadata;
};

struct EchoOptions {
    int threads = 0; // 0 = hardware concurrency
};

/// Loschmidt echo I(t) = <phi(0)| exp(-i H_e t) |phi(0)> where phi(0) is the
/// ground state of `ground_model` and H_e the `excited_model` Hamiltonian.
/// The energy zero is the ground sector's level (classical minimum plus zero
/// point), so identical models give I(t) = 1 identically. The time grid must
/// be strictly increasing and nonnegative; evolution proceeds incrementally
/// along the grid in fixed chunks, so results do not depend on thread count.
OverlapSeries loschmidt_echo(const QuadraticModel& ground_model,
                             const QuadraticModel& excited_model,
                             const std::vector<double>& times, const EchoOptions& options = {});

/// Reference phase rate (energy_offset/sigma^2 + half the frequency sum)
/// that loschmidt_echo subtracts; exposed for tests and custom protocols.
double ground_level_rate(const QuadraticModel& model);

/// Closed-form single-mode echo: 1D quench omega_g -> omega_e whose excited
/// equilibrium is displaced by `displacement` (scaled coordinates). Same
/// energy-zero convention as loschmidt_echo with zero classical offsets.
std::complex<double> single_mode_echo_reference(double omega_g, double omega_e,
                                                double displacement, double t);

} // namespace ioncrystal
