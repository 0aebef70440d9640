#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ioncrystal {

/// Dimensionless trap parameters for a planar crystal of identical ions.
/// alpha = nu_y/nu_x >= 1 keeps the crystal shapes planar and chain-like;
/// delta_alpha is the extra transverse confinement seen by excited ions.
struct TrapParams {
    int n_ions = 3;
    double alpha = 1.5;
    double delta_alpha = 0.0;

    /// Throws ConfigError on invalid values (n_ions < 2, alpha < 1, or an
    /// inverted excited-state trap alpha + delta_alpha <= 0).
    void validate() const;
};

enum class Spin : std::uint8_t { ground, excited };

using SpinPattern = std::vector<Spin>;

SpinPattern all_ground(int n_ions);
SpinPattern all_excited(int n_ions);
/// Middle ion excited; requires odd n_ions.
SpinPattern center_excited(int n_ions);
/// Last ion excited.
SpinPattern outer_excited(int n_ions);
int excited_count(const SpinPattern& spins);

/// Planar ion positions in units of the Coulomb length l, stored interleaved
/// (x0, y0, x1, y1, ...).
class IonConfiguration {
public:
    IonConfiguration() = default;
    explicit IonConfiguration(Eigen::VectorXd coords);
    static IonConfiguration from_xy(const std::vector<double>& x, const std::vector<double>& y);

    int n_ions() const { return static_cast<int>(coords_.size()) / 2; }
    double x(int ion) const { return coords_[2 * ion]; }
    double y(int ion) const { return coords_[2 * ion + 1]; }
    void set(int ion, double x, double y);

    const Eigen::VectorXd& coords() const { return coords_; }
    Eigen::VectorXd& coords() { return coords_; }

    /// Smallest pairwise distance.
    double min_separation() const;

private:
    Eigen::VectorXd coords_;
};

/// Structural classes of the three-ion crystal. The starred kinds carry spin
/// placement: lin_x_star is a linear chain whose excited ion sits at an end,
/// tria_star a stable triangle with no spin-preserving mirror symmetry.
enum class StructureKind : std::uint8_t {
    lin_x,
    zigzag_x,
    zigzag_y,
    lin_x_star,
    tria_star,
    other,
};

std::string to_string(StructureKind kind);

/// Total dimensionless potential: harmonic traps (spin-dependent transverse
/// stiffness) plus mutual Coulomb repulsion. Throws DomainError if any pair
/// of ions is closer than 1e-9.
double potential_energy(const IonConfiguration& config, const TrapParams& trap,
                        const SpinPattern& spins);

Eigen::VectorXd potential_gradient(const IonConfiguration& config, const TrapParams& trap,
                                   const SpinPattern& spins);

Eigen::MatrixXd potential_hessian(const IonConfiguration& config, const TrapParams& trap,
                                  const SpinPattern& spins);

enum class MirrorAxis : std::uint8_t { x, y };

/// RMS defect of the best spin-preserving matching between the configuration
/// and its mirror image about the given trap axis. Zero for configurations
/// that look the same after reflection, once ions of equal spin are allowed
/// to swap.
double mirror_defect(const IonConfiguration& config, const SpinPattern& spins, MirrorAxis axis);

/// min over both axes of mirror_defect; the asymmetry measure used by the
/// constrained structure search.
double spin_asymmetry(const IonConfiguration& config, const SpinPattern& spins);

/// Geometric classification with tolerance `tol` on coordinates.
StructureKind classify(const IonConfiguration& config, const SpinPattern& spins,
                       double tol = 1e-6);

struct EquilibriumResult {
    IonConfiguration configuration;
    double energy = 0.0;
    double gradient_norm = 0.0;
    double min_eigenvalue = 0.0; // of the Hessian at the stationary point
    bool stable = false;         // min_eigenvalue > 0
    StructureKind kind = StructureKind::other;
    int iterations = 0;
};

/// Closed-form equilibria of the three-ion crystal.
///
/// Supported combinations (n_ions == 3 only):
///   lin_x     any spin pattern (linear positions are spin independent)
///   zigzag_x  uniform spins or the middle ion excited
///   zigzag_y  uniform spins or the middle ion excited
/// Conventions: ions are ordered along the chain; the transversely displaced
/// outer ions take the positive branch (y > 0 for zigzag_x; x > 0 for
/// zigzag_y, middle ion at negative x). Throws DomainError when the requested
/// shape does not exist at these parameters or the combination has no closed
/// form.
IonConfiguration analytic_equilibrium(StructureKind kind, const TrapParams& trap,
                                      const SpinPattern& spins);

struct FindOptions {
    double tolerance = 1e-12;   // target gradient norm
    int max_iterations = 300;
};

/// Damped-Newton refinement of a stationary point from an initial guess,
/// falling back to regularized (gradient-like) steps when the Newton step
/// does not reduce the gradient. Saddle points are legitimate results and
/// reported with stable=false. Throws NumericalError if the gradient norm
/// cannot be brought below 1e-10.
EquilibriumResult find_equilibrium(const IonConfiguration& initial, const TrapParams& trap,
                                   const SpinPattern& spins, const FindOptions& options = {});

struct MetropolisSchedule {
    int proposals = 5000;            // annealing steps per restart
    double step_sigma = 0.05;        // Gaussian proposal width (units of l)
    double cooling = 0.995;          // geometric temperature factor
    double initial_temperature = 1.0;
    double box_halfwidth = 1.5;      // uniform start window (units of l)
    int restarts = 8;
};

struct SearchConstraint {
    /// Require spin_asymmetry(config) >= tolerance throughout the walk and
    /// for the refined result. This keeps the search out of the mirror
    /// symmetric family and is how the starred structures are found.
    bool require_asymmetric = false;
    double tolerance = 1e-2;
};

struct SearchResult {
    /// Engaged when a stable stationary point satisfying the constraint was
    /// found; empty means the budget was exhausted without one (which is an
    /// answer, not an error).
    std::optional<EquilibriumResult> result;
    int restarts_used = 0;
};

/// Simulated-annealing search for stable crystal structures. Deterministic
/// for a fixed seed: the random stream is generated internally and does not
/// depend on the platform's distribution implementations.
SearchResult metropolis_search(const TrapParams& trap, const SpinPattern& spins,
                               std::uint64_t seed, const MetropolisSchedule& schedule = {},
                               const SearchConstraint& constraint = {});

} // namespace ioncrystal
