#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <ioncrystal/crystal.hpp>

namespace ioncrystal {

/// Aspect ratio at which the homogeneous three-ion linear chain loses
/// stability against the zigzag mode: sqrt(12/5).
double homogeneous_critical_alpha();

/// Same boundary located numerically by bisecting the sign of the soft
/// transverse eigenvalue of the linear chain. Converges to `tolerance`
/// in alpha; used as a cross-check of the closed form.
double homogeneous_critical_alpha_numeric(double tolerance = 1e-10);

/// Critical detuning below which the center-excited linear chain turns
/// unstable: the chain is stable for delta_alpha > delta_alpha_critical(alpha).
/// Requires alpha >= 1.
double delta_alpha_critical(double alpha);

/// Residual of the implicit equation for the stability boundary of the
/// zigzag-Y structure with the center ion excited. Positive inside the
/// stable region, negative outside; the root locus is the boundary curve.
/// Throws DomainError where the zigzag-Y equilibrium does not exist.
double zzy_boundary_residual(double alpha, double delta_alpha);

/// Residual of the closed-form stability condition for the linear chain
/// with one outer ion excited. Same sign convention: positive = stable.
/// The expression has poles in alpha (vanishing denominator); evaluating
/// at a pole throws DomainError. Both pole locations are exposed below.
double outer_excited_linear_boundary_residual(double alpha, double delta_alpha);

/// The two positive alpha values where the denominator of the outer-excited
/// residual vanishes, ascending. The boundary curve must be split there.
std::pair<double, double> outer_excited_boundary_poles();

/// Which spin sector a stability scan explores. The candidate structures
/// differ: the center-excited sector has closed forms for all three kinds,
/// the outer-excited sector needs a stochastic search for the asymmetric
/// triangle.
enum class ScanSector { homogeneous, center_excited, outer_excited };

ScanSector sector_for(const SpinPattern& spins);

struct ScanRange {
    double lo = 1.0;
    double hi = 2.0;
    int cells = 200;

    double cell_width() const { return (hi - lo) / cells; }
    double center(int i) const { return lo + (i + 0.5) * cell_width(); }
};

/// Bit assigned to each StructureKind in a cell's stable-set mask.
std::uint8_t kind_bit(StructureKind kind);

struct BoundarySegment {
    StructureKind kind;                           // whose stability flips here
    std::vector<std::pair<double, double>> points; // (alpha, delta_alpha)
};

struct StabilityDiagram {
    ScanSector sector = ScanSector::center_excited;
    ScanRange alpha;
    ScanRange delta_alpha;
    std::vector<std::uint8_t> cells;  // row-major: j * alpha.cells + i
    std::vector<BoundarySegment> boundaries;

    std::uint8_t mask_at(int i, int j) const { return cells[static_cast<std::size_t>(j) * alpha.cells + i]; }
    bool kind_stable_at(int i, int j, StructureKind kind) const { return mask_at(i, j) & kind_bit(kind); }
};

struct ScanOptions {
    int threads = 0;               // 0 = hardware concurrency
    std::uint64_t seed = 20260823; // base seed for the per-cell triangle search
    bool extract_boundaries = true;
    int bisection_steps = 30;
    double stability_floor = 1e-9; // min Hessian eigenvalue counted as stable
    MetropolisSchedule schedule;   // outer-excited sector only
};

/// Scan the (alpha, delta_alpha) window: for every cell, determine the set
/// of structures that are verified stable (equilibrium refined to gradient
/// norm 1e-10, all Hessian eigenvalues above the floor). Cells are
/// independent work items; the output is deterministic for a fixed seed
/// regardless of thread count.
StabilityDiagram scan_diagram(const SpinPattern& spins, ScanRange alpha_range,
                              ScanRange dalpha_range, const ScanOptions& options = {});

/// Stability predicate for a single structure at a single point, using the
/// closed-form equilibrium where one exists. For TriaStar a previously
/// converged neighbouring configuration must be supplied as the refinement
/// seed (branch continuation); the stochastic search is not rerun here.
bool kind_stable(StructureKind kind, const TrapParams& trap, const SpinPattern& spins,
                 double stability_floor = 1e-9,
                 const IonConfiguration* continuation_seed = nullptr);

struct AnalyticCurve {
    std::string label;
    std::vector<std::pair<double, double>> points; // (alpha, delta_alpha)
};

/// Samples the sector's closed-form boundary curves inside the window, for
/// overlaying on scan output. Implicit equations are solved per alpha sample
/// by sign-change bisection in delta_alpha; alphas where a curve has no root
/// in the window (or sits at a pole) contribute no point.
std::vector<AnalyticCurve> analytic_boundary_curves(ScanSector sector, ScanRange alpha_range,
                                                    ScanRange dalpha_range, int samples = 400);

}  // namespace ioncrystal
