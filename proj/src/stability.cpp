#include <ioncrystal/stability.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>

#include <Eigen/Dense>

#include <ioncrystal/errors.hpp>
#include <ioncrystal/threading.hpp>

namespace ioncrystal {

namespace {

double min_hessian_eigenvalue(const IonConfiguration& config, const TrapParams& trap,
                              const SpinPattern& spins) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(potential_hessian(config, trap, spins));
    return solver.eigenvalues().minCoeff();
}

std::uint64_t mix_seed(std::uint64_t base, std::uint64_t index) {
    // splitmix64 step keyed by the cell index, so every cell gets an
    // independent stream no matter how the grid is chunked over threads.
    std::uint64_t z = base + 0x9E3779B97F4A7C15ull * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

struct SectorCandidates {
    std::array<StructureKind, 3> kinds{};
    int count = 0;
    bool needs_search = false; // tria_star present
};

SectorCandidates candidates_for(ScanSector sector) {
    SectorCandidates c;
    switch (sector) {
        case ScanSector::homogeneous:
        case ScanSector::center_excited:
            c.kinds = {StructureKind::lin_x, StructureKind::zigzag_x, StructureKind::zigzag_y};
            c.count = 3;
            break;
        case ScanSector::outer_excited:
            c.kinds = {StructureKind::lin_x_star, StructureKind::tria_star, StructureKind::other};
            c.count = 2;
            c.needs_search = true;
            break;
    }
    return c;
}

} // namespace

double homogeneous_critical_alpha() { return std::sqrt(12.0 / 5.0); }

double homogeneous_critical_alpha_numeric(double tolerance) {
    const SpinPattern spins = all_ground(3);
    auto linear_stable = [&](double alpha) {
        TrapParams trap{3, alpha, 0.0};
        const IonConfiguration chain = analytic_equilibrium(StructureKind::lin_x, trap, spins);
        return min_hessian_eigenvalue(chain, trap, spins) > 0.0;
    };
    double lo = 1.2, hi = 1.9; // soft mode positive at hi, negative at lo
    if (linear_stable(lo) || !linear_stable(hi))
        throw NumericalError("critical-point bracket does not straddle the instability");
    while (hi - lo > tolerance) {
        const double mid = 0.5 * (lo + hi);
        (linear_stable(mid) ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

double delta_alpha_critical(double alpha) {
    // Extended precision: the subtraction cancels near the homogeneous
    // transition and the result feeds tight zero checks downstream.
    const long double a = alpha;
    const long double denom = 5.0L * a * a - 4.0L;
    if (denom <= 0.0L)
        throw DomainError("delta_alpha_critical requires 5 alpha^2 > 4");
    return static_cast<double>((2.0L * sqrtl(2.0L / denom) - 1.0L) * a);
}

double zzy_boundary_residual(double alpha, double delta_alpha) {
    if (alpha + delta_alpha <= 0.0)
        throw DomainError("excited-state transverse confinement must stay positive");
    const double a2 = alpha * alpha;
    const double yb = std::pow(4.0 * (a2 - 1.0 / 3.0), -1.0 / 3.0);
    const double rad = std::pow(3.0, 2.0 / 3.0) - yb * yb;
    if (a2 <= 1.0 / 3.0 || rad <= 0.0)
        throw DomainError("zigzag_y equilibrium does not exist at this alpha");
    const double xb = std::sqrt(rad) / 3.0;
    const double cap_d2 = std::pow(3.0, 2.0 / 3.0); // D^2 with D = 9 xb^2 + yb^2 = 3^(1/3)
    const double ratio = a2 / ((alpha + delta_alpha) * (alpha + delta_alpha));

    const double y_over_d2 = yb * yb / cap_d2;
    const double coupling = 9.0 * xb * xb * yb * yb / (cap_d2 * cap_d2 * (2.0 - a2 - y_over_d2));
    const double rhs = -y_over_d2 + 1.0 / 3.0 + coupling;
    return a2 / (2.0 * ratio + 1.0) - rhs;
}

double outer_excited_linear_boundary_residual(double alpha, double delta_alpha) {
    if (alpha + delta_alpha <= 0.0)
        throw DomainError("excited-state transverse confinement must stay positive");
    const double a2 = alpha * alpha;
    const double denom = 5.0 * a2 * a2 - 12.5 * a2 + 4.0;
    if (std::abs(denom) < 1e-12)
        throw DomainError("outer-excited boundary expression has a pole at this alpha");
    const double ratio = a2 / ((alpha + delta_alpha) * (alpha + delta_alpha));
    const double rhs = 9.0 / 20.0 + ((65.0 / 8.0) * a2 - 9.0) / (5.0 * denom);
    return a2 / (2.0 * ratio) - rhs;
}

std::pair<double, double> outer_excited_boundary_poles() {
    // roots of 5 a^4 - 12.5 a^2 + 4 in a^2
    const double disc = std::sqrt(12.5 * 12.5 - 4.0 * 5.0 * 4.0);
    const double lo2 = (12.5 - disc) / 10.0;
    const double hi2 = (12.5 + disc) / 10.0;
    return {std::sqrt(lo2), std::sqrt(hi2)};
}

ScanSector sector_for(const SpinPattern& spins) {
    const int n = static_cast<int>(spins.size());
    const int excited = excited_count(spins);
    if (excited == 0 || excited == n)
        return ScanSector::homogeneous;
    if (n % 2 == 1 && excited == 1 && spins[n / 2] == Spin::excited)
        return ScanSector::center_excited;
    if (excited == 1 && (spins.front() == Spin::excited || spins.back() == Spin::excited))
        return ScanSector::outer_excited;
    throw ConfigError("stability scans support uniform, center-excited, or outer-excited spins");
}

std::uint8_t kind_bit(StructureKind kind) {
    return static_cast<std::uint8_t>(1u << static_cast<unsigned>(kind));
}

bool kind_stable(StructureKind kind, const TrapParams& trap, const SpinPattern& spins,
                 double stability_floor, const IonConfiguration* continuation_seed) {
    if (kind == StructureKind::tria_star) {
        if (continuation_seed == nullptr)
            throw ConfigError("tria_star stability needs a continuation seed configuration");
        try {
            EquilibriumResult refined = find_equilibrium(*continuation_seed, trap, spins);
            return refined.kind == StructureKind::tria_star &&
                   refined.min_eigenvalue > stability_floor;
        } catch (const NumericalError&) {
            return false;
        } catch (const DomainError&) {
            return false;
        }
    }
    try {
        const IonConfiguration config = analytic_equilibrium(kind, trap, spins);
        return min_hessian_eigenvalue(config, trap, spins) > stability_floor;
    } catch (const DomainError&) {
        return false; // shape does not exist here
    } catch (const NumericalError&) {
        return false;
    }
}

namespace {

/// Stable-set mask over the closed-form candidates of the sector. The
/// stochastically searched tria_star is handled separately by the caller.
std::uint8_t closed_form_mask(const SpinPattern& spins, const SectorCandidates& cand,
                              double alpha, double dalpha, double stability_floor) {
    std::uint8_t mask = 0;
    if (alpha + dalpha <= 0.0)
        return mask; // excited sector unconfined: nothing can be stable
    TrapParams trap{static_cast<int>(spins.size()), alpha, dalpha};
    for (int k = 0; k < cand.count; ++k) {
        const StructureKind kind = cand.kinds[static_cast<std::size_t>(k)];
        if (kind == StructureKind::tria_star) continue;
        if (kind_stable(kind, trap, spins, stability_floor)) mask |= kind_bit(kind);
    }
    return mask;
}

// Locate the parameter where `stable` flips between two points, both spin
// patterns equal. For tria_star the predicate follows the converged branch
// from the stable side (simple continuation); closed-form kinds re-evaluate
// the formula at each midpoint.
std::pair<double, double> bisect_edge(StructureKind kind, const SpinPattern& spins,
                                      double a_stable, double d_stable, double a_lost,
                                      double d_lost, const ScanOptions& options,
                                      IonConfiguration triangle_seed) {
    double sa = a_stable, sd = d_stable, la = a_lost, ld = d_lost;
    for (int step = 0; step < options.bisection_steps; ++step) {
        const double ma = 0.5 * (sa + la);
        const double md = 0.5 * (sd + ld);
        TrapParams trap{static_cast<int>(spins.size()), ma, md};
        bool stable = false;
        if (ma + md > 0.0) {
            if (kind == StructureKind::tria_star) {
                try {
                    EquilibriumResult refined = find_equilibrium(triangle_seed, trap, spins);
                    stable = refined.kind == StructureKind::tria_star &&
                             refined.min_eigenvalue > options.stability_floor;
                    if (stable)
                        triangle_seed = refined.configuration;
                } catch (const NumericalError&) {
                } catch (const DomainError&) {
                }
            } else {
                stable = kind_stable(kind, trap, spins, options.stability_floor);
            }
        }
        if (stable) {
            sa = ma;
            sd = md;
        } else {
            la = ma;
            ld = md;
        }
    }
    return {0.5 * (sa + la), 0.5 * (sd + ld)};
}

} // namespace

StabilityDiagram scan_diagram(const SpinPattern& spins, ScanRange alpha_range,
                              ScanRange dalpha_range, const ScanOptions& options) {
    if (alpha_range.cells <= 0 || dalpha_range.cells <= 0)
        throw ConfigError("scan resolution must be positive");
    if (!(alpha_range.lo < alpha_range.hi) || !(dalpha_range.lo < dalpha_range.hi))
        throw ConfigError("scan ranges must be nonempty intervals");

    StabilityDiagram diagram;
    diagram.sector = sector_for(spins);
    diagram.alpha = alpha_range;
    diagram.delta_alpha = dalpha_range;

    const SectorCandidates cand = candidates_for(diagram.sector);
    const int n_ions = static_cast<int>(spins.size());
    const std::size_t n_alpha = static_cast<std::size_t>(alpha_range.cells);
    const std::size_t n_cells = n_alpha * static_cast<std::size_t>(dalpha_range.cells);
    diagram.cells.assign(n_cells, 0);

    std::vector<std::array<double, 6>> triangles;
    std::vector<std::uint8_t> has_triangle;
    if (cand.needs_search) {
        triangles.assign(n_cells, {});
        has_triangle.assign(n_cells, 0);
    }

    parallel_for(n_cells, options.threads, [&](std::size_t idx) {
        const int i = static_cast<int>(idx % n_alpha);
        const int j = static_cast<int>(idx / n_alpha);
        diagram.cells[idx] = closed_form_mask(spins, cand, alpha_range.center(i),
                                              dalpha_range.center(j), options.stability_floor);
    });

    auto triangle_at = [&](std::size_t idx) {
        Eigen::VectorXd c(6);
        for (int d = 0; d < 6; ++d)
            c[d] = triangles[idx][static_cast<std::size_t>(d)];
        return IonConfiguration(c);
    };

    if (cand.needs_search) {
        // The stochastic search is far too expensive to run per cell, so only
        // a coarse subgrid is probed. Continuation then grows the region cell
        // by cell: refining a neighbour's converged triangle either lands on
        // the branch or proves it gone, which is both cheap and seed free, so
        // the filled region is reproducible across seeds and thread counts.
        SearchConstraint constraint;
        constraint.require_asymmetric = true;

        const auto store = [&](std::size_t idx, const EquilibriumResult& r) {
            const auto& c = r.configuration.coords();
            for (int d = 0; d < 6; ++d) triangles[idx][static_cast<std::size_t>(d)] = c[d];
            has_triangle[idx] = 1;
        };
        const auto accepts = [&](const EquilibriumResult& r) {
            return r.kind == StructureKind::tria_star &&
                   r.min_eigenvalue > options.stability_floor &&
                   spin_asymmetry(r.configuration, spins) >= constraint.tolerance;
        };

        const int stride_i = std::max(1, alpha_range.cells / 16);
        const int stride_j = std::max(1, dalpha_range.cells / 16);
        std::vector<std::size_t> probes;
        for (int j = stride_j / 2; j < dalpha_range.cells; j += stride_j)
            for (int i = stride_i / 2; i < alpha_range.cells; i += stride_i)
                probes.push_back(static_cast<std::size_t>(j) * n_alpha +
                                 static_cast<std::size_t>(i));

        parallel_for(probes.size(), options.threads, [&](std::size_t p) {
            const std::size_t idx = probes[p];
            const int i = static_cast<int>(idx % n_alpha);
            const int j = static_cast<int>(idx / n_alpha);
            const double alpha = alpha_range.center(i);
            const double dalpha = dalpha_range.center(j);
            if (alpha + dalpha <= 0.0) return;
            const SearchResult found =
                metropolis_search(TrapParams{n_ions, alpha, dalpha}, spins,
                                  mix_seed(options.seed, idx), options.schedule, constraint);
            if (found.result && accepts(*found.result)) store(idx, *found.result);
        });

        std::vector<std::size_t> queue;
        for (std::size_t idx = 0; idx < n_cells; ++idx)
            if (has_triangle[idx]) queue.push_back(idx);
        for (std::size_t head = 0; head < queue.size(); ++head) {
            const std::size_t idx = queue[head];
            const int i = static_cast<int>(idx % n_alpha);
            const int j = static_cast<int>(idx / n_alpha);
            const std::array<std::pair<int, int>, 4> steps{
                {{i - 1, j}, {i + 1, j}, {i, j - 1}, {i, j + 1}}};
            for (const auto& [ni, nj] : steps) {
                if (ni < 0 || ni >= alpha_range.cells || nj < 0 || nj >= dalpha_range.cells)
                    continue;
                const std::size_t nb = static_cast<std::size_t>(nj) * n_alpha +
                                       static_cast<std::size_t>(ni);
                if (has_triangle[nb]) continue;
                const double alpha = alpha_range.center(ni);
                const double dalpha = dalpha_range.center(nj);
                if (alpha + dalpha <= 0.0) continue;
                try {
                    const EquilibriumResult refined = find_equilibrium(
                        triangle_at(idx), TrapParams{n_ions, alpha, dalpha}, spins);
                    if (accepts(refined)) {
                        store(nb, refined);
                        queue.push_back(nb);
                    }
                } catch (const NumericalError&) {
                } catch (const DomainError&) {
                }
            }
        }
        for (std::size_t idx = 0; idx < n_cells; ++idx)
            if (has_triangle[idx]) diagram.cells[idx] |= kind_bit(StructureKind::tria_star);
    }

    if (!options.extract_boundaries)
        return diagram;

    for (int k = 0; k < cand.count; ++k) {
        const StructureKind kind = cand.kinds[static_cast<std::size_t>(k)];
        const std::uint8_t bit = kind_bit(kind);
        BoundarySegment segment;
        segment.kind = kind;
        for (int j = 0; j < dalpha_range.cells; ++j) {
            for (int i = 0; i < alpha_range.cells; ++i) {
                const std::size_t idx = static_cast<std::size_t>(j) * n_alpha + i;
                const bool here = diagram.cells[idx] & bit;
                // right neighbour
                if (i + 1 < alpha_range.cells) {
                    const std::size_t right = idx + 1;
                    if (here != bool(diagram.cells[right] & bit)) {
                        const std::size_t stable_idx = here ? idx : right;
                        const double as = alpha_range.center(here ? i : i + 1);
                        const double al = alpha_range.center(here ? i + 1 : i);
                        const double d = dalpha_range.center(j);
                        if (kind != StructureKind::tria_star || has_triangle[stable_idx])
                            segment.points.push_back(bisect_edge(
                                kind, spins, as, d, al, d, options,
                                cand.needs_search && has_triangle[stable_idx]
                                    ? triangle_at(stable_idx)
                                    : IonConfiguration()));
                    }
                }
                // upper neighbour
                if (j + 1 < dalpha_range.cells) {
                    const std::size_t up = idx + n_alpha;
                    if (here != bool(diagram.cells[up] & bit)) {
                        const std::size_t stable_idx = here ? idx : up;
                        const double a = alpha_range.center(i);
                        const double ds = dalpha_range.center(here ? j : j + 1);
                        const double dl = dalpha_range.center(here ? j + 1 : j);
                        if (kind != StructureKind::tria_star || has_triangle[stable_idx])
                            segment.points.push_back(bisect_edge(
                                kind, spins, a, ds, a, dl, options,
                                cand.needs_search && has_triangle[stable_idx]
                                    ? triangle_at(stable_idx)
                                    : IonConfiguration()));
                    }
                }
            }
        }
        if (!segment.points.empty()) {
            std::sort(segment.points.begin(), segment.points.end());
            diagram.boundaries.push_back(std::move(segment));
        }
    }
    return diagram;
}

namespace {

// All delta_alpha roots of `residual(alpha, d)` for d inside the window,
// found by sign change on a coarse grid plus bisection. Evaluation failures
// (nonexistent equilibria, poles) simply yield no root there.
template <typename F>
std::vector<double> residual_roots(const F& residual, double alpha, double lo, double hi) {
    constexpr int kCoarse = 96;
    std::vector<double> roots;
    double prev_d = lo;
    double prev_v = 0.0;
    bool have_prev = false;
    for (int k = 0; k <= kCoarse; ++k) {
        const double d = lo + (hi - lo) * k / kCoarse;
        double v;
        try {
            v = residual(alpha, d);
        } catch (const DomainError&) {
            have_prev = false;
            continue;
        }
        if (!std::isfinite(v)) {
            have_prev = false;
            continue;
        }
        if (have_prev && prev_v * v < 0.0) {
            double a = prev_d, b = d, fa = prev_v;
            for (int it = 0; it < 60; ++it) {
                const double m = 0.5 * (a + b);
                double fm;
                try {
                    fm = residual(alpha, m);
                } catch (const DomainError&) {
                    break;
                }
                if (fa * fm <= 0.0)
                    b = m;
                else {
                    a = m;
                    fa = fm;
                }
            }
            roots.push_back(0.5 * (a + b));
        }
        prev_d = d;
        prev_v = v;
        have_prev = true;
    }
    return roots;
}

} // namespace

namespace {

/// A residual zero is a boundary point only if the structure's stability
/// actually flips across it; zero crossings of modes that are not the lowest
/// one are discarded.
bool stability_flips_at(StructureKind kind, const SpinPattern& spins, double alpha,
                        double root, double step) {
    const auto stable = [&](double d) {
        if (alpha + d <= 0.0) return false;
        return kind_stable(kind, TrapParams{static_cast<int>(spins.size()), alpha, d}, spins);
    };
    return stable(root + step) != stable(root - step);
}

} // namespace

std::vector<AnalyticCurve> analytic_boundary_curves(ScanSector sector, ScanRange alpha_range,
                                                    ScanRange dalpha_range, int samples) {
    std::vector<AnalyticCurve> curves;
    const auto in_window = [&](double d) {
        return d >= dalpha_range.lo && d <= dalpha_range.hi;
    };
    const double flip_step = 1e-3 * (dalpha_range.hi - dalpha_range.lo);

    if (sector == ScanSector::homogeneous) {
        const double alpha_c = homogeneous_critical_alpha();
        if (alpha_c >= alpha_range.lo && alpha_c <= alpha_range.hi) {
            AnalyticCurve line{"linear/zigzag critical alpha", {}};
            for (int k = 0; k <= samples; ++k)
                line.points.emplace_back(
                    alpha_c, dalpha_range.lo + (dalpha_range.hi - dalpha_range.lo) * k / samples);
            curves.push_back(std::move(line));
        }
        return curves;
    }

    if (sector == ScanSector::center_excited) {
        const SpinPattern spins = center_excited(3);
        AnalyticCurve linear{"center-excited linear boundary", {}};
        AnalyticCurve zigzag_y{"zigzag-Y boundary", {}};
        for (int k = 0; k <= samples; ++k) {
            const double alpha = alpha_range.lo + (alpha_range.hi - alpha_range.lo) * k / samples;
            try {
                const double d = delta_alpha_critical(alpha);
                if (in_window(d))
                    linear.points.emplace_back(alpha, d);
            } catch (const DomainError&) {
            }
            for (double root : residual_roots(zzy_boundary_residual, alpha, dalpha_range.lo,
                                              dalpha_range.hi))
                if (stability_flips_at(StructureKind::zigzag_y, spins, alpha, root, flip_step))
                    zigzag_y.points.emplace_back(alpha, root);
        }
        if (!linear.points.empty())
            curves.push_back(std::move(linear));
        if (!zigzag_y.points.empty())
            curves.push_back(std::move(zigzag_y));
        return curves;
    }

    const SpinPattern spins = outer_excited(3);
    AnalyticCurve outer{"outer-excited linear boundary", {}};
    const auto [pole_lo, pole_hi] = outer_excited_boundary_poles();
    for (int k = 0; k <= samples; ++k) {
        const double alpha = alpha_range.lo + (alpha_range.hi - alpha_range.lo) * k / samples;
        if (std::abs(alpha - pole_lo) < 1e-6 || std::abs(alpha - pole_hi) < 1e-6)
            continue;
        for (double root : residual_roots(outer_excited_linear_boundary_residual, alpha,
                                          dalpha_range.lo, dalpha_range.hi))
            if (stability_flips_at(StructureKind::lin_x_star, spins, alpha, root, flip_step))
                outer.points.emplace_back(alpha, root);
    }
    if (!outer.points.empty())
        curves.push_back(std::move(outer));
    return curves;
}

} // namespace ioncrystal
