#include "ioncrystal/crystal.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "ioncrystal/errors.hpp"

namespace ioncrystal {

namespace {

/// splitmix64 stream with a Box-Muller normal on top. Used instead of
/// <random> distributions so that a seed reproduces the same walk on every
/// platform and standard library.
class DeterministicRng {
public:
    explicit DeterministicRng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform(); // (0, 1]
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

constexpr double kMinSeparation = 1e-9;

void check_sizes(const IonConfiguration& config, const TrapParams& trap,
                 const SpinPattern& spins) {
    trap.validate();
    if (config.n_ions() != trap.n_ions)
        throw ConfigError("configuration size does not match trap.n_ions");
    if (static_cast<int>(spins.size()) != trap.n_ions)
        throw ConfigError("spin pattern size does not match trap.n_ions");
}

double transverse_stiffness(const TrapParams& trap, Spin spin) {
    const double a = (spin == Spin::excited) ? trap.alpha + trap.delta_alpha : trap.alpha;
    return a * a;
}

bool uniform_pattern(const SpinPattern& spins) {
    return std::all_of(spins.begin(), spins.end(),
                       [&](Spin s) { return s == spins.front(); });
}

Eigen::Vector2d position(const IonConfiguration& c, int j) {
    return {c.x(j), c.y(j)};
}

} // namespace

void TrapParams::validate() const {
    if (n_ions < 2) throw ConfigError("n_ions must be at least 2");
    if (alpha < 1.0) throw ConfigError("alpha must be >= 1 (planar chain regime)");
    if (alpha + delta_alpha <= 0.0)
        throw ConfigError("alpha + delta_alpha must be positive");
}

SpinPattern all_ground(int n_ions) { return SpinPattern(n_ions, Spin::ground); }

SpinPattern all_excited(int n_ions) { return SpinPattern(n_ions, Spin::excited); }

SpinPattern center_excited(int n_ions) {
    if (n_ions % 2 == 0)
        throw ConfigError("center_excited requires an odd number of ions");
    SpinPattern spins(n_ions, Spin::ground);
    spins[n_ions / 2] = Spin::excited;
    return spins;
}

SpinPattern outer_excited(int n_ions) {
    SpinPattern spins(n_ions, Spin::ground);
    spins.back() = Spin::excited;
    return spins;
}

int excited_count(const SpinPattern& spins) {
    return static_cast<int>(std::count(spins.begin(), spins.end(), Spin::excited));
}

IonConfiguration::IonConfiguration(Eigen::VectorXd coords) : coords_(std::move(coords)) {
    if (coords_.size() % 2 != 0)
        throw ConfigError("coordinate vector must have even length (x,y interleaved)");
}

IonConfiguration IonConfiguration::from_xy(const std::vector<double>& x,
                                           const std::vector<double>& y) {
    if (x.size() != y.size()) throw ConfigError("x and y lists differ in length");
    Eigen::VectorXd coords(2 * x.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
        coords[2 * j] = x[j];
        coords[2 * j + 1] = y[j];
    }
    return IonConfiguration(std::move(coords));
}

void IonConfiguration::set(int ion, double x, double y) {
    coords_[2 * ion] = x;
    coords_[2 * ion + 1] = y;
}

double IonConfiguration::min_separation() const {
    const int n = n_ions();
    double best = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j)
        for (int k = j + 1; k < n; ++k)
            best = std::min(best, (position(*this, j) - position(*this, k)).norm());
    return best;
}

std::string to_string(StructureKind kind) {
    switch (kind) {
        case StructureKind::lin_x: return "lin_x";
        case StructureKind::zigzag_x: return "zigzag_x";
        case StructureKind::zigzag_y: return "zigzag_y";
        case StructureKind::lin_x_star: return "lin_x_star";
        case StructureKind::tria_star: return "tria_star";
        case StructureKind::other: return "other";
    }
    return "other";
}

double potential_energy(const IonConfiguration& config, const TrapParams& trap,
                        const SpinPattern& spins) {
    check_sizes(config, trap, spins);
    const int n = config.n_ions();
    double v = 0.0;
    for (int j = 0; j < n; ++j)
        v += 0.5 * (config.x(j) * config.x(j) +
                    transverse_stiffness(trap, spins[j]) * config.y(j) * config.y(j));
    for (int j = 0; j < n; ++j) {
        for (int k = j + 1; k < n; ++k) {
            const double r = (position(config, j) - position(config, k)).norm();
            if (r < kMinSeparation) throw DomainError("coincident ions in configuration");
            v += 1.0 / r;
        }
    }
    return v;
}

Eigen::VectorXd potential_gradient(const IonConfiguration& config, const TrapParams& trap,
                                   const SpinPattern& spins) {
    check_sizes(config, trap, spins);
    const int n = config.n_ions();
    Eigen::VectorXd g(2 * n);
    for (int j = 0; j < n; ++j) {
        g[2 * j] = config.x(j);
        g[2 * j + 1] = transverse_stiffness(trap, spins[j]) * config.y(j);
    }
    for (int j = 0; j < n; ++j) {
        for (int k = j + 1; k < n; ++k) {
            const Eigen::Vector2d d = position(config, j) - position(config, k);
            const double r = d.norm();
            if (r < kMinSeparation) throw DomainError("coincident ions in configuration");
            const Eigen::Vector2d f = d / (r * r * r);
            g.segment<2>(2 * j) -= f;
            g.segment<2>(2 * k) += f;
        }
    }
    return g;
}

Eigen::MatrixXd potential_hessian(const IonConfiguration& config, const TrapParams& trap,
                                  const SpinPattern& spins) {
    check_sizes(config, trap, spins);
    const int n = config.n_ions();
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    for (int j = 0; j < n; ++j) {
        h(2 * j, 2 * j) = 1.0;
        h(2 * j + 1, 2 * j + 1) = transverse_stiffness(trap, spins[j]);
    }
    for (int j = 0; j < n; ++j) {
        for (int k = j + 1; k < n; ++k) {
            const Eigen::Vector2d d = position(config, j) - position(config, k);
            const double r = d.norm();
            if (r < kMinSeparation) throw DomainError("coincident ions in configuration");
            const double r3 = r * r * r;
            const double r5 = r3 * r * r;
            // Evaluate the outer product first so the block is exactly symmetric.
            const Eigen::Matrix2d outer = d * d.transpose();
            const Eigen::Matrix2d block =
                3.0 * outer / r5 - Eigen::Matrix2d::Identity() / r3;
            h.block<2, 2>(2 * j, 2 * j) += block;
            h.block<2, 2>(2 * k, 2 * k) += block;
            h.block<2, 2>(2 * j, 2 * k) -= block;
            h.block<2, 2>(2 * k, 2 * j) -= block;
        }
    }
    return h;
}

double mirror_defect(const IonConfiguration& config, const SpinPattern& spins,
                     MirrorAxis axis) {
    const int n = config.n_ions();
    if (static_cast<int>(spins.size()) != n)
        throw ConfigError("spin pattern size does not match configuration");
    if (n > 8) throw DomainError("mirror_defect uses exhaustive matching (n_ions <= 8)");

    // Fixed-capacity storage: this runs once per Metropolis proposal when the
    // asymmetric search is active, so it must not allocate.
    std::array<Eigen::Vector2d, 8> orig, mirrored;
    for (int j = 0; j < n; ++j) {
        orig[j] = position(config, j);
        mirrored[j] = orig[j];
        if (axis == MirrorAxis::x)
            mirrored[j].y() = -mirrored[j].y();
        else
            mirrored[j].x() = -mirrored[j].x();
    }

    std::array<int, 8> perm{};
    std::iota(perm.begin(), perm.begin() + n, 0);
    double best = std::numeric_limits<double>::infinity();
    do {
        bool spin_ok = true;
        for (int j = 0; j < n; ++j)
            if (spins[j] != spins[perm[j]]) { spin_ok = false; break; }
        if (!spin_ok) continue;
        double sum = 0.0;
        for (int j = 0; j < n; ++j) sum += (orig[j] - mirrored[perm[j]]).squaredNorm();
        best = std::min(best, sum);
    } while (std::next_permutation(perm.begin(), perm.begin() + n));
    return std::sqrt(best / n);
}

double spin_asymmetry(const IonConfiguration& config, const SpinPattern& spins) {
    return std::min(mirror_defect(config, spins, MirrorAxis::x),
                    mirror_defect(config, spins, MirrorAxis::y));
}

StructureKind classify(const IonConfiguration& config, const SpinPattern& spins, double tol) {
    const int n = config.n_ions();
    if (static_cast<int>(spins.size()) != n)
        throw ConfigError("spin pattern size does not match configuration");

    double max_abs_y = 0.0;
    for (int j = 0; j < n; ++j) max_abs_y = std::max(max_abs_y, std::abs(config.y(j)));
    if (max_abs_y < tol) {
        if (excited_count(spins) == 1) {
            int e = 0;
            while (spins[e] != Spin::excited) ++e;
            double min_x = config.x(0), max_x = config.x(0);
            for (int j = 1; j < n; ++j) {
                min_x = std::min(min_x, config.x(j));
                max_x = std::max(max_x, config.x(j));
            }
            const double xe = config.x(e);
            if (std::abs(xe - min_x) < tol || std::abs(xe - max_x) < tol)
                return StructureKind::lin_x_star;
        }
        return StructureKind::lin_x;
    }

    const double defect_about_x = mirror_defect(config, spins, MirrorAxis::x);
    const double defect_about_y = mirror_defect(config, spins, MirrorAxis::y);

    const auto alternates = [&](bool along_x) {
        std::vector<int> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            return along_x ? config.x(a) < config.x(b) : config.y(a) < config.y(b);
        });
        int prev_sign = 0;
        for (int idx : order) {
            const double v = along_x ? config.y(idx) : config.x(idx);
            if (std::abs(v) < tol) return false;
            const int s = v > 0 ? 1 : -1;
            if (s == prev_sign) return false;
            prev_sign = s;
        }
        return true;
    };

    if (defect_about_y < tol && alternates(true)) return StructureKind::zigzag_x;
    if (defect_about_x < tol && alternates(false)) return StructureKind::zigzag_y;
    if (defect_about_x >= tol && defect_about_y >= tol) return StructureKind::tria_star;
    return StructureKind::other;
}

IonConfiguration analytic_equilibrium(StructureKind kind, const TrapParams& trap,
                                      const SpinPattern& spins) {
    trap.validate();
    if (trap.n_ions != 3)
        throw DomainError("closed-form equilibria are available for three ions only");
    if (static_cast<int>(spins.size()) != 3)
        throw ConfigError("spin pattern size does not match trap.n_ions");

    const bool uniform = uniform_pattern(spins);
    const bool middle_excited =
        spins[0] == Spin::ground && spins[1] == Spin::excited && spins[2] == Spin::ground;
    const double alpha_eff =
        (uniform && spins.front() == Spin::excited) ? trap.alpha + trap.delta_alpha : trap.alpha;

    IonConfiguration out;
    switch (kind) {
        case StructureKind::lin_x:
        case StructureKind::lin_x_star: {
            // Linear positions do not depend on the transverse trap at all.
            const double c = std::cbrt(5.0 / 4.0);
            out = IonConfiguration::from_xy({-c, 0.0, c}, {0.0, 0.0, 0.0});
            break;
        }
        case StructureKind::zigzag_x: {
            double ratio; // stiffness ratio of middle to outer transverse trap
            if (uniform)
                ratio = 1.0;
            else if (middle_excited)
                ratio = trap.alpha * trap.alpha /
                        ((trap.alpha + trap.delta_alpha) * (trap.alpha + trap.delta_alpha));
            else
                throw DomainError("zigzag_x closed form needs uniform spins or the middle ion excited");
            const double a2 = alpha_eff * alpha_eff;
            const double shrink = 1.0 - a2 / (1.0 + 2.0 * ratio);
            if (shrink <= 0.0)
                throw DomainError("zigzag_x does not exist at these parameters");
            const double xb = std::pow(4.0 * shrink, -1.0 / 3.0);
            const double rad = std::pow((1.0 + 2.0 * ratio) / a2, 2.0 / 3.0) - xb * xb;
            if (rad <= 0.0)
                throw DomainError("zigzag_x has merged with the linear chain at these parameters");
            const double yb = std::sqrt(rad) / (1.0 + 2.0 * ratio);
            out = IonConfiguration::from_xy({-xb, 0.0, xb}, {yb, -2.0 * ratio * yb, yb});
            break;
        }
        case StructureKind::zigzag_y: {
            if (!uniform && !middle_excited)
                throw DomainError("zigzag_y closed form needs uniform spins or the middle ion excited");
            // The middle ion sits on the x axis, so these positions do not
            // depend on delta_alpha; only their stability does.
            const double a2 = alpha_eff * alpha_eff;
            const double yb = std::pow(4.0 * (a2 - 1.0 / 3.0), -1.0 / 3.0);
            const double rad = std::pow(3.0, 2.0 / 3.0) - yb * yb;
            if (rad <= 0.0)
                throw DomainError("zigzag_y does not exist at these parameters");
            const double xb = std::sqrt(rad) / 3.0;
            out = IonConfiguration::from_xy({xb, -2.0 * xb, xb}, {-yb, 0.0, yb});
            break;
        }
        default:
            throw DomainError("no closed form for structure kind " + to_string(kind));
    }

    const double gn = potential_gradient(out, trap, spins).norm();
    if (gn > 1e-10)
        throw NumericalError("closed-form equilibrium failed its residual check");
    return out;
}

EquilibriumResult find_equilibrium(const IonConfiguration& initial, const TrapParams& trap,
                                   const SpinPattern& spins, const FindOptions& options) {
    check_sizes(initial, trap, spins);

    IonConfiguration current = initial;
    Eigen::VectorXd grad = potential_gradient(current, trap, spins);
    double gnorm = grad.norm();
    double damping = 0.0;
    int iterations = 0;

    for (; iterations < options.max_iterations && gnorm > options.tolerance; ++iterations) {
        const Eigen::MatrixXd hess = potential_hessian(current, trap, spins);
        bool stepped = false;
        double lam = damping;
        for (int attempt = 0; attempt < 60 && !stepped; ++attempt) {
            Eigen::MatrixXd reg = hess;
            if (lam > 0.0) reg.diagonal().array() += lam;
            const Eigen::VectorXd step = reg.partialPivLu().solve(grad);
            if (step.allFinite()) {
                IonConfiguration candidate = current;
                candidate.coords() -= step;
                double gnew = std::numeric_limits<double>::infinity();
                try {
                    gnew = potential_gradient(candidate, trap, spins).norm();
                } catch (const DomainError&) {
                }
                if (gnew < gnorm) {
                    current = std::move(candidate);
                    grad = potential_gradient(current, trap, spins);
                    gnorm = grad.norm();
                    stepped = true;
                    break;
                }
            }
            lam = (lam == 0.0) ? 1e-8 : lam * 10.0;
            if (lam > 1e12) break;
        }
        if (!stepped) break;
        damping = (lam > 1e-8) ? lam / 10.0 : 0.0;
    }

    if (gnorm > 1e-10)
        throw NumericalError("equilibrium refinement stalled (gradient norm " +
                             std::to_string(gnorm) + ")");

    EquilibriumResult result;
    result.configuration = current;
    result.energy = potential_energy(current, trap, spins);
    result.gradient_norm = gnorm;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(potential_hessian(current, trap, spins));
    result.min_eigenvalue = solver.eigenvalues().minCoeff();
    result.stable = result.min_eigenvalue > 0.0;
    result.kind = classify(current, spins);
    result.iterations = iterations;
    return result;
}

SearchResult metropolis_search(const TrapParams& trap, const SpinPattern& spins,
                               std::uint64_t seed, const MetropolisSchedule& schedule,
                               const SearchConstraint& constraint) {
    trap.validate();
    if (static_cast<int>(spins.size()) != trap.n_ions)
        throw ConfigError("spin pattern size does not match trap.n_ions");
    const int n = trap.n_ions;

    DeterministicRng rng(seed ^ 0xD6E8FEB86659FD93ull);
    const auto satisfies = [&](const IonConfiguration& c) {
        return !constraint.require_asymmetric ||
               spin_asymmetry(c, spins) >= constraint.tolerance;
    };

    for (int restart = 0; restart < schedule.restarts; ++restart) {
        IonConfiguration walker;
        bool seeded = false;
        for (int attempt = 0; attempt < 200 && !seeded; ++attempt) {
            Eigen::VectorXd coords(2 * n);
            for (int i = 0; i < 2 * n; ++i)
                coords[i] = schedule.box_halfwidth * (2.0 * rng.uniform() - 1.0);
            IonConfiguration candidate(std::move(coords));
            if (candidate.min_separation() < 1e-3) continue;
            if (!satisfies(candidate)) continue;
            walker = std::move(candidate);
            seeded = true;
        }
        if (!seeded) continue;

        double energy = potential_energy(walker, trap, spins);
        IonConfiguration best = walker;
        double best_energy = energy;
        double temperature = schedule.initial_temperature;

        for (int k = 0; k < schedule.proposals; ++k, temperature *= schedule.cooling) {
            IonConfiguration candidate = walker;
            for (int i = 0; i < 2 * n; ++i)
                candidate.coords()[i] += schedule.step_sigma * rng.normal();
            if (candidate.min_separation() < 1e-6) continue;
            if (!satisfies(candidate)) continue;
            const double cand_energy = potential_energy(candidate, trap, spins);
            const double delta = cand_energy - energy;
            if (delta < 0.0 || rng.uniform() < std::exp(-delta / temperature)) {
                walker = std::move(candidate);
                energy = cand_energy;
                if (energy < best_energy) {
                    best = walker;
                    best_energy = energy;
                }
            }
        }

        try {
            EquilibriumResult refined = find_equilibrium(best, trap, spins);
            if (refined.min_eigenvalue > 1e-9 && satisfies(refined.configuration))
                return SearchResult{std::move(refined), restart + 1};
        } catch (const NumericalError&) {
        } catch (const DomainError&) {
        }
    }
    return SearchResult{std::nullopt, schedule.restarts};
}

} // namespace ioncrystal
