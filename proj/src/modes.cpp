#include "ioncrystal/modes.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "ioncrystal/errors.hpp"

namespace ioncrystal {

namespace {

double signed_sqrt(double v) { return v >= 0.0 ? std::sqrt(v) : -std::sqrt(-v); }

/// Makes the entry of largest magnitude positive (first such entry on ties
/// within 10*eps), so eigenvector signs are reproducible.
void fix_sign(Eigen::Ref<Eigen::VectorXd> v) {
    int lead = 0;
    double best = 0.0;
    for (int i = 0; i < v.size(); ++i) {
        if (std::abs(v[i]) > best * (1.0 + 1e-12)) {
            best = std::abs(v[i]);
            lead = i;
        }
    }
    if (v[lead] < 0.0) v = -v;
}

/// Replaces the eigenvector columns of a (near) degenerate cluster by a
/// deterministic orthonormal basis of the same subspace: coordinate axes are
/// ranked by their projection onto the subspace and Gram-Schmidt is applied
/// in that order.
void canonicalize_cluster(Eigen::Ref<Eigen::MatrixXd> cluster) {
    const int dim = static_cast<int>(cluster.rows());
    const int m = static_cast<int>(cluster.cols());
    if (m < 2) return;

    const Eigen::MatrixXd projector = cluster * cluster.transpose();
    std::vector<int> axes(dim);
    for (int i = 0; i < dim; ++i) axes[i] = i;
    std::sort(axes.begin(), axes.end(), [&](int a, int b) {
        const double pa = projector.col(a).squaredNorm();
        const double pb = projector.col(b).squaredNorm();
        if (pa != pb) return pa > pb;
        return a < b;
    });

    Eigen::MatrixXd basis(dim, m);
    int built = 0;
    for (int axis : axes) {
        if (built == m) break;
        Eigen::VectorXd v = projector.col(axis);
        for (int k = 0; k < built; ++k) v -= basis.col(k).dot(v) * basis.col(k);
        const double norm = v.norm();
        if (norm < 1e-8) continue;
        basis.col(built++) = v / norm;
    }
    if (built < m) return; // pathological subspace; keep the solver's basis
    for (int k = 0; k < m; ++k) fix_sign(basis.col(k));
    cluster = basis;
}

} // namespace

NormalModes normal_modes(const IonConfiguration& config, const TrapParams& trap,
                         const SpinPattern& spins, double gradient_tolerance) {
    const double gnorm = potential_gradient(config, trap, spins).norm();
    if (gnorm > gradient_tolerance)
        throw DomainError("normal_modes requires a stationary configuration (gradient norm " +
                          std::to_string(gnorm) + ")");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
        potential_hessian(config, trap, spins));
    if (solver.info() != Eigen::Success)
        throw NumericalError("Hessian eigendecomposition failed");

    NormalModes modes;
    modes.eigenvalues = solver.eigenvalues(); // ascending
    modes.vectors = solver.eigenvectors();

    const int n = static_cast<int>(modes.eigenvalues.size());
    const double scale = std::max(1.0, modes.eigenvalues.cwiseAbs().maxCoeff());
    int start = 0;
    while (start < n) {
        int end = start + 1;
        while (end < n &&
               modes.eigenvalues[end] - modes.eigenvalues[end - 1] < 1e-8 * scale)
            ++end;
        canonicalize_cluster(modes.vectors.middleCols(start, end - start));
        start = end;
    }
    for (int k = 0; k < n; ++k) fix_sign(modes.vectors.col(k));

    modes.frequencies.resize(n);
    for (int k = 0; k < n; ++k) modes.frequencies[k] = signed_sqrt(modes.eigenvalues[k]);
    modes.stable = modes.eigenvalues.minCoeff() > 0.0;
    return modes;
}

Eigen::VectorXd linear_center_excited_frequencies(double alpha, double delta_alpha) {
    if (alpha < 1.0) throw DomainError("alpha must be >= 1");
    if (alpha + delta_alpha <= 0.0)
        throw DomainError("alpha + delta_alpha must be positive");

    // The coupled pair is evaluated in extended precision: the lower root
    // passes through zero at the critical detuning and plain doubles leave
    // O(eps) residue there, which the square root inflates past 1e-8.
    const long double a = alpha;
    const long double d = delta_alpha;
    const long double a2 = a * a;
    const long double mix = 5.0L * d * (2.0L * a + d) - 4.0L;
    const long double rho = sqrtl(128.0L + mix * mix);
    const long double base = a2 + a * d;
    const long double da2 = d * d;

    Eigen::VectorXd lambdas(6);
    lambdas << 1.0, 3.0, 29.0 / 5.0, alpha * alpha - 1.0,
        static_cast<double>(base - (12.0L - 5.0L * da2 - rho) / 10.0L),
        static_cast<double>(base - (12.0L - 5.0L * da2 + rho) / 10.0L);
    std::sort(lambdas.data(), lambdas.data() + lambdas.size());

    Eigen::VectorXd freqs(6);
    for (int k = 0; k < 6; ++k) freqs[k] = signed_sqrt(lambdas[k]);
    return freqs;
}

} // namespace ioncrystal
