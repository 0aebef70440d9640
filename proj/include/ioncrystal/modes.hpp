#pragma once

#include <Eigen/Dense>

#include "ioncrystal/crystal.hpp"

namespace ioncrystal {

/// Small-oscillation normal modes about a stationary configuration.
///
/// Eigenvalues are squared frequencies in units of nu_x^2, sorted ascending;
/// frequencies[k] = sign(eigenvalue) * sqrt(|eigenvalue|), so an unstable
/// direction shows up as a negative entry. Vectors are the corresponding
/// orthonormal columns in the interleaved (x0, y0, x1, y1, ...) coordinates.
struct NormalModes {
    Eigen::VectorXd eigenvalues;
    Eigen::VectorXd frequencies;
    Eigen::MatrixXd vectors;
    bool stable = false;
};

/// Diagonalizes the Hessian at `config`. Precondition: the configuration is
/// stationary (gradient norm below `gradient_tolerance`), otherwise a
/// DomainError is thrown. Degenerate clusters (relative eigenvalue gap below
/// 1e-8) are re-orthonormalized along a deterministic coordinate-axis
/// priority, and every vector's sign is fixed, so results do not depend on
/// backend details.
NormalModes normal_modes(const IonConfiguration& config, const TrapParams& trap,
                         const SpinPattern& spins, double gradient_tolerance = 1e-8);

/// The six mode frequencies of the three-ion linear chain whose middle ion is
/// excited, in closed form (same sign convention as NormalModes::frequencies,
/// ascending). For delta_alpha = 0 this reduces to the homogeneous chain
/// spectrum {1, sqrt(3), sqrt(29/5)} + {sqrt(alpha^2-12/5), sqrt(alpha^2-1),
/// alpha}.
Eigen::VectorXd linear_center_excited_frequencies(double alpha, double delta_alpha);

} // namespace ioncrystal
