#pragma once

#include <optional>
#include <vector>

#include <ioncrystal/gaussian.hpp>

namespace ioncrystal {

/// Ground-state detection probability after the bare Ramsey sequence:
/// P1(t) = (1 + Re I(t)) / 2.
std::vector<double> ramsey_p1(const OverlapSeries& series);

/// Same with a phase gate (|e> -> -i|e>) before the closing pulse:
/// P2(t) = (1 + Im I(t)) / 2. Together with P1 this reconstructs I(t).
std::vector<double> ramsey_p2(const OverlapSeries& series);

enum class SpectralWindow { rectangular, hann };

/// One-sided discrete spectrum of |I(t)|.
struct Spectrum {
    std::vector<double> frequencies; // angular, units of nu_x, ascending from 0
    std::vector<double> magnitudes;  // |DFT| of the windowed modulus, unnormalized
    SpectralWindow window = SpectralWindow::rectangular;
    double bin_width = 0.0;          // angular frequency per bin
};

/// DFT of the modulus of the overlap signal on its uniform time grid; the DC
/// bin is kept. Throws DomainError if the grid is not uniform to 1e-9
/// (relative). Magnitudes are raw |sum(s_j w_j e^(-i w t_j))|; the windowed
/// input satisfies Parseval against the full two-sided transform.
Spectrum spectrum(const OverlapSeries& series,
                  SpectralWindow window = SpectralWindow::rectangular);

/// Times of local maxima of |I(t)| that exceed `threshold`, excluding the
/// grid start. Plateaus count once, at their first sample.
std::vector<double> revival_times(const OverlapSeries& series, double threshold = 0.5);

/// Robust estimate of the repetition period of the revival pattern: local
/// maxima above `floor` are clustered (revivals often carry side peaks), and
/// the median gap between consecutive cluster representatives is returned.
/// Empty when fewer than two clusters exist.
std::optional<double> revival_spacing(const OverlapSeries& series, double floor = 0.05);

} // namespace ioncrystal
