#include <ioncrystal/ramsey.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>

#include <unsupported/Eigen/FFT>

#include <ioncrystal/errors.hpp>

namespace ioncrystal {

namespace {

constexpr double kTwoPi = 6.28318530717958647692;

double uniform_step(const std::vector<double>& times) {
    if (times.size() < 2)
        throw DomainError("spectrum needs at least two samples");
    const double dt = times[1] - times[0];
    if (dt <= 0.0)
        throw DomainError("spectrum needs an increasing time grid");
    for (std::size_t i = 1; i + 1 < times.size(); ++i)
        if (std::abs(times[i + 1] - times[i] - dt) > 1e-9 * dt)
            throw DomainError("spectrum requires a uniform time grid");
    return dt;
}

struct Peak {
    double t = 0.0;
    double height = 0.0;
};

std::vector<Peak> local_maxima(const OverlapSeries& series, double floor) {
    std::vector<Peak> peaks;
    const auto& v = series.values;
    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
        const double h = std::abs(v[i]);
        if (h > floor && h > std::abs(v[i - 1]) && h >= std::abs(v[i + 1]))
            peaks.push_back({series.times[i], h});
    }
    return peaks;
}

} // namespace

std::vector<double> ramsey_p1(const OverlapSeries& series) {
    std::vector<double> p;
    p.reserve(series.values.size());
    for (const auto& value : series.values)
        p.push_back(0.5 * (1.0 + value.real()));
    return p;
}

std::vector<double> ramsey_p2(const OverlapSeries& series) {
    std::vector<double> p;
    p.reserve(series.values.size());
    for (const auto& value : series.values)
        p.push_back(0.5 * (1.0 + value.imag()));
    return p;
}

Spectrum spectrum(const OverlapSeries& series, SpectralWindow window) {
    const double dt = uniform_step(series.times);
    const std::size_t n = series.values.size();

    std::vector<double> signal(n);
    for (std::size_t j = 0; j < n; ++j) {
        double w = 1.0;
        if (window == SpectralWindow::hann)
            w = 0.5 * (1.0 - std::cos(kTwoPi * static_cast<double>(j) /
                                      static_cast<double>(n - 1)));
        signal[j] = std::abs(series.values[j]) * w;
    }

    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> transform;
    fft.fwd(transform, signal);

    Spectrum out;
    out.window = window;
    out.bin_width = kTwoPi / (static_cast<double>(n) * dt);
    const std::size_t kept = n / 2 + 1;
    out.frequencies.resize(kept);
    out.magnitudes.resize(kept);
    for (std::size_t k = 0; k < kept; ++k) {
        out.frequencies[k] = out.bin_width * static_cast<double>(k);
        out.magnitudes[k] = std::abs(transform[k]);
    }
    return out;
}

std::vector<double> revival_times(const OverlapSeries& series, double threshold) {
    if (!(threshold > 0.0 && threshold < 1.0))
        throw ConfigError("revival threshold must lie in (0, 1)");
    std::vector<double> out;
    for (const Peak& peak : local_maxima(series, threshold))
        out.push_back(peak.t);
    return out;
}

std::optional<double> revival_spacing(const OverlapSeries& series, double floor) {
    const std::vector<Peak> peaks = local_maxima(series, floor);
    if (peaks.size() < 2)
        return std::nullopt;

    // Seed the cluster radius from the dominant periodicity of |I|, which is
    // insensitive to revivals arriving as multiplets of sub-peaks.
    const Spectrum spec = spectrum(series);
    std::size_t best = 1;
    for (std::size_t k = 2; k < spec.magnitudes.size(); ++k)
        if (spec.magnitudes[k] > spec.magnitudes[best])
            best = k;
    const double seed_period = kTwoPi / spec.frequencies[best];
    const double dt = series.times[1] - series.times[0];
    const double radius = std::max(seed_period / 3.0, 3.0 * dt);

    std::vector<Peak> representatives;
    double cluster_end = -1e300;
    for (const Peak& peak : peaks) {
        if (representatives.empty() || peak.t - cluster_end > radius)
            representatives.push_back(peak);
        else if (peak.height > representatives.back().height)
            representatives.back() = peak;
        cluster_end = peak.t;
    }
    if (representatives.size() < 2)
        return std::nullopt;

    std::vector<double> gaps;
    for (std::size_t i = 1; i < representatives.size(); ++i)
        gaps.push_back(representatives[i].t - representatives[i - 1].t);
    std::sort(gaps.begin(), gaps.end());
    const std::size_t mid = gaps.size() / 2;
    if (gaps.size() % 2 == 1)
        return gaps[mid];
    return 0.5 * (gaps[mid - 1] + gaps[mid]);
}

} // namespace ioncrystal
