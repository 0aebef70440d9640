#include <ioncrystal/gaussian.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>

#include <Eigen/Eigenvalues>

#include <ioncrystal/errors.hpp>
#include <ioncrystal/threading.hpp>

namespace ioncrystal {

using namespace std::complex_literals;

namespace {

constexpr double kSoftModeFloor = 1e-4;
constexpr double kPi = 3.14159265358979323846;

void require_usable(const QuadraticModel& model, const char* who) {
    if (!model.modes.stable)
        throw DomainError(std::string(who) + ": model has unstable modes");
    if (model.modes.frequencies.size() == 0)
        throw DomainError(std::string(who) + ": empty model");
    if (model.modes.frequencies.minCoeff() < kSoftModeFloor)
        throw DomainError(std::string(who) +
                          ": soft mode below 1e-4; harmonic treatment breaks down this close "
                          "to the structural instability");
    if (model.sigma <= 0.0)
        throw DomainError(std::string(who) + ": sigma must be positive");
}

} // namespace

QuadraticModel make_model(const IonConfiguration& equilibrium, const TrapParams& trap,
                          const SpinPattern& spins, double sigma, double energy_reference) {
    QuadraticModel model;
    model.equilibrium = equilibrium;
    model.modes = normal_modes(equilibrium, trap, spins);
    model.energy_offset = potential_energy(equilibrium, trap, spins) - energy_reference;
    model.sigma = sigma;
    if (sigma <= 0.0)
        throw ConfigError("sigma must be positive");
    return model;
}

GaussianPureState ground_state(const QuadraticModel& model) {
    require_usable(model, "ground_state");
    const int n = model.dim();
    GaussianPureState state;
    state.mean_q = model.equilibrium.coords() / model.sigma;
    state.mean_p = Eigen::VectorXd::Zero(n);
    const Eigen::MatrixXd real_width = model.modes.vectors *
                                       model.modes.frequencies.asDiagonal() *
                                       model.modes.vectors.transpose();
    state.width = real_width.cast<std::complex<double>>();
    state.phase = 0.0;
    return state;
}

GaussianPureState evolve(const GaussianPureState& state, const QuadraticModel& model,
                         double t, double phase_reference_rate) {
    require_usable(model, "evolve");
    const int n = model.dim();
    if (state.dim() != n)
        throw DomainError("evolve: state and model dimensions differ");
    if (t == 0.0)
        return state; // exact identity, not a basis round trip

    const Eigen::VectorXd center = model.equilibrium.coords() / model.sigma;
    const Eigen::MatrixXd& basis = model.modes.vectors;
    const Eigen::VectorXd& omega = model.modes.frequencies;

    // Everything below runs in the model's normal coordinates, where the
    // propagator factorizes into single-mode pieces.
    Eigen::VectorXd y = basis.transpose() * (state.mean_q - center);
    Eigen::VectorXd p = basis.transpose() * state.mean_p;
    Eigen::MatrixXcd a = basis.transpose() * state.width * basis;
    double gamma = state.phase;

    const double net_rate = model.energy_offset / (model.sigma * model.sigma) -
                            phase_reference_rate;
    const double sign = t >= 0.0 ? 1.0 : -1.0;
    double remaining = t;

    while (std::abs(remaining) > 1e-15) {
        const double trace_scale = std::abs(a.trace().real());
        const double rate = std::max({trace_scale, omega.maxCoeff() * n, 1.0});
        double dt = sign * std::min(std::abs(remaining), 1.0 / rate);

        Eigen::VectorXd cosv(n), sinv(n);
        Eigen::VectorXcd cosc(n), s_over_w(n);
        Eigen::MatrixXcd q_matrix(n, n);
        double darg = 0.0;
        for (int attempt = 0; attempt < 60; ++attempt) {
            cosv = (omega.array() * dt).cos().matrix();
            sinv = (omega.array() * dt).sin().matrix();
            cosc = cosv.cast<std::complex<double>>();
            s_over_w = (sinv.array() / omega.array()).matrix().cast<std::complex<double>>();
            q_matrix = 1i * (s_over_w.asDiagonal() * a);
            q_matrix.diagonal() += cosc;
            darg = std::arg(q_matrix.determinant());
            // The branch is tracked by keeping each substep's phase advance
            // inside the principal interval, with margin.
            if (std::abs(darg) < 2.0)
                break;
            dt *= 0.5;
        }

        Eigen::MatrixXcd numerator = cosc.asDiagonal() * a;
        numerator.diagonal() +=
            1i * (omega.array() * sinv.array()).matrix().cast<std::complex<double>>();
        Eigen::MatrixXcd a_next = numerator * q_matrix.partialPivLu().inverse();
        a_next = 0.5 * (a_next + a_next.transpose()).eval();

        const Eigen::VectorXd y_next =
            cosv.cwiseProduct(y) + (sinv.array() / omega.array()).matrix().cwiseProduct(p);
        const Eigen::VectorXd p_next =
            -(omega.array() * sinv.array()).matrix().cwiseProduct(y) + cosv.cwiseProduct(p);

        // Classical action of harmonic motion reduces to boundary terms.
        gamma += 0.5 * (p_next.dot(y_next) - p.dot(y)) - 0.5 * darg - net_rate * dt;
        a = a_next;
        y = y_next;
        p = p_next;
        remaining -= dt;
    }

    GaussianPureState out;
    out.mean_q = basis * y + center;
    out.mean_p = basis * p;
    out.width = basis * a * basis.transpose();
    out.phase = gamma;
    return out;
}

std::complex<double> overlap(const GaussianPureState& a, const GaussianPureState& b) {
    const int n = a.dim();
    if (b.dim() != n)
        throw DomainError("overlap: state dimensions differ");

    const Eigen::MatrixXcd m = a.width.conjugate() + b.width;
    const Eigen::VectorXd d = b.mean_q - a.mean_q;
    const Eigen::VectorXcd rhs =
        b.width * d.cast<std::complex<double>>() + 1i * (b.mean_p - a.mean_p).cast<std::complex<double>>();

    // det(M)^(-1/2) with a fixed branch: all eigenvalues have positive real
    // part for valid states, so principal roots are continuous in the data.
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> eigen(m, /*computeEigenvectors=*/false);
    if (eigen.info() != Eigen::Success)
        throw NumericalError("overlap: eigen decomposition failed");
    std::complex<double> det_root_inv = 1.0;
    for (int k = 0; k < n; ++k) {
        const std::complex<double> lambda = eigen.eigenvalues()[k];
        if (lambda.real() <= 0.0)
            throw NumericalError("overlap: width sum is not positive definite");
        det_root_inv /= std::sqrt(lambda);
    }

    const double norm_a = std::pow(Eigen::MatrixXd(a.width.real()).determinant(), 0.25);
    const double norm_b = std::pow(Eigen::MatrixXd(b.width.real()).determinant(), 0.25);
    const double norm_scale = std::pow(kPi, -0.5 * n); // both pi^(-n/4) factors

    // Unconjugated bilinear forms throughout (complex symmetric quadratics).
    const Eigen::VectorXcd solved = m.partialPivLu().solve(rhs);
    const std::complex<double> bilinear = (rhs.transpose() * solved)(0);
    const std::complex<double> quadratic =
        (d.cast<std::complex<double>>().transpose() * b.width * d.cast<std::complex<double>>())(0);
    const std::complex<double> exponent =
        0.5 * bilinear - 0.5 * quadratic - 1i * b.mean_p.dot(d);

    return norm_a * norm_b * norm_scale * std::exp(1i * (b.phase - a.phase)) *
           std::pow(2.0 * kPi, 0.5 * n) * det_root_inv * std::exp(exponent);
}

double ground_level_rate(const QuadraticModel& model) {
    return model.energy_offset / (model.sigma * model.sigma) +
           0.5 * model.modes.frequencies.sum();
}

OverlapSeries loschmidt_echo(const QuadraticModel& ground_model,
                             const QuadraticModel& excited_model,
                             const std::vector<double>& times, const EchoOptions& options) {
    require_usable(ground_model, "loschmidt_echo");
    require_usable(excited_model, "loschmidt_echo");
    if (ground_model.dim() != excited_model.dim())
        throw DomainError("loschmidt_echo: sector dimensions differ");
    if (ground_model.sigma != excited_model.sigma)
        throw ConfigError("loschmidt_echo: both sectors must share one sigma");
    if (times.empty())
        throw ConfigError("loschmidt_echo: empty time grid");
    for (std::size_t i = 0; i + 1 < times.size(); ++i)
        if (!(times[i] < times[i + 1]))
            throw ConfigError("loschmidt_echo: time grid must be strictly increasing");
    if (times.front() < 0.0)
        throw ConfigError("loschmidt_echo: time grid must be nonnegative");

    const GaussianPureState initial = ground_state(ground_model);
    const double reference = ground_level_rate(ground_model);

    OverlapSeries series;
    series.times = times;
    series.values.assign(times.size(), {});
    series.metadata.sigma = ground_model.sigma;

    // Fixed chunking (independent of thread count) keeps the output
    // bit-reproducible; each chunk evolves incrementally along the grid.
    const std::size_t n = times.size();
    const std::size_t n_chunks = std::clamp<std::size_t>(n / 256, 1, 64);
    const std::size_t chunk_len = (n + n_chunks - 1) / n_chunks;

    parallel_for(n_chunks, options.threads, [&](std::size_t chunk) {
        const std::size_t begin = chunk * chunk_len;
        const std::size_t end = std::min(n, begin + chunk_len);
        if (begin >= end)
            return;
        GaussianPureState running = evolve(initial, excited_model, times[begin], reference);
        series.values[begin] = overlap(initial, running);
        for (std::size_t i = begin + 1; i < end; ++i) {
            running = evolve(running, excited_model, times[i] - times[i - 1], reference);
            series.values[i] = overlap(initial, running);
        }
    });
    return series;
}

std::complex<double> single_mode_echo_reference(double omega_g, double omega_e,
                                                double displacement, double t) {
    if (omega_g <= 0.0 || omega_e <= 0.0)
        throw DomainError("single_mode_echo_reference: frequencies must be positive");

    const double theta = omega_e * t;
    // det-branch unwinding in closed form: arg(cos th + i (og/oe) sin th)
    // advances by pi every half period of the excited mode.
    const double half_turns = std::floor(theta / kPi);
    const double theta_rest = theta - half_turns * kPi;
    const double arg_unwound =
        half_turns * kPi + std::atan2((omega_g / omega_e) * std::sin(theta_rest),
                                      std::cos(theta_rest));

    const double c = std::cos(theta);
    const double s = std::sin(theta);
    const std::complex<double> width_t =
        omega_e * (omega_g * c + 1i * omega_e * s) / (omega_e * c + 1i * omega_g * s);

    // Mean motion around the displaced excited well, started at rest.
    const double q_t = displacement * (1.0 - c);
    const double p_t = omega_e * displacement * s;
    const double gamma = 0.5 * p_t * (q_t - displacement) - 0.5 * arg_unwound;

    const std::complex<double> m = omega_g + width_t;
    const std::complex<double> rhs = width_t * q_t + 1i * p_t;
    const double norm_g = std::pow(omega_g / kPi, 0.25);
    const std::complex<double> norm_t = std::pow(width_t.real() / kPi, 0.25);

    const std::complex<double> value =
        norm_g * norm_t * std::exp(1i * gamma) * std::sqrt(2.0 * kPi) / std::sqrt(m) *
        std::exp(0.5 * rhs * rhs / m - 0.5 * width_t * q_t * q_t - 1i * p_t * q_t);

    // Ground zero-point reference, same convention as loschmidt_echo.
    return std::exp(1i * (0.5 * omega_g * t)) * value;
}

} // namespace ioncrystal
