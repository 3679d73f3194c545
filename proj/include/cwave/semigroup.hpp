#pragma once

// Concrete (M, alpha) with |S(t)|_H <= M exp(-alpha t) for the discrete linear
// semigroups. Two independent routes:
//   spectral: alpha from the eigenvalues of the generator (with a safety haircut),
//             M from propagator norms sampled over [0, T_probe];
//   ensemble: random unit-energy initial states propagated over [0, T_probe],
//             alpha = slowest fitted decay rate, M = max |U(t)| e^{alpha t}.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "cwave/coefficients.hpp"
#include "cwave/errors.hpp"
#include "cwave/fit.hpp"
#include "cwave/generator.hpp"
#include "cwave/random_fields.hpp"

namespace cwave {

inline std::vector<std::complex<double>> generator_eigenvalues(const Eigen::MatrixXd& G) {
    if (G.rows() != G.cols()) throw InvalidInput("eigenvalues: matrix must be square");
    Eigen::EigenSolver<Eigen::MatrixXd> es(G, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success)
        throw NumericalError("eigensolver failed for " + std::to_string(G.rows()) + "x" + std::to_string(G.cols()) +
                             " generator");
    const auto& ev = es.eigenvalues();
    std::vector<std::complex<double>> out(ev.data(), ev.data() + ev.size());
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.real() != b.real()) return a.real() > b.real();
        return a.imag() < b.imag();
    });
    return out;
}

/// Largest real part over the spectrum.
inline double spectral_abscissa(const Eigen::MatrixXd& G) {
    const auto ev = generator_eigenvalues(G);
    return ev.front().real();
}

struct SemigroupEstimate {
    enum class Method { spectral, ensemble, given };

    double M = 1.0;
    double alpha = 0.0;
    Method method = Method::spectral;
    double abscissa = 0.0;           // spectral abscissa of the generator (both methods)
    bool exponentially_stable = false;
    int n_samples = 0;
    std::uint64_t seed = 0;
    double T_probe = 0.0;
    double safety_margin = 0.0;
    std::string note;
};

inline const char* to_string(SemigroupEstimate::Method m) {
    switch (m) {
        case SemigroupEstimate::Method::spectral:
            return "spectral";
        case SemigroupEstimate::Method::ensemble:
            return "ensemble";
        case SemigroupEstimate::Method::given:
            return "given";
    }
    return "?";
}

/// Largest singular value by power iteration on A^T A, warm-started from `x`.
inline double operator_norm_2(const Eigen::MatrixXd& A, Eigen::VectorXd& x, int max_iter = 300, double tol = 1e-10) {
    if (x.size() != A.cols() || x.norm() == 0.0) x = Eigen::VectorXd::Ones(A.cols());
    x.normalize();
    double sigma = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        const Eigen::VectorXd y = A * x;
        Eigen::VectorXd z = A.transpose() * y;
        const double next = std::sqrt(z.norm());
        if (next == 0.0) return 0.0;
        x = z / z.norm();
        if (std::abs(next - sigma) <= tol * next) return next;
        sigma = next;
    }
    return sigma;
}

/// Max eigenvalue of the symmetric part of the whitened generator (<= 0 iff dissipative).
inline double dissipativity_defect(const Eigen::MatrixXd& Gw) {
    const Eigen::MatrixXd sym = 0.5 * (Gw + Gw.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericalError("symmetric eigensolver failed");
    return es.eigenvalues().maxCoeff();
}

struct EnsembleHistory {
    std::vector<double> times;
    std::vector<std::vector<double>> norms;  // one series of |U(t)|_H per sample
};

/// Propagates n_samples random unit-energy states with the exact discrete propagator.
inline EnsembleHistory ensemble_norms(const Eigen::MatrixXd& Gw, int n_samples, std::uint64_t seed, double T_probe,
                                      int n_steps = 400) {
    const double dt = T_probe / n_steps;
    const Eigen::MatrixXd step = (Gw * dt).exp();
    Rng rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    EnsembleHistory hist;
    for (int k = 0; k <= n_steps; ++k) hist.times.push_back(k * dt);
    for (int s = 0; s < n_samples; ++s) {
        Eigen::VectorXd z(Gw.rows());
        for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = normal(rng);
        z.normalize();
        std::vector<double> series{1.0};
        for (int k = 1; k <= n_steps; ++k) {
            z = step * z;
            series.push_back(z.norm());
        }
        hist.norms.push_back(std::move(series));
    }
    return hist;
}

inline SemigroupEstimate estimate_semigroup_constants(const Grid1D& g, const CoefficientSet& c, GeneratorMode mode,
                                                      SemigroupEstimate::Method method, int n_samples,
                                                      std::uint64_t seed, double T_probe,
                                                      double safety_margin = 0.05) {
    if (mode != GeneratorMode::linear_reference && mode != GeneratorMode::indefinite_plus &&
        mode != GeneratorMode::definite)
        throw InvalidInput("semigroup constants need a dissipative generator mode");
    if (!(T_probe > 0.0)) throw InvalidInput("T_probe must be positive");

    const Eigen::MatrixXd G = assemble_generator(g, c, mode);
    const Eigen::MatrixXd R = energy_factor(g);
    const Eigen::MatrixXd Gw = whitened_generator(G, R);
    const double defect = dissipativity_defect(Gw);
    if (defect > 1e-8 * std::max(1.0, Gw.cwiseAbs().maxCoeff()))
        throw HypothesisViolation("generator is not dissipative (defect " + std::to_string(defect) + ")");

    SemigroupEstimate est;
    est.method = method;
    est.T_probe = T_probe;
    est.seed = seed;
    est.safety_margin = safety_margin;
    est.abscissa = spectral_abscissa(G);

    if (method == SemigroupEstimate::Method::spectral) {
        if (est.abscissa >= -1e-10) {
            est.exponentially_stable = false;
            est.note = "spectral abscissa is nonnegative: not exponentially stable";
            return est;
        }
        est.alpha = -est.abscissa * (1.0 - safety_margin);
        est.exponentially_stable = true;
        // Contraction gives |S(t)| <= |S(k dt)| on [k dt, (k+1) dt], hence the (k+1) in the exponent.
        const int steps = std::clamp(static_cast<int>(std::ceil(T_probe * est.alpha / 0.1)), 40, 200);
        const double dt = T_probe / steps;
        const Eigen::MatrixXd step = (Gw * dt).exp();
        Eigen::MatrixXd S = Eigen::MatrixXd::Identity(Gw.rows(), Gw.cols());
        Eigen::VectorXd x;
        double M = std::exp(est.alpha * dt);
        for (int k = 1; k <= steps; ++k) {
            S = step * S;
            const double nrm = operator_norm_2(S, x);
            M = std::max(M, nrm * std::exp(est.alpha * (k + 1) * dt));
        }
        est.M = std::max(M, 1.0);
        return est;
    }

    est.n_samples = n_samples;
    if (n_samples < 1) throw InvalidInput("ensemble estimate needs n_samples >= 1");
    const EnsembleHistory hist = ensemble_norms(Gw, n_samples, seed, T_probe);
    double alpha = std::numeric_limits<double>::infinity();
    for (const auto& series : hist.norms) {
        const DecayFit fit = fit_decay(hist.times, series, {0.5 * T_probe, T_probe});
        alpha = std::min(alpha, fit.rate);
    }
    if (!(alpha > 0.0)) {
        est.exponentially_stable = false;
        est.alpha = 0.0;
        est.note = "ensemble shows no decay: not exponentially stable";
        return est;
    }
    est.alpha = alpha;
    est.exponentially_stable = true;
    double M = 1.0;
    for (const auto& series : hist.norms)
        for (std::size_t k = 0; k < series.size(); ++k) M = std::max(M, series[k] * std::exp(alpha * hist.times[k]));
    est.M = M;
    return est;
}

}  // namespace cwave
