#pragma once

// Sufficient conditions for exponential decay and the constant chain behind the
// small-data global existence argument, evaluated with concrete (M, alpha).
// Every strict inequality is reported as a signed margin (RHS - LHS); pass iff margin > 0.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "cwave/coefficients.hpp"
#include "cwave/dynamics.hpp"
#include "cwave/energy.hpp"
#include "cwave/errors.hpp"
#include "cwave/grid.hpp"
#include "cwave/history.hpp"
#include "cwave/nonlinearity.hpp"
#include "cwave/semigroup.hpp"

namespace cwave {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct ConditionCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;
    bool pass = false;
};

/// e^{alpha tau} |a2|_inf < alpha / M
inline ConditionCheck check_delay_condition(double M, double alpha, double tau, double a2_inf) {
    if (!(M >= 1.0) || !(alpha > 0.0) || !(tau >= 0.0))
        throw InvalidInput("delay condition: need M >= 1, alpha > 0, tau >= 0");
    ConditionCheck c;
    c.lhs = std::exp(alpha * tau) * a2_inf;
    c.rhs = alpha / M;
    c.margin = c.rhs - c.lhs;
    c.pass = c.margin > 0.0;
    return c;
}

/// |a2_minus|_inf < alpha~ / M~
inline ConditionCheck check_indefinite_condition(double M, double alpha, double a2_minus_inf) {
    if (!(M >= 1.0) || !(alpha > 0.0)) throw InvalidInput("indefinite condition: need M >= 1, alpha > 0");
    ConditionCheck c;
    c.lhs = a2_minus_inf;
    c.rhs = alpha / M;
    c.margin = c.rhs - c.lhs;
    c.pass = c.margin > 0.0;
    return c;
}

/// C_T = 2 M^2 (1 + tau e^{2 alpha tau} a)(1 + tau a e^{alpha tau}) e^{-(alpha - M a e^{alpha tau}) T}
inline double delayed_horizon_constant(double M, double alpha, double tau, double a2_inf, double T) {
    const double beta = alpha - M * a2_inf * std::exp(alpha * tau);
    return 2.0 * M * M * (1.0 + tau * std::exp(2.0 * alpha * tau) * a2_inf) *
           (1.0 + tau * a2_inf * std::exp(alpha * tau)) * std::exp(-beta * T);
}

/// M~^2 e^{-(alpha~ - M~ a2_minus) T}
inline double indefinite_horizon_constant(double M, double alpha, double a2_minus_inf, double T) {
    return M * M * std::exp(-(alpha - M * a2_minus_inf) * T);
}

struct StabilityCertificate {
    Mode mode = Mode::delayed;
    double M = 1.0;
    double alpha = 0.0;
    double tau = 0.0;
    double a2_inf = 0.0;
    double a2_minus_inf = 0.0;

    ConditionCheck condition;      // delay or negative-part condition
    bool short_circuited = false;  // condition failed, nothing further computed

    double T = 0.0;
    double horizon_value = 0.0;  // C_T (delayed) or M~^2 e^{-(...)T} (indefinite)
    double horizon_target = 0.9;
    double C_of_T = 1.0;         // C(T) = e^{4|a2|T} or C~(T) = e^{4|a2_minus|T}
    double gronwall_rate = 0.0;  // 4|a2| or 4|a2_minus|

    double rho_h = kInf;    // min_i h_i^{-1}(1/2) / (2 sqrt(C(T)))
    double rho_lip = kInf;  // largest radius keeping L(C_rho) within the gate
    double rho = kInf;
    double C_rho = kInf;
    double L_at_Crho = 0.0;
    ConditionCheck lipschitz;  // L(C_rho) < gate
    ConditionCheck data;       // delayed: |U0|^2 + history < rho^2; indefinite: |U0| < rho
    ConditionCheck energy_threshold;  // max_i h_i(2 sqrt(C(T) E(0))) < 1/2

    double initial_norm = 0.0;   // |U0|_H
    double history_term = 0.0;   // int_0^tau |sqrt|a2| g(s - tau)|^2 ds
    double initial_energy = 0.0;
    double envelope_prefactor = 0.0;  // M (|U0| + int_0^tau e^{alpha s} |Psi(s - tau)| ds)
    double envelope_rate = 0.0;       // alpha - M|a2|e^{alpha tau} - M L(C_rho)  (or indefinite analogue)

    bool passed = false;
    std::vector<std::string> notes;
};

namespace detail {

/// Smallest T = T0 + k*step (k >= 1) with value(T) <= target, for value decreasing in T.
template <class Fn>
double grid_search_horizon(Fn&& value, double T0, double step, double target) {
    // Exponential search then bisection on the integer index keeps the cost logarithmic.
    long long hi = 1;
    while (value(T0 + static_cast<double>(hi) * step) > target) {
        if (hi > (1LL << 40)) throw NumericalError("horizon search did not terminate");
        hi *= 2;
    }
    long long lo = hi / 2;  // value(T0 + lo*step) > target unless lo == 0
    if (lo == 0) return T0 + step;
    while (hi - lo > 1) {
        const long long mid = lo + (hi - lo) / 2;
        if (value(T0 + static_cast<double>(mid) * step) > target)
            lo = mid;
        else
            hi = mid;
    }
    return T0 + static_cast<double>(hi) * step;
}

/// Largest r with L(r) <= target for nondecreasing L; +inf if L never exceeds it.
template <class Fn>
double invert_monotone(Fn&& L, double target) {
    if (!(target > 0.0)) return 0.0;
    double hi = 1.0;
    while (L(hi) <= target) {
        hi *= 2.0;
        if (hi > 1e12) return kInf;
    }
    double lo = 0.0;
    for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (L(mid) <= target)
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

inline double max_lipschitz(const Nonlinearity& a, const Nonlinearity& b, double r, const Grid1D& g,
                            std::uint64_t seed) {
    if (!std::isfinite(r)) return (a.is_zero() && b.is_zero()) ? 0.0 : kInf;
    return std::max(lipschitz_for_certificate(a, r, g, seed), lipschitz_for_certificate(b, r, g, seed));
}

}  // namespace detail

struct CertificateOptions {
    double T_grid_step = 0.01;
    double horizon_target = 0.9;    // C_T <= 0.9 instead of < 1
    double lipschitz_slack = 0.9;   // L(C_rho) <= 0.9 * gate when shrinking rho
    std::uint64_t seed = 0;         // for empirical Lipschitz estimates
};

/// Evaluates the constant chain for the delayed (mode = delayed) or the indefinite
/// (mode = indefinite) system. `history` is the seeded buffer (delayed mode only).
inline StabilityCertificate smallness_certificate(const Grid1D& g, const State& U0, const HistoryBuffer* history,
                                                  const CoefficientSet& c, const Nonlinearity& nl1,
                                                  const Nonlinearity& nl2, const SemigroupEstimate& est, Mode mode,
                                                  double tau, const CertificateOptions& opt = {}) {
    if (mode != Mode::delayed && mode != Mode::indefinite)
        throw InvalidInput("certificate: only delayed and indefinite modes carry a certificate");
    if (mode == Mode::delayed && !history) throw InvalidInput("certificate: delayed mode needs the history buffer");

    StabilityCertificate cert;
    cert.mode = mode;
    cert.M = est.M;
    cert.alpha = est.alpha;
    cert.tau = mode == Mode::delayed ? tau : 0.0;
    cert.a2_inf = c.a2_inf();
    cert.a2_minus_inf = c.a2_minus_inf();
    cert.horizon_target = opt.horizon_target;
    cert.initial_norm = state_norm(g, U0);

    if (!est.exponentially_stable || !(est.alpha > 0.0)) {
        cert.short_circuited = true;
        cert.condition = {kInf, 0.0, -kInf, false};
        cert.notes.push_back("reference semigroup not exponentially stable; no certificate");
        return cert;
    }

    const double M = est.M;
    const double alpha = est.alpha;
    double beta = 0.0;  // decay exponent before the nonlinear correction
    if (mode == Mode::delayed) {
        cert.condition = check_delay_condition(M, alpha, tau, cert.a2_inf);
        beta = alpha - M * cert.a2_inf * std::exp(alpha * tau);
        cert.gronwall_rate = 4.0 * cert.a2_inf;
    } else {
        cert.condition = check_indefinite_condition(M, alpha, cert.a2_minus_inf);
        beta = alpha - M * cert.a2_minus_inf;
        cert.gronwall_rate = 4.0 * cert.a2_minus_inf;
    }
    if (!cert.condition.pass) {
        cert.short_circuited = true;
        cert.notes.push_back("decay condition fails: no admissible horizon T exists");
        return cert;
    }

    // (1) horizon T
    if (mode == Mode::delayed) {
        auto CT = [&](double T) { return delayed_horizon_constant(M, alpha, tau, cert.a2_inf, T); };
        cert.T = detail::grid_search_horizon(CT, tau, opt.T_grid_step, opt.horizon_target);
        cert.horizon_value = CT(cert.T);
    } else {
        auto HT = [&](double T) { return indefinite_horizon_constant(M, alpha, cert.a2_minus_inf, T); };
        cert.T = detail::grid_search_horizon(HT, 0.0, opt.T_grid_step, opt.horizon_target);
        cert.horizon_value = HT(cert.T);
    }
    cert.C_of_T = std::exp(cert.gronwall_rate * cert.T);
    const double sqrtC = std::sqrt(cert.C_of_T);

    // (2) radius from the h-thresholds, then shrink until the Lipschitz gate holds
    cert.rho_h = std::min(nl1.h_inverse(0.5), nl2.h_inverse(0.5)) / (2.0 * sqrtC);
    const double gate = beta / (2.0 * M);
    auto L_of = [&](double r) { return detail::max_lipschitz(nl1, nl2, r, g, opt.seed); };
    const double C_max = detail::invert_monotone(L_of, opt.lipschitz_slack * gate);
    cert.rho_lip = std::isfinite(C_max) ? C_max / (2.0 * sqrtC) : kInf;
    cert.rho = std::min(cert.rho_h, cert.rho_lip);
    if (cert.rho_lip < cert.rho_h) cert.notes.push_back("rho reduced below the h-threshold radius by the Lipschitz gate");

    // (4) Lipschitz gate at C_rho
    cert.C_rho = std::isfinite(cert.rho) ? 2.0 * sqrtC * cert.rho : kInf;
    cert.L_at_Crho = L_of(cert.C_rho);
    cert.lipschitz = {cert.L_at_Crho, gate, gate - cert.L_at_Crho, gate - cert.L_at_Crho > 0.0};

    // (3) data check
    double history_amp = 0.0;  // int_0^tau e^{alpha s} |a2 g(s - tau)|_{L2} ds
    if (mode == Mode::delayed) {
        cert.history_term = history->window_integral(g, c.abs_a2());
        std::vector<double> amp;
        const Field a2_sq = c.a2.array().square();
        for (std::size_t k = 0; k < history->size(); ++k) {
            const double s_minus_tau = -static_cast<double>(k) * history->dt();
            amp.push_back(std::exp(alpha * (tau + s_minus_tau)) *
                          std::sqrt(weighted_l2_sq(g, a2_sq, history->sample_at(k))));
        }
        history_amp = trailing_trapezoid(amp, history->dt(), tau);
        const double lhs = cert.initial_norm * cert.initial_norm + cert.history_term;
        const double rhs = cert.rho * cert.rho;
        cert.data = {lhs, rhs, rhs - lhs, rhs - lhs > 0.0};
        cert.initial_energy = energy_delayed(g, U0, 0.5 * cert.history_term, nl1, nl2).total;
    } else {
        cert.data = {cert.initial_norm, cert.rho, cert.rho - cert.initial_norm, cert.rho - cert.initial_norm > 0.0};
        cert.initial_energy = energy_indefinite(g, U0, nl1, nl2).total;
    }

    const double r_thr = 2.0 * std::sqrt(cert.C_of_T * std::max(cert.initial_energy, 0.0));
    const double h_thr = std::max({nl1.h(std::sqrt(h1_seminorm_sq(g, U0.u()))), nl2.h(std::sqrt(h1_seminorm_sq(g, U0.y()))),
                                   nl1.h(r_thr), nl2.h(r_thr)});
    cert.energy_threshold = {h_thr, 0.5, 0.5 - h_thr, 0.5 - h_thr > 0.0};

    cert.envelope_prefactor = M * (cert.initial_norm + history_amp);
    cert.envelope_rate = beta - M * cert.L_at_Crho;
    cert.passed = cert.condition.pass && cert.lipschitz.pass && cert.data.pass && cert.energy_threshold.pass;
    return cert;
}

struct EnergyBoundReport {
    int n_samples = 0;
    double worst_lower_margin = kInf;   // min over t of E(t) - lower bound
    int lower_violations = 0;
    double worst_gronwall_ratio = 0.0;  // max E(t) / (C(t) E(0))
    int gronwall_violations = 0;
    double worst_envelope_ratio = 0.0;  // max |U(t)| / envelope(t)
    int envelope_violations = 0;
    bool energy_growth = false;          // E(end) > E(0) (1 + tol)
    bool certificate_passed = false;
    bool passed = false;
};

/// Streaming form of the three trajectory checks; feed output samples in time order.
class EnergyBoundChecker {
public:
    EnergyBoundChecker(const StabilityCertificate& cert, double tol = 5e-2) : cert_(cert), tol_(tol) {
        rep_.certificate_passed = cert.passed;
    }

    /// `window` is the delay_window component of the energy report (already halved).
    void observe(double t, double energy, double norm_sq, double window) {
        if (rep_.n_samples == 0) E0_ = energy;
        E_last_ = energy;
        ++rep_.n_samples;
        // (a) E > 1/4 |U|^2 + 1/4 int |sqrt|a2| y_t|^2
        const double lower = 0.25 * norm_sq + 0.5 * window;
        const double lower_margin = energy - lower;
        rep_.worst_lower_margin = std::min(rep_.worst_lower_margin, lower_margin);
        const bool trivial = energy == 0.0 && lower == 0.0;
        if (!(lower_margin > 0.0) && !trivial) ++rep_.lower_violations;
        // (b) E(t) <= C(t) E(0)
        const double gron = std::exp(cert_.gronwall_rate * t) * E0_;
        if (gron > 0.0) rep_.worst_gronwall_ratio = std::max(rep_.worst_gronwall_ratio, energy / gron);
        if (energy > gron * (1.0 + tol_)) ++rep_.gronwall_violations;
        // (c) |U(t)| <= envelope
        const double env = cert_.envelope_prefactor * std::exp(-cert_.envelope_rate * t);
        const double nrm = std::sqrt(norm_sq);
        if (env > 0.0)
            rep_.worst_envelope_ratio = std::max(rep_.worst_envelope_ratio, nrm / env);
        else if (nrm > 0.0)
            rep_.worst_envelope_ratio = kInf;
        if (nrm > env * (1.0 + tol_)) ++rep_.envelope_violations;
    }

    EnergyBoundReport report() const {
        EnergyBoundReport r = rep_;
        r.energy_growth = r.n_samples > 0 && E_last_ > E0_ * (1.0 + tol_);
        r.passed = cert_.passed && r.lower_violations == 0 && r.gronwall_violations == 0 &&
                   r.envelope_violations == 0;
        return r;
    }

private:
    StabilityCertificate cert_;
    double tol_;
    EnergyBoundReport rep_;
    double E0_ = 0.0;
    double E_last_ = 0.0;
};

/// Checks the energy lower bound, the Gronwall bound and the decay envelope along a trajectory.
inline EnergyBoundReport verify_energy_bounds(const Grid1D& g, const Trajectory& traj, const Nonlinearity& nl1,
                                              const Nonlinearity& nl2, const StabilityCertificate& cert, Mode mode,
                                              double tol = 5e-2) {
    EnergyBoundChecker chk(cert, tol);
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        const EnergyReport e = energy_for_mode(g, traj.states[k], traj.window_energy[k], mode, nl1, nl2);
        chk.observe(traj.times[k], e.total, state_norm_sq(g, traj.states[k]), e.delay_window);
    }
    return chk.report();
}

}  // namespace cwave
