#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "cwave/coefficients.hpp"
#include "cwave/dynamics.hpp"
#include "cwave/errors.hpp"
#include "cwave/grid.hpp"
#include "cwave/history.hpp"
#include "cwave/nonlinearity.hpp"

namespace cwave {

struct EnergyReport {
    enum class Kind { delayed, indefinite, linear };

    double kinetic_u = 0.0;
    double potential_u = 0.0;
    double kinetic_y = 0.0;
    double potential_y = 0.0;
    double nonlinear_u = 0.0;  // -int F1(u)
    double nonlinear_y = 0.0;  // -int F2(y)
    double delay_window = 0.0;  // 1/2 int_{t-tau}^t |sqrt|a2| y_t(s)|^2 ds
    double total = 0.0;
    Kind kind = Kind::linear;

    double quadratic() const { return kinetic_u + potential_u + kinetic_y + potential_y; }
};

namespace detail {
inline EnergyReport quadratic_energy(const Grid1D& g, const State& s) {
    EnergyReport e;
    e.kinetic_u = 0.5 * l2_norm_sq(g, s.v());
    e.potential_u = 0.5 * h1_seminorm_sq(g, s.u());
    e.kinetic_y = 0.5 * l2_norm_sq(g, s.w());
    e.potential_y = 0.5 * h1_seminorm_sq(g, s.y());
    return e;
}
}  // namespace detail

/// Quadratic energy of the linear/definite system.
inline EnergyReport energy_linear(const Grid1D& g, const State& s) {
    EnergyReport e = detail::quadratic_energy(g, s);
    e.kind = EnergyReport::Kind::linear;
    e.total = e.quadratic();
    return e;
}

/// Energy of the indefinite-damping system: quadratic part minus int F1(u) + int F2(y).
inline EnergyReport energy_indefinite(const Grid1D& g, const State& s, const Nonlinearity& nl1,
                                      const Nonlinearity& nl2) {
    EnergyReport e = detail::quadratic_energy(g, s);
    e.kind = EnergyReport::Kind::indefinite;
    e.nonlinear_u = -nl1.integral_F(g, s.u());
    e.nonlinear_y = -nl2.integral_F(g, s.y());
    e.total = e.quadratic() + e.nonlinear_u + e.nonlinear_y;
    return e;
}

/// Energy built from an already computed window term (used along trajectories).
inline EnergyReport energy_delayed(const Grid1D& g, const State& s, double window_term, const Nonlinearity& nl1,
                                   const Nonlinearity& nl2) {
    EnergyReport e = energy_indefinite(g, s, nl1, nl2);
    e.kind = EnergyReport::Kind::delayed;
    e.delay_window = window_term;
    e.total += window_term;
    return e;
}

/// Energy of the delayed system; the buffer head must sit at the state time.
inline EnergyReport energy_delayed(const Grid1D& g, const State& s, const HistoryBuffer& buf,
                                   const CoefficientSet& c, const Nonlinearity& nl1, const Nonlinearity& nl2) {
    const double tol = 1e-9 * std::max(1.0, std::abs(s.t));
    if (std::abs(buf.t_head() - s.t) > tol || buf.oldest_time() > s.t - buf.tau() + tol)
        throw OutOfWindow("energy_delayed: history does not cover [t - tau, t]");
    return energy_delayed(g, s, 0.5 * buf.window_integral(g, c.abs_a2()), nl1, nl2);
}

/// Energy appropriate for a mode (E for delayed, E~ for indefinite, quadratic otherwise).
inline EnergyReport energy_for_mode(const Grid1D& g, const State& s, double window_term, Mode mode,
                                    const Nonlinearity& nl1, const Nonlinearity& nl2) {
    switch (mode) {
        case Mode::delayed:
            return energy_delayed(g, s, window_term, nl1, nl2);
        case Mode::indefinite:
            return energy_indefinite(g, s, nl1, nl2);
        case Mode::definite:
        case Mode::linear_reference:
            return energy_linear(g, s);
    }
    return energy_linear(g, s);
}

/// Right-hand side of the energy identity at one output sample.
inline double dissipation_rate(const Grid1D& g, const State& s, const Field* delayed_w, const CoefficientSet& c,
                               Mode mode) {
    const Field v = s.v();
    const Field w = s.w();
    double rate = -weighted_l2_sq(g, c.a1, v);
    switch (mode) {
        case Mode::delayed: {
            if (!delayed_w) throw InvalidInput("dissipation: delayed mode needs w(t - tau)");
            const Field abs_a2 = c.abs_a2();
            rate += -g.h * (c.a2.array() * w.array() * delayed_w->array()).sum() + 0.5 * weighted_l2_sq(g, abs_a2, w) -
                    0.5 * weighted_l2_sq(g, abs_a2, *delayed_w);
            break;
        }
        case Mode::indefinite:
        case Mode::definite:
            rate += -weighted_l2_sq(g, c.a2, w);
            break;
        case Mode::linear_reference:
            break;
    }
    return rate;
}

struct DissipationResidual {
    std::vector<double> times;     // interior output times
    std::vector<double> residual;  // centered dE/dt minus the identity's right-hand side
    std::vector<double> rate;      // right-hand side of the identity
    std::vector<double> energy;    // energy at every output time
    double max_abs = 0.0;
};

inline DissipationResidual dissipation_residual(const Grid1D& g, const Trajectory& traj, const CoefficientSet& c,
                                                const Nonlinearity& nl1, const Nonlinearity& nl2, Mode mode) {
    const std::size_t n = traj.times.size();
    if (n < 3) throw InvalidInput("dissipation_residual: need at least 3 samples");
    if (mode == Mode::delayed && traj.delayed_w.size() != n)
        throw InvalidInput("dissipation_residual: trajectory lacks delayed samples");
    DissipationResidual out;
    out.energy.reserve(n);
    for (std::size_t k = 0; k < n; ++k)
        out.energy.push_back(energy_for_mode(g, traj.states[k], traj.window_energy[k], mode, nl1, nl2).total);
    for (std::size_t k = 1; k + 1 < n; ++k) {
        const double dEdt = (out.energy[k + 1] - out.energy[k - 1]) / (traj.times[k + 1] - traj.times[k - 1]);
        const Field* wd = mode == Mode::delayed ? &traj.delayed_w[k] : nullptr;
        const double r = dissipation_rate(g, traj.states[k], wd, c, mode);
        out.times.push_back(traj.times[k]);
        out.rate.push_back(r);
        out.residual.push_back(dEdt - r);
        out.max_abs = std::max(out.max_abs, std::abs(dEdt - r));
    }
    return out;
}

}  // namespace cwave
