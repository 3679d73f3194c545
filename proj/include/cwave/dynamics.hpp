#pragma once

// Semi-discrete coupled wave system
//   u'' = Delta u - b y' - a1 u' + f1(u)
//   y'' = Delta y + b u' - a2 y'(t - tau) + f2(y)
// written as a first-order system in U = (u, u', y, y') and advanced with classical RK4.
// The delayed velocity is read from a history buffer by linear interpolation.

#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "cwave/coefficients.hpp"
#include "cwave/errors.hpp"
#include "cwave/grid.hpp"
#include "cwave/history.hpp"
#include "cwave/nonlinearity.hpp"

namespace cwave {

enum class Mode { delayed, indefinite, definite, linear_reference };

inline const char* to_string(Mode m) {
    switch (m) {
        case Mode::delayed:
            return "delayed";
        case Mode::indefinite:
            return "indefinite";
        case Mode::definite:
            return "definite";
        case Mode::linear_reference:
            return "linear_reference";
    }
    return "?";
}

inline Mode mode_from_string(const std::string& s) {
    if (s == "delayed") return Mode::delayed;
    if (s == "indefinite") return Mode::indefinite;
    if (s == "definite") return Mode::definite;
    if (s == "linear_reference") return Mode::linear_reference;
    throw ConfigError("unknown mode '" + s + "'");
}

/// U = (u, v = u_t, y, w = y_t) stacked into one vector of length 4n.
struct State {
    Eigen::VectorXd data;
    double t = 0.0;

    State() = default;
    explicit State(int n) : data(Eigen::VectorXd::Zero(4 * n)) {}
    State(const Field& u, const Field& v, const Field& y, const Field& w, double t0 = 0.0) : t(t0) {
        const auto n = u.size();
        data.resize(4 * n);
        data << u, v, y, w;
    }

    Eigen::Index n() const { return data.size() / 4; }
    auto u() const { return data.segment(0, n()); }
    auto v() const { return data.segment(n(), n()); }
    auto y() const { return data.segment(2 * n(), n()); }
    auto w() const { return data.segment(3 * n(), n()); }
    auto u() { return data.segment(0, n()); }
    auto v() { return data.segment(n(), n()); }
    auto y() { return data.segment(2 * n(), n()); }
    auto w() { return data.segment(3 * n(), n()); }

    bool finite() const { return data.allFinite(); }
};

/// ||U||_H^2 = |grad u|^2 + |u_t|^2 + |grad y|^2 + |y_t|^2 with the grid quadratures.
inline double state_norm_sq(const Grid1D& g, const State& s) {
    return h1_seminorm_sq(g, s.u()) + l2_norm_sq(g, s.v()) + h1_seminorm_sq(g, s.y()) + l2_norm_sq(g, s.w());
}

inline double state_norm(const Grid1D& g, const State& s) { return std::sqrt(state_norm_sq(g, s)); }

/// Time derivative of the stacked state. `delayed_w` must be given exactly in delayed mode.
inline Eigen::VectorXd rhs(const Grid1D& g, const Eigen::VectorXd& U, const CoefficientSet& c,
                           const Nonlinearity& nl1, const Nonlinearity& nl2, const Field* delayed_w, Mode mode) {
    const Eigen::Index n = g.n_interior;
    if (U.size() != 4 * n) throw InvalidInput("rhs: state size does not match grid");
    if ((mode == Mode::delayed) != (delayed_w != nullptr))
        throw InvalidInput("rhs: delayed velocity must be supplied exactly in delayed mode");
    if (mode == Mode::definite && !c.a2_nonnegative())
        throw HypothesisViolation("definite mode requires a2 >= 0 everywhere");

    const auto u = U.segment(0, n);
    const auto v = U.segment(n, n);
    const auto y = U.segment(2 * n, n);
    const auto w = U.segment(3 * n, n);

    Eigen::VectorXd dU(4 * n);
    dU.segment(0, n) = v;
    dU.segment(2 * n, n) = w;
    auto dv = dU.segment(n, n);
    auto dw = dU.segment(3 * n, n);

    const double inv_h2 = 1.0 / (g.h * g.h);
    for (Eigen::Index j = 0; j < n; ++j) {
        const double ul = j > 0 ? u[j - 1] : 0.0;
        const double ur = j + 1 < n ? u[j + 1] : 0.0;
        const double yl = j > 0 ? y[j - 1] : 0.0;
        const double yr = j + 1 < n ? y[j + 1] : 0.0;
        dv[j] = (ul - 2.0 * u[j] + ur) * inv_h2 - c.b[j] * w[j] - c.a1[j] * v[j];
        dw[j] = (yl - 2.0 * y[j] + yr) * inv_h2 + c.b[j] * v[j];
    }

    switch (mode) {
        case Mode::delayed:
            dw.array() -= c.a2.array() * delayed_w->array();
            break;
        case Mode::indefinite:
        case Mode::definite:
            dw.array() -= c.a2.array() * w.array();
            break;
        case Mode::linear_reference:
            break;
    }
    if (mode == Mode::delayed || mode == Mode::indefinite) {
        if (!nl1.is_zero()) dv += nl1.apply_f(u);
        if (!nl2.is_zero()) dw += nl2.apply_f(y);
    }
    return dU;
}

/// Everything needed to advance one run.
struct RunDescription {
    Grid1D grid;
    CoefficientSet coeffs;
    Nonlinearity nl_u;
    Nonlinearity nl_y;
    Mode mode = Mode::linear_reference;
    double tau = 0.0;
    HistoryFunction history;  // delayed mode only
    State initial;
    double dt = 0.0;
    double cfl = 0.5;
    double T_final = 1.0;
    int output_stride = 1;
};

/// Extra per-output information passed to observers.
struct StepInfo {
    std::size_t step = 0;
    const Field* delayed_w = nullptr;          // w(t - tau), delayed mode only
    double window_energy = 0.0;                // 1/2 int_{t-tau}^t |sqrt|a2| w(s)|^2 ds
    const HistoryBuffer* history = nullptr;    // delayed mode only
};

struct IntegrationSummary {
    enum class Status { completed, diverged };
    Status status = Status::completed;
    std::optional<double> blowup_time;
    std::size_t n_steps = 0;
    double dt = 0.0;
};

/// Effective step: the largest dt' <= dt that divides T_final evenly.
inline double effective_dt(double dt, double T_final) {
    const auto steps = static_cast<std::size_t>(std::ceil(T_final / dt - 1e-9));
    return T_final / static_cast<double>(std::max<std::size_t>(steps, 1));
}

inline void validate_run(const RunDescription& run) {
    if (!(run.T_final > 0.0)) throw ConfigError("T_final must be positive");
    if (!(run.dt > 0.0)) throw ConfigError("dt must be positive");
    if (run.output_stride < 1) throw ConfigError("output_stride must be >= 1");
    if (run.dt > run.cfl * run.grid.h * (1.0 + 1e-12))
        throw ConfigError("CFL violation: dt=" + std::to_string(run.dt) + " exceeds cfl*h=" +
                          std::to_string(run.cfl * run.grid.h));
    if (run.initial.data.size() != 4 * run.grid.n_interior) throw ConfigError("initial state does not match grid");
    if (!run.initial.finite()) throw ConfigError("initial state is not finite");
    if (run.mode == Mode::delayed) {
        if (!run.history) throw ConfigError("delayed mode requires a history function");
        const double dt = effective_dt(run.dt, run.T_final);
        if (dt > run.tau * (1.0 + 1e-12)) throw ConfigError("delayed mode requires dt <= tau");
    }
    if (run.mode == Mode::definite && !run.coeffs.a2_nonnegative())
        throw HypothesisViolation("definite mode requires a2 >= 0 everywhere");
}

using Observer = std::function<void(const State&, const StepInfo&)>;

/// Classical RK4 with interpolated memory. Calls `observe` at t = 0, at every
/// output_stride-th step and at the final step. Stops at the first non-finite state.
inline IntegrationSummary integrate(const RunDescription& run, const Observer& observe) {
    validate_run(run);
    const Grid1D& g = run.grid;
    const double dt = effective_dt(run.dt, run.T_final);
    const auto n_steps = static_cast<std::size_t>(std::llround(run.T_final / dt));
    const bool delayed = run.mode == Mode::delayed;

    IntegrationSummary summary;
    summary.dt = dt;

    HistoryBuffer buffer;
    std::deque<double> window_q;  // |sqrt|a2| w_k|^2 for each buffer sample
    Field abs_a2 = run.coeffs.abs_a2();
    if (delayed) {
        buffer = init_history(run.history, run.tau, dt, g);
        for (std::size_t k = 0; k < buffer.size(); ++k)
            window_q.push_back(weighted_l2_sq(g, abs_a2, buffer.sample_at(k)));
    }

    State state = run.initial;
    state.t = 0.0;

    auto emit = [&](std::size_t step) {
        StepInfo info;
        info.step = step;
        Field wd;
        if (delayed) {
            wd = buffer.sample(state.t - run.tau);
            info.delayed_w = &wd;
            info.window_energy = 0.5 * trailing_trapezoid(window_q, dt, run.tau);
            info.history = &buffer;
        }
        observe(state, info);
    };
    emit(0);

    Field wd1, wd2, wd3;
    for (std::size_t step = 1; step <= n_steps; ++step) {
        const double t = static_cast<double>(step - 1) * dt;
        const Eigen::VectorXd& U = state.data;
        const Field* d1 = nullptr;
        const Field* d2 = nullptr;
        const Field* d3 = nullptr;
        if (delayed) {
            wd1 = buffer.sample(t - run.tau);
            wd2 = buffer.sample(t + 0.5 * dt - run.tau);
            wd3 = buffer.sample(t + dt - run.tau);
            d1 = &wd1;
            d2 = &wd2;
            d3 = &wd3;
        }
        const auto& c = run.coeffs;
        const Eigen::VectorXd k1 = rhs(g, U, c, run.nl_u, run.nl_y, d1, run.mode);
        const Eigen::VectorXd k2 = rhs(g, U + 0.5 * dt * k1, c, run.nl_u, run.nl_y, d2, run.mode);
        const Eigen::VectorXd k3 = rhs(g, U + 0.5 * dt * k2, c, run.nl_u, run.nl_y, d2, run.mode);
        const Eigen::VectorXd k4 = rhs(g, U + dt * k3, c, run.nl_u, run.nl_y, d3, run.mode);
        state.data = U + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        state.t = static_cast<double>(step) * dt;
        summary.n_steps = step;

        if (!state.finite()) {
            summary.status = IntegrationSummary::Status::diverged;
            summary.blowup_time = state.t;
            return summary;
        }
        if (delayed) {
            Field w_new = state.w();
            window_q.push_front(weighted_l2_sq(g, abs_a2, w_new));
            buffer.push(std::move(w_new), state.t);
            while (window_q.size() > buffer.size()) window_q.pop_back();
        }
        if (step % static_cast<std::size_t>(run.output_stride) == 0 || step == n_steps) emit(step);
    }
    return summary;
}

/// Output-time record of a run.
struct Trajectory {
    std::vector<double> times;
    std::vector<State> states;
    std::vector<Field> delayed_w;         // delayed mode: w(t - tau) at each output time
    std::vector<double> window_energy;    // delayed mode: window term of E at each output time
    IntegrationSummary summary;
};

inline Trajectory integrate_trajectory(const RunDescription& run) {
    Trajectory traj;
    traj.summary = integrate(run, [&](const State& s, const StepInfo& info) {
        traj.times.push_back(s.t);
        traj.states.push_back(s);
        if (info.delayed_w) traj.delayed_w.push_back(*info.delayed_w);
        traj.window_energy.push_back(info.window_energy);
    });
    return traj;
}

}  // namespace cwave
