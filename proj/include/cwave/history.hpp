#pragma once

#include <cmath>
#include <deque>
#include <functional>
#include <string>

#include "cwave/errors.hpp"
#include "cwave/grid.hpp"

namespace cwave {

/// Trapezoid rule over equally spaced samples q_k taken at s = head - k*dt, integrated
/// over [head - span, head]. The last partial cell uses a linearly interpolated endpoint.
template <class Seq>
double trailing_trapezoid(const Seq& q, double dt, double span) {
    if (span <= 0.0 || q.empty()) return 0.0;
    double acc = 0.0;
    std::size_t k = 0;
    while (k + 1 < q.size() && (k + 1) * dt <= span * (1.0 + 1e-12)) {
        acc += 0.5 * dt * (q[k] + q[k + 1]);
        ++k;
    }
    const double rest = span - k * dt;
    if (rest > 1e-12 * dt) {
        if (k + 1 >= q.size()) throw OutOfWindow("trapezoid: samples do not cover the window");
        const double theta = rest / dt;
        const double q_end = (1.0 - theta) * q[k] + theta * q[k + 1];
        acc += 0.5 * rest * (q[k] + q_end);
    }
    return acc;
}

/// Equally spaced record of y_t over the trailing delay window, newest sample first.
class HistoryBuffer {
public:
    HistoryBuffer() = default;

    HistoryBuffer(double tau, double dt) : tau_(tau), dt_(dt) {
        if (!(tau > 0.0)) throw ConfigError("history: tau must be positive");
        if (!(dt > 0.0)) throw ConfigError("history: dt must be positive");
        if (dt > tau * (1.0 + 1e-12))
            throw ConfigError("history: dt must not exceed tau (dt=" + std::to_string(dt) +
                              ", tau=" + std::to_string(tau) + ")");
        capacity_ = static_cast<std::size_t>(std::ceil(tau / dt - 1e-9)) + 2;  // k = 0..m, m = ceil(tau/dt)+1
    }

    double tau() const { return tau_; }
    double dt() const { return dt_; }
    double t_head() const { return t_head_; }
    std::size_t size() const { return samples_.size(); }
    std::size_t capacity() const { return capacity_; }
    const Field& sample_at(std::size_t k) const { return samples_.at(k); }
    double oldest_time() const { return t_head_ - static_cast<double>(samples_.size() - 1) * dt_; }

    /// Append the newest sample; it must be exactly one dt after the current head.
    void push(Field w, double t) {
        samples_.push_front(std::move(w));
        t_head_ = t;
        while (samples_.size() > capacity_) samples_.pop_back();
    }

    /// Used only while seeding: append an older sample at the back.
    void push_back_older(Field w) { samples_.push_back(std::move(w)); }

    void set_head_time(double t) { t_head_ = t; }

    /// Linear interpolation between the bracketing samples; exact at sample times.
    Field sample(double s) const {
        const double k_real = (t_head_ - s) / dt_;
        const double k_max = static_cast<double>(samples_.size() - 1);
        if (k_real < -1e-9 || k_real > k_max + 1e-9)
            throw OutOfWindow("history: query at s=" + std::to_string(s) + " outside [" +
                              std::to_string(oldest_time()) + ", " + std::to_string(t_head_) + "]");
        const double k_round = std::round(k_real);
        if (std::abs(k_real - k_round) < 1e-9) return samples_[static_cast<std::size_t>(k_round)];
        const auto k = static_cast<std::size_t>(std::floor(k_real));
        const double theta = k_real - static_cast<double>(k);
        return (1.0 - theta) * samples_[k] + theta * samples_[k + 1];
    }

    /// int_{t_head - tau}^{t_head} h * sum weight_j w_j(s)^2 ds by trapezoid over the samples.
    double window_integral(const Grid1D& g, const Field& weight) const {
        std::deque<double> q;
        for (const auto& w : samples_) q.push_back(weighted_l2_sq(g, weight, w));
        return trailing_trapezoid(q, dt_, tau_);
    }

private:
    double tau_ = 0.0;
    double dt_ = 0.0;
    double t_head_ = 0.0;
    std::size_t capacity_ = 0;
    std::deque<Field> samples_;
};

/// History g(x, s) on [-tau, 0] as a function of s returning a nodal field.
using HistoryFunction = std::function<Field(double s)>;

/// Buffer seeded with g at s = 0, -dt, -2dt, ... down past -tau; head at t = 0.
inline HistoryBuffer init_history(const HistoryFunction& g, double tau, double dt, const Grid1D& grid) {
    HistoryBuffer buf(tau, dt);
    for (std::size_t k = 0; k < buf.capacity(); ++k) {
        Field f = g(-static_cast<double>(k) * dt);
        check_field(grid, f, "history sample");
        if (!f.allFinite()) throw ConfigError("history: non-finite sample");
        buf.push_back_older(std::move(f));
    }
    buf.set_head_time(0.0);
    return buf;
}

}  // namespace cwave
