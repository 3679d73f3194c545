#pragma once

#include <cmath>
#include <span>
#include <string>
#include <utility>

#include "cwave/errors.hpp"

namespace cwave {

struct DecayFit {
    double rate = 0.0;  // positive means decay
    double amplitude = 0.0;
    double r_squared = 0.0;
    int n_points = 0;
};

/// Least squares of log(values) against t over [t_lo, t_hi]; value ~ amplitude * exp(-rate t).
inline DecayFit fit_decay(std::span<const double> times, std::span<const double> values,
                          std::pair<double, double> window) {
    if (times.size() != values.size()) throw InvalidInput("fit_decay: times and values differ in length");
    double st = 0.0, sy = 0.0;
    int n = 0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < window.first || times[i] > window.second) continue;
        if (!(values[i] > 0.0) || !std::isfinite(values[i]))
            throw InvalidInput("fit_decay: nonpositive value at t=" + std::to_string(times[i]) +
                               " (fit before blow-up or above the round-off floor)");
        st += times[i];
        sy += std::log(values[i]);
        ++n;
    }
    if (n < 8) throw InvalidInput("fit_decay: need at least 8 points in the window, got " + std::to_string(n));
    const double t_mean = st / n;
    const double y_mean = sy / n;
    double stt = 0.0, sty = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < window.first || times[i] > window.second) continue;
        const double dt = times[i] - t_mean;
        const double dy = std::log(values[i]) - y_mean;
        stt += dt * dt;
        sty += dt * dy;
        syy += dy * dy;
    }
    if (stt == 0.0) throw InvalidInput("fit_decay: all sample times coincide");
    const double slope = sty / stt;
    DecayFit fit;
    fit.rate = -slope;
    fit.amplitude = std::exp(y_mean - slope * t_mean);
    fit.n_points = n;
    const double ss_res = syy - slope * sty;
    fit.r_squared = syy > 0.0 ? 1.0 - std::max(ss_res, 0.0) / syy : 1.0;
    return fit;
}

}  // namespace cwave
