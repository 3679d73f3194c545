#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "cwave/grid.hpp"

namespace cwave {

using Rng = std::mt19937_64;

/// sum_k c_k sin(k pi x / L) with c_k ~ N(0, 1) / k^decay, k = 1..n_modes.
inline Field random_sine_field(const Grid1D& g, Rng& rng, int n_modes, double decay = 1.0) {
    std::normal_distribution<double> normal(0.0, 1.0);
    const int modes = std::min(n_modes, g.n_interior);
    Field f = g.zeros();
    for (int k = 1; k <= modes; ++k) {
        const double c = normal(rng) / std::pow(static_cast<double>(k), decay);
        for (int j = 0; j < g.n_interior; ++j)
            f[j] += c * std::sin(k * std::numbers::pi * g.x(j) / g.length);
    }
    return f;
}

/// Random band-limited field rescaled so that its H1 seminorm equals `radius`.
inline Field random_field_with_gradient_norm(const Grid1D& g, Rng& rng, int n_modes, double radius) {
    Field f = random_sine_field(g, rng, n_modes);
    const double norm = std::sqrt(h1_seminorm_sq(g, f));
    if (norm == 0.0) return f;
    return f * (radius / norm);
}

}  // namespace cwave
