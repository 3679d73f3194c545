#pragma once

// Uniform 1D grid on (0, L) with homogeneous Dirichlet boundary values.
// Fields live on the interior nodes x_j = j*h, j = 1..n.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "cwave/errors.hpp"

namespace cwave {

using Field = Eigen::VectorXd;

struct Grid1D {
    int n_interior = 1;
    double length = 1.0;
    double h = 0.5;

    double x(int j) const { return (j + 1) * h; }  // zero-based node index

    std::vector<double> nodes() const {
        std::vector<double> xs(static_cast<std::size_t>(n_interior));
        for (int j = 0; j < n_interior; ++j) xs[static_cast<std::size_t>(j)] = x(j);
        return xs;
    }

    Field zeros() const { return Field::Zero(n_interior); }

    template <class Fn>
    Field sample(Fn&& fn) const {
        Field f(n_interior);
        for (int j = 0; j < n_interior; ++j) f[j] = fn(x(j));
        return f;
    }

    /// Eigenvalue k (1-based) of the discrete operator -Delta_h.
    double laplacian_eigenvalue(int k) const {
        const double s = std::sin(k * std::numbers::pi * h / (2.0 * length));
        return 4.0 / (h * h) * s * s;
    }
};

inline Grid1D build_grid(int n_interior, double length) {
    if (n_interior < 1)
        throw ConfigError("grid: n_interior must be >= 1, got " + std::to_string(n_interior));
    if (!(length > 0.0) || !std::isfinite(length))
        throw ConfigError("grid: L must be positive and finite");
    return Grid1D{n_interior, length, length / (n_interior + 1)};
}

inline void check_field(const Grid1D& g, const Field& f, const char* what = "field") {
    if (f.size() != g.n_interior)
        throw InvalidInput(std::string(what) + ": length " + std::to_string(f.size()) +
                           " does not match grid size " + std::to_string(g.n_interior));
}

inline bool all_finite(const Field& f) { return f.allFinite(); }

/// Second-difference Laplacian with zero ghost values at both ends.
inline Field apply_laplacian(const Grid1D& g, const Field& f) {
    check_field(g, f);
    const int n = g.n_interior;
    const double inv_h2 = 1.0 / (g.h * g.h);
    Field out(n);
    for (int j = 0; j < n; ++j) {
        const double left = j > 0 ? f[j - 1] : 0.0;
        const double right = j + 1 < n ? f[j + 1] : 0.0;
        out[j] = (left - 2.0 * f[j] + right) * inv_h2;
    }
    return out;
}

/// h * sum f_j^2
inline double l2_norm_sq(const Grid1D& g, const Field& f) {
    check_field(g, f);
    return g.h * f.squaredNorm();
}

/// h * sum f_j q_j
inline double l2_inner(const Grid1D& g, const Field& f, const Field& q) {
    return g.h * f.dot(q);
}

/// Weighted L2: h * sum w_j f_j^2
inline double weighted_l2_sq(const Grid1D& g, const Field& w, const Field& f) {
    return g.h * (w.array() * f.array().square()).sum();
}

/// sum over the n+1 cells of (f_{j+1} - f_j)^2 / h, boundary values zero.
inline double h1_seminorm_sq(const Grid1D& g, const Field& f) {
    check_field(g, f);
    const int n = g.n_interior;
    double acc = f[0] * f[0] + f[n - 1] * f[n - 1];
    for (int j = 0; j + 1 < n; ++j) {
        const double d = f[j + 1] - f[j];
        acc += d * d;
    }
    return acc / g.h;
}

/// Inner product matching h1_seminorm_sq.
inline double h1_inner(const Grid1D& g, const Field& f, const Field& q) {
    const int n = g.n_interior;
    double acc = f[0] * q[0] + f[n - 1] * q[n - 1];
    for (int j = 0; j + 1 < n; ++j) acc += (f[j + 1] - f[j]) * (q[j + 1] - q[j]);
    return acc / g.h;
}

/// Dense matrix of Delta_h (for eigen-analysis and generator assembly).
inline Eigen::MatrixXd laplacian_matrix(const Grid1D& g) {
    const int n = g.n_interior;
    const double inv_h2 = 1.0 / (g.h * g.h);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (int j = 0; j < n; ++j) {
        m(j, j) = -2.0 * inv_h2;
        if (j > 0) m(j, j - 1) = inv_h2;
        if (j + 1 < n) m(j, j + 1) = inv_h2;
    }
    return m;
}

/// Union of open intervals inside (0, L).
struct RegionSpec {
    std::vector<std::pair<double, double>> intervals;

    bool contains(double x) const {
        return std::any_of(intervals.begin(), intervals.end(),
                           [x](const auto& iv) { return iv.first < x && x < iv.second; });
    }
};

/// Sort, clip to (0, L) and merge overlapping intervals. Throws if nothing is left.
inline RegionSpec normalize_region(const RegionSpec& r, double length) {
    std::vector<std::pair<double, double>> ivs;
    for (auto [lo, hi] : r.intervals) {
        if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi))
            throw ConfigError("region: interval must satisfy left < right");
        lo = std::max(lo, 0.0);
        hi = std::min(hi, length);
        if (lo < hi) ivs.emplace_back(lo, hi);
    }
    if (ivs.empty()) throw ConfigError("region: empty after clipping to (0, L)");
    std::sort(ivs.begin(), ivs.end());
    RegionSpec out;
    for (const auto& iv : ivs) {
        if (!out.intervals.empty() && iv.first <= out.intervals.back().second)
            out.intervals.back().second = std::max(out.intervals.back().second, iv.second);
        else
            out.intervals.push_back(iv);
    }
    return out;
}

/// 1 at nodes strictly inside the region, 0 elsewhere.
inline Field region_indicator(const RegionSpec& r, const Grid1D& g) {
    const RegionSpec norm = normalize_region(r, g.length);
    Field ind = g.sample([&](double x) { return norm.contains(x) ? 1.0 : 0.0; });
    if (ind.sum() == 0.0) throw ConfigError("region: contains no grid nodes");
    return ind;
}

}  // namespace cwave
