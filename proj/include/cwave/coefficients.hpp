#pragma once

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "cwave/errors.hpp"
#include "cwave/grid.hpp"

namespace cwave {

/// Piecewise description of a scalar coefficient on (0, L).
struct ProfileSpec {
    enum class Kind { constant, step, bump };

    struct Piece {
        double left = 0.0;
        double right = 0.0;
        double value = 0.0;
    };

    Kind kind = Kind::constant;
    double value = 0.0;        // constant
    std::vector<Piece> pieces;  // step: value on [left, right), later pieces win
    double background = 0.0;   // step/bump: value outside the pieces / support
    double center = 0.5;       // bump
    double width = 0.25;       // bump half-width
    double height = 1.0;       // bump peak above background

    static ProfileSpec make_constant(double v) {
        ProfileSpec p;
        p.value = v;
        return p;
    }

    static ProfileSpec make_step(std::vector<Piece> pieces, double background = 0.0) {
        ProfileSpec p;
        p.kind = Kind::step;
        p.pieces = std::move(pieces);
        p.background = background;
        return p;
    }

    static ProfileSpec make_bump(double center, double width, double height, double background = 0.0) {
        ProfileSpec p;
        p.kind = Kind::bump;
        p.center = center;
        p.width = width;
        p.height = height;
        p.background = background;
        return p;
    }

    double operator()(double x) const {
        switch (kind) {
            case Kind::constant:
                return value;
            case Kind::step: {
                double v = background;
                // Half-open cells: a node on a breakpoint belongs to the piece on its right.
                for (const auto& pc : pieces)
                    if (pc.left <= x && x < pc.right) v = pc.value;
                return v;
            }
            case Kind::bump: {
                const double z = (x - center) / width;
                if (std::abs(z) >= 1.0) return background;
                return background + height * std::exp(1.0 - 1.0 / (1.0 - z * z));
            }
        }
        return 0.0;
    }

    Field sample(const Grid1D& g) const {
        return g.sample([this](double x) { return (*this)(x); });
    }
};

struct CoefficientSpec {
    ProfileSpec a1 = ProfileSpec::make_constant(0.0);
    ProfileSpec a2 = ProfileSpec::make_constant(0.0);
    ProfileSpec b = ProfileSpec::make_constant(0.0);
    RegionSpec omega{{{0.0, 1.0}}};
    RegionSpec omega_b{{{0.0, 1.0}}};
    double a0 = 0.0;
    // When false, the a1 >= a0 on omega and b != 0 on omega_b checks are skipped
    // (undamped/uncoupled reference configurations).
    bool enforce_support = true;
};

/// Sampled damping/coupling coefficients with the a2 = a2_plus - a2_minus split.
struct CoefficientSet {
    Field a1;
    Field a2;
    Field a2_plus;
    Field a2_minus;
    Field b;
    RegionSpec omega;
    RegionSpec omega_b;
    double a0 = 0.0;

    Field abs_a2() const { return a2_plus + a2_minus; }
    double a2_inf() const { return a2.cwiseAbs().maxCoeff(); }
    double a2_minus_inf() const { return a2_minus.maxCoeff(); }
    bool a2_nonnegative() const { return a2_minus.maxCoeff() == 0.0; }
};

namespace detail {
inline std::string node_label(const Grid1D& g, int j) {
    std::ostringstream os;
    os << "node " << j + 1 << " (x=" << g.x(j) << ")";
    return os.str();
}
}  // namespace detail

/// Split a2 into nonnegative parts with a2 = plus - minus and plus*minus = 0.
inline void split_signed(const Field& a2, Field& plus, Field& minus) {
    plus = a2.cwiseMax(0.0);
    minus = (-a2).cwiseMax(0.0);
}

inline CoefficientSet make_coefficients(const CoefficientSpec& spec, const Grid1D& g) {
    CoefficientSet c;
    c.a1 = spec.a1.sample(g);
    c.a2 = spec.a2.sample(g);
    c.b = spec.b.sample(g);
    for (const Field* f : {&c.a1, &c.a2, &c.b})
        if (!f->allFinite()) throw ConfigError("coefficients: non-finite sample");
    split_signed(c.a2, c.a2_plus, c.a2_minus);
    c.a0 = spec.a0;

    for (int j = 0; j < g.n_interior; ++j)
        if (c.a1[j] < 0.0)
            throw HypothesisViolation("a1 negative at " + detail::node_label(g, j));

    if (!spec.enforce_support) {
        c.omega = spec.omega;
        c.omega_b = spec.omega_b;
        return c;
    }

    if (!(spec.a0 > 0.0)) throw HypothesisViolation("a0 must be positive");
    c.omega = normalize_region(spec.omega, g.length);
    c.omega_b = normalize_region(spec.omega_b, g.length);
    const Field in_omega = region_indicator(c.omega, g);
    const Field in_omega_b = region_indicator(c.omega_b, g);
    for (int j = 0; j < g.n_interior; ++j) {
        if (in_omega[j] > 0.0 && c.a1[j] < spec.a0)
            throw HypothesisViolation("a1 below a0 inside omega at " + detail::node_label(g, j));
        if (in_omega_b[j] > 0.0 && c.b[j] == 0.0)
            throw HypothesisViolation("b vanishes inside omega_b at " + detail::node_label(g, j));
    }
    return c;
}

}  // namespace cwave
