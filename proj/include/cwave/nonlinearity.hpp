#pragma once

// Source nonlinearities f, their antiderivatives F(s) = int_0^s f, and the
// growth functions h with |int f(u) u| <= h(|grad u|) |grad u|^2 on H^1_0(0, L).

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "cwave/errors.hpp"
#include "cwave/grid.hpp"
#include "cwave/random_fields.hpp"

namespace cwave {

/// sup |u| <= embedding_constant(L) * |u'|_{L2} for u in H^1_0(0, L).
inline double embedding_constant(double length) { return std::sqrt(length) / 2.0; }

/// |u|_{L2} <= poincare_constant(L) * |u'|_{L2} for u in H^1_0(0, L).
inline double poincare_constant(double length) { return length / std::numbers::pi; }

/// Piecewise-linear table with linear extrapolation beyond both ends.
struct PiecewiseLinear {
    std::vector<double> xs;
    std::vector<double> ys;

    double operator()(double x) const {
        const std::size_t n = xs.size();
        std::size_t i = 0;
        if (x <= xs.front())
            i = 0;
        else if (x >= xs[n - 2])
            i = n - 2;
        else
            i = static_cast<std::size_t>(std::upper_bound(xs.begin(), xs.end(), x) - xs.begin()) - 1;
        const double t = (x - xs[i]) / (xs[i + 1] - xs[i]);
        return ys[i] + t * (ys[i + 1] - ys[i]);
    }

    /// Exact integral of the interpolant from 0 to s (0 must lie inside the table span or beyond).
    double integral_from_zero(double s) const {
        auto segment = [this](double a, double b) {  // integral over [a, b] of the interpolant, a<=b
            return 0.5 * ((*this)(a) + (*this)(b)) * (b - a);
        };
        const double lo = std::min(0.0, s);
        const double hi = std::max(0.0, s);
        // Breakpoints inside (lo, hi) split the integral into linear pieces.
        double acc = 0.0;
        double prev = lo;
        for (double b : xs) {
            if (b <= lo) continue;
            if (b >= hi) break;
            acc += segment(prev, b);
            prev = b;
        }
        acc += segment(prev, hi);
        return s >= 0.0 ? acc : -acc;
    }
};

class Nonlinearity {
public:
    enum class Kind { zero, odd_power, tabulated };

    static Nonlinearity zero() { return Nonlinearity{}; }

    static Nonlinearity odd_power(double kappa, double p, double length = 1.0) {
        if (!(p > 1.0)) throw ConfigError("odd_power: exponent p must exceed 1 so that h(0) = 0");
        if (!std::isfinite(kappa)) throw ConfigError("odd_power: kappa must be finite");
        Nonlinearity nl;
        nl.kind_ = Kind::odd_power;
        nl.kappa_ = kappa;
        nl.p_ = p;
        nl.length_ = length;
        return nl;
    }

    /// f given by (s, f(s)) samples, h by (r, h(r)) samples starting at r = 0.
    static Nonlinearity tabulated(std::vector<double> s, std::vector<double> f,
                                  std::vector<double> r, std::vector<double> h, double length = 1.0) {
        if (s.size() < 2 || s.size() != f.size()) throw ConfigError("tabulated: f table needs >= 2 matching points");
        if (r.size() < 2 || r.size() != h.size()) throw ConfigError("tabulated: h table needs >= 2 matching points");
        for (std::size_t i = 1; i < s.size(); ++i)
            if (!(s[i] > s[i - 1])) throw ConfigError("tabulated: f abscissae must be strictly increasing");
        Nonlinearity nl;
        nl.kind_ = Kind::tabulated;
        nl.f_table_ = {std::move(s), std::move(f)};
        nl.h_table_ = {std::move(r), std::move(h)};
        nl.length_ = length;
        if (nl.f(0.0) != 0.0) throw HypothesisViolation("tabulated: f(0) must vanish");
        const auto& rr = nl.h_table_.xs;
        const auto& hh = nl.h_table_.ys;
        if (rr.front() != 0.0 || hh.front() != 0.0)
            throw HypothesisViolation("tabulated: h must start at h(0) = 0");
        for (std::size_t i = 1; i < rr.size(); ++i)
            if (!(rr[i] > rr[i - 1]) || !(hh[i] > hh[i - 1]))
                throw HypothesisViolation("tabulated: h must be strictly increasing");
        return nl;
    }

    Kind kind() const { return kind_; }
    double kappa() const { return kappa_; }
    double exponent() const { return p_; }
    double length() const { return length_; }
    bool is_zero() const { return kind_ == Kind::zero || (kind_ == Kind::odd_power && kappa_ == 0.0); }

    double f(double s) const {
        switch (kind_) {
            case Kind::zero:
                return 0.0;
            case Kind::odd_power:
                return kappa_ * std::pow(std::abs(s), p_ - 1.0) * s;
            case Kind::tabulated:
                return f_table_(s);
        }
        return 0.0;
    }

    double F(double s) const {
        switch (kind_) {
            case Kind::zero:
                return 0.0;
            case Kind::odd_power:
                return kappa_ * std::pow(std::abs(s), p_ + 1.0) / (p_ + 1.0);
            case Kind::tabulated:
                return f_table_.integral_from_zero(s);
        }
        return 0.0;
    }

    double h(double r) const {
        switch (kind_) {
            case Kind::zero:
                return 0.0;
            case Kind::odd_power:
                return std::abs(kappa_) * std::pow(embedding_constant(length_), p_ - 1.0) *
                       std::pow(poincare_constant(length_), 2.0) * std::pow(r, p_ - 1.0);
            case Kind::tabulated:
                return h_table_(r);
        }
        return 0.0;
    }

    /// h^{-1}(y); +inf when h vanishes identically.
    double h_inverse(double y) const {
        switch (kind_) {
            case Kind::zero:
                return std::numeric_limits<double>::infinity();
            case Kind::odd_power: {
                const double c = h(1.0);
                if (c == 0.0) return std::numeric_limits<double>::infinity();
                return std::pow(y / c, 1.0 / (p_ - 1.0));
            }
            case Kind::tabulated: {
                const PiecewiseLinear inv{h_table_.ys, h_table_.xs};
                return inv(y);
            }
        }
        return 0.0;
    }

    /// Closed-form L(r) when known: zero -> 0, odd power -> |kappa| p C_emb^{p-1} C_P r^{p-1}.
    std::optional<double> lipschitz_analytic(double r) const {
        switch (kind_) {
            case Kind::zero:
                return 0.0;
            case Kind::odd_power:
                return std::abs(kappa_) * p_ * std::pow(embedding_constant(length_) * r, p_ - 1.0) *
                       poincare_constant(length_);
            case Kind::tabulated:
                return std::nullopt;
        }
        return std::nullopt;
    }

    Field apply_f(const Field& u) const { return u.unaryExpr([this](double s) { return f(s); }); }

    /// h * sum F(u_j)
    double integral_F(const Grid1D& g, const Field& u) const {
        if (is_zero()) return 0.0;
        double acc = 0.0;
        for (int j = 0; j < u.size(); ++j) acc += F(u[j]);
        return g.h * acc;
    }

private:
    Kind kind_ = Kind::zero;
    double kappa_ = 0.0;
    double p_ = 2.0;
    double length_ = 1.0;
    PiecewiseLinear f_table_;
    PiecewiseLinear h_table_;
};

struct HypothesisReport {
    int n_samples = 0;
    double worst_ratio = 0.0;        // |int f(u)u| / (h(|grad u|) |grad u|^2)
    double worst_lemma_ratio = 0.0;  // |int F(u)| / (h(|grad u|) |grad u|^2 / 2)
    int violations = 0;
    int lemma_violations = 0;
    bool passed = true;
};

/// Sample-wise check of the growth bound and the induced bound on int F(u).
inline HypothesisReport validate_hypothesis(const Nonlinearity& nl, const Grid1D& g, int n_samples,
                                            std::uint64_t seed) {
    if (nl.h(0.0) != 0.0) throw HypothesisViolation("h(0) must vanish");
    for (double r = 0.0; r < 10.0; r += 0.5)
        if (!(nl.h(r + 0.5) > nl.h(r)) && !nl.is_zero())
            throw HypothesisViolation("h must be strictly increasing");

    HypothesisReport rep;
    rep.n_samples = n_samples;
    Rng rng(seed);
    std::uniform_real_distribution<double> log_radius(std::log(1e-2), std::log(10.0));
    std::uniform_int_distribution<int> band(1, 24);
    for (int i = 0; i < n_samples; ++i) {
        const double radius = std::exp(log_radius(rng));
        const Field u = random_field_with_gradient_norm(g, rng, band(rng), radius);
        const double grad_sq = h1_seminorm_sq(g, u);
        const double bound = nl.h(std::sqrt(grad_sq)) * grad_sq;
        const double lhs = std::abs(g.h * nl.apply_f(u).dot(u));
        const double lemma_lhs = std::abs(nl.integral_F(g, u));
        const double ratio = bound > 0.0 ? lhs / bound : (lhs > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
        const double lemma_ratio =
            bound > 0.0 ? lemma_lhs / (0.5 * bound) : (lemma_lhs > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
        rep.worst_ratio = std::max(rep.worst_ratio, ratio);
        rep.worst_lemma_ratio = std::max(rep.worst_lemma_ratio, lemma_ratio);
        if (ratio > 1.0) ++rep.violations;
        if (lemma_ratio > 1.0) ++rep.lemma_violations;
    }
    rep.passed = rep.violations == 0 && rep.lemma_violations == 0;
    return rep;
}

/// Empirical L(r): max of |f(u)-f(v)|_{L2} / |grad(u-v)|_{L2} over sampled pairs with
/// |grad u|, |grad v| <= r. Pairs are unit-radius templates scaled by r, so identical
/// seeds give nested families as r grows for homogeneous nonlinearities.
inline double lipschitz_estimate(const Nonlinearity& nl, double r, const Grid1D& g, int n_samples,
                                 std::uint64_t seed) {
    if (!(r > 0.0)) throw InvalidInput("lipschitz_estimate: radius must be positive");
    if (nl.is_zero()) return 0.0;
    Rng rng(seed);
    std::uniform_real_distribution<double> frac(0.0, 1.0);
    std::uniform_int_distribution<int> band(1, 24);
    double best = 0.0;
    for (int i = 0; i < n_samples; ++i) {
        const double su = std::sqrt(frac(rng));
        Field u_hat = random_field_with_gradient_norm(g, rng, band(rng), 1.0);
        Field v_hat;
        if (i % 2 == 0) {
            v_hat = random_field_with_gradient_norm(g, rng, band(rng), std::sqrt(frac(rng)));
            u_hat *= su;
        } else {
            // Nearby pair at full radius probes the local slope.
            const Field dir = random_field_with_gradient_norm(g, rng, band(rng), 1e-3);
            v_hat = u_hat + dir;
            const double nv = std::sqrt(h1_seminorm_sq(g, v_hat));
            if (nv > 1.0) v_hat /= nv;
        }
        const Field u = r * u_hat;
        const Field v = r * v_hat;
        const double denom = std::sqrt(h1_seminorm_sq(g, u - v));
        if (denom == 0.0) continue;
        const double num = std::sqrt(l2_norm_sq(g, nl.apply_f(u) - nl.apply_f(v)));
        best = std::max(best, num / denom);
    }
    return best;
}

/// L(r) used by certificates: analytic when available, else 2x the empirical estimate.
inline double lipschitz_for_certificate(const Nonlinearity& nl, double r, const Grid1D& g,
                                        std::uint64_t seed, int n_samples = 200) {
    if (auto a = nl.lipschitz_analytic(r)) return *a;
    return 2.0 * lipschitz_estimate(nl, r, g, n_samples, seed);
}

}  // namespace cwave
