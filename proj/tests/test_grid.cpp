#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>
#include <Eigen/Eigenvalues>

#include "cwave/errors.hpp"
#include "cwave/grid.hpp"

using namespace cwave;
using std::numbers::pi;

namespace {

Field random_field(int n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Field f(n);
    for (int j = 0; j < n; ++j) f[j] = u(rng);
    return f;
}

}  // namespace

TEST(BuildGrid, SingleNode) {
    const Grid1D g = build_grid(1, 1.0);
    EXPECT_DOUBLE_EQ(g.h, 0.5);
    ASSERT_EQ(g.nodes().size(), 1u);
    EXPECT_DOUBLE_EQ(g.nodes()[0], 0.5);
}

TEST(BuildGrid, ThreeNodes) {
    const Grid1D g = build_grid(3, 1.0);
    EXPECT_DOUBLE_EQ(g.h, 0.25);
    const auto x = g.nodes();
    EXPECT_DOUBLE_EQ(x[0], 0.25);
    EXPECT_DOUBLE_EQ(x[1], 0.5);
    EXPECT_DOUBLE_EQ(x[2], 0.75);
}

TEST(BuildGrid, LongerDomain) {
    const Grid1D g = build_grid(199, 2.0);
    EXPECT_NEAR(g.h, 0.01, 1e-15);
    EXPECT_NEAR(g.h * 200, 2.0, 4e-16);
    for (double x : g.nodes()) {
        EXPECT_GT(x, 0.0);
        EXPECT_LT(x, 2.0);
    }
}

TEST(BuildGrid, RejectsBadInput) {
    EXPECT_THROW(build_grid(0, 1.0), ConfigError);
    EXPECT_THROW(build_grid(5, 0.0), ConfigError);
    EXPECT_THROW(build_grid(5, -1.0), ConfigError);
}

TEST(Laplacian, ZeroField) {
    const Grid1D g = build_grid(7, 1.0);
    EXPECT_EQ(apply_laplacian(g, g.zeros()), g.zeros());
}

TEST(Laplacian, StencilByInspection) {
    const Grid1D g = build_grid(3, 1.0);
    Field f(3);
    f << 1.0, 0.0, 0.0;
    const Field out = apply_laplacian(g, f);
    const double s = 1.0 / (g.h * g.h);
    EXPECT_DOUBLE_EQ(out[0], -2.0 * s);
    EXPECT_DOUBLE_EQ(out[1], 1.0 * s);
    EXPECT_DOUBLE_EQ(out[2], 0.0);
}

TEST(Laplacian, SineEigenpairThreeNodes) {
    const Grid1D g = build_grid(3, 1.0);
    // frozen: (4/h^2) sin^2(pi h / 2) with h = 1/4  = 64 sin^2(pi/8)
    const double lambda1 = 64.0 * std::pow(std::sin(pi / 8.0), 2);
    EXPECT_NEAR(lambda1, 9.3726, 1e-4);
    EXPECT_NEAR(g.laplacian_eigenvalue(1), lambda1, 1e-12);
    const Field f = g.sample([](double x) { return std::sin(pi * x); });
    const Field out = apply_laplacian(g, f);
    for (int j = 0; j < 3; ++j) EXPECT_NEAR(out[j], -lambda1 * f[j], 1e-12);
}

TEST(Laplacian, SpectrumMatchesDenseEigensolve) {
    for (int n : {3, 17, 199}) {
        const Grid1D g = build_grid(n, 1.0);
        // long double keeps the reference solve's own roundoff well below 1e-10 at lambda ~ 1.6e5
        using MatL = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
        Eigen::SelfAdjointEigenSolver<MatL> es((-laplacian_matrix(g)).cast<long double>(), Eigen::EigenvaluesOnly);
        ASSERT_EQ(es.info(), Eigen::Success);
        const auto& ev = es.eigenvalues();  // ascending
        for (int k = 1; k <= n; ++k) {
            const double closed = 4.0 / (g.h * g.h) * std::pow(std::sin(k * pi * g.h / 2.0), 2);
            EXPECT_NEAR(static_cast<double>(ev[k - 1]), closed, 1e-10) << "n=" << n << " k=" << k;
        }
    }
}

TEST(Laplacian, EigenvaluesConvergeSecondOrder) {
    // |lambda_k - (k pi)^2| / h^2 stays bounded (it tends to (k pi)^4 / 12)
    for (int k : {1, 2, 3}) {
        double prev = 0.0;
        for (int n : {19, 39, 79, 159, 319}) {
            const Grid1D g = build_grid(n, 1.0);
            const double err = std::abs(g.laplacian_eigenvalue(k) - std::pow(k * pi, 2));
            const double scaled = err / (g.h * g.h);
            EXPECT_LT(scaled, std::pow(k * pi, 4) / 12.0 * 1.0001);
            if (prev > 0.0) {
                EXPECT_NEAR(scaled / prev, 1.0, 0.05);
            }
            prev = scaled;
        }
    }
}

TEST(Norms, ZeroField) {
    const Grid1D g = build_grid(9, 1.0);
    EXPECT_EQ(l2_norm_sq(g, g.zeros()), 0.0);
    EXPECT_EQ(h1_seminorm_sq(g, g.zeros()), 0.0);
}

TEST(Norms, SineClosedForm) {
    const Grid1D g = build_grid(199, 1.0);
    const Field f = g.sample([](double x) { return std::sin(pi * x); });
    EXPECT_NEAR(l2_norm_sq(g, f), 0.5, 1e-4);
    EXPECT_NEAR(h1_seminorm_sq(g, f), pi * pi / 2.0, 1e-2);
}

TEST(Norms, SummationByPartsOnRandomFields) {
    std::mt19937_64 rng(7);
    for (int n : {1, 2, 5, 199}) {
        const Grid1D g = build_grid(n, 1.3);
        for (int i = 0; i < 100; ++i) {
            const Field f = random_field(n, rng);
            const double lhs = g.h * f.dot(-apply_laplacian(g, f));
            const double rhs = h1_seminorm_sq(g, f);
            EXPECT_NEAR(lhs, rhs, 1e-12 * std::max(1.0, rhs));
        }
    }
}

TEST(Norms, DiscretePoincare) {
    std::mt19937_64 rng(11);
    const Grid1D g = build_grid(49, 1.0);
    const double lambda1 = g.laplacian_eigenvalue(1);
    for (int i = 0; i < 200; ++i) {
        const Field f = random_field(g.n_interior, rng);
        EXPECT_LE(l2_norm_sq(g, f), h1_seminorm_sq(g, f) / lambda1 * (1.0 + 1e-12));
    }
    // equality on the first eigenvector
    const Field s = g.sample([](double x) { return std::sin(pi * x); });
    EXPECT_NEAR(l2_norm_sq(g, s), h1_seminorm_sq(g, s) / lambda1, 1e-13);
}

TEST(Norms, InnerProductsPolarize) {
    std::mt19937_64 rng(3);
    const Grid1D g = build_grid(31, 1.0);
    const Field a = random_field(31, rng), b = random_field(31, rng);
    EXPECT_NEAR(4.0 * l2_inner(g, a, b), l2_norm_sq(g, a + b) - l2_norm_sq(g, a - b), 1e-12);
    EXPECT_NEAR(4.0 * h1_inner(g, a, b), h1_seminorm_sq(g, a + b) - h1_seminorm_sq(g, a - b), 1e-9);
}

TEST(Region, FullDomain) {
    const Grid1D g = build_grid(3, 1.0);
    const Field ind = region_indicator(RegionSpec{{{0.0, 1.0}}}, g);
    EXPECT_EQ(ind, Field::Ones(3));
}

TEST(Region, CentralInterval) {
    const Grid1D g = build_grid(3, 1.0);
    const Field ind = region_indicator(RegionSpec{{{0.4, 0.6}}}, g);
    Field expected(3);
    expected << 0.0, 1.0, 0.0;
    EXPECT_EQ(ind, expected);
}

TEST(Region, EmptyAfterClipping) {
    const Grid1D g = build_grid(3, 1.0);
    EXPECT_THROW(region_indicator(RegionSpec{{{2.0, 3.0}}}, g), ConfigError);
}

TEST(Region, StrictMembershipExcludesEndpoints) {
    const Grid1D g = build_grid(3, 1.0);
    // (0.25, 0.5) has no node strictly inside
    EXPECT_THROW(region_indicator(RegionSpec{{{0.25, 0.5}}}, g), ConfigError);
}

TEST(Region, NormalizeMergesAndSorts) {
    const RegionSpec r = normalize_region(RegionSpec{{{0.6, 0.9}, {-1.0, 0.2}, {0.1, 0.3}, {0.8, 1.5}}}, 1.0);
    ASSERT_EQ(r.intervals.size(), 2u);
    EXPECT_DOUBLE_EQ(r.intervals[0].first, 0.0);
    EXPECT_DOUBLE_EQ(r.intervals[0].second, 0.3);
    EXPECT_DOUBLE_EQ(r.intervals[1].first, 0.6);
    EXPECT_DOUBLE_EQ(r.intervals[1].second, 1.0);
    EXPECT_THROW(normalize_region(RegionSpec{{{0.5, 0.4}}}, 1.0), ConfigError);
}

TEST(Field, CheckFieldRejectsWrongLength) {
    const Grid1D g = build_grid(4, 1.0);
    EXPECT_THROW(check_field(g, Field::Zero(3)), InvalidInput);
    EXPECT_NO_THROW(check_field(g, Field::Zero(4)));
}
