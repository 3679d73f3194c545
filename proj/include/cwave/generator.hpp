#pragma once

// Dense generator matrices of the linear subsystems in the stacked (u, u_t, y, y_t)
// ordering, plus the Cholesky factor of the energy inner product so that
// |U|_H = |R U|_2.

#include <string>

#include <Eigen/Dense>

#include "cwave/coefficients.hpp"
#include "cwave/errors.hpp"
#include "cwave/grid.hpp"

namespace cwave {

/// linear_reference: a1 damping + coupling only. definite: d1 = a1, d2 = a2 >= 0.
/// indefinite_plus: d2 = a2_plus. indefinite_full: d2 = a2 (linearization of the
/// indefinite system, including the anti-damping a2_minus).
enum class GeneratorMode { linear_reference, definite, indefinite_plus, indefinite_full };

inline const char* to_string(GeneratorMode m) {
    switch (m) {
        case GeneratorMode::linear_reference:
            return "linear_reference";
        case GeneratorMode::definite:
            return "definite";
        case GeneratorMode::indefinite_plus:
            return "indefinite_plus";
        case GeneratorMode::indefinite_full:
            return "indefinite_full";
    }
    return "?";
}

inline Eigen::MatrixXd assemble_generator(const Grid1D& g, const CoefficientSet& c, GeneratorMode mode) {
    const int n = g.n_interior;
    Field d2 = Field::Zero(n);
    switch (mode) {
        case GeneratorMode::linear_reference:
            break;
        case GeneratorMode::definite:
            if (!c.a2_nonnegative()) throw HypothesisViolation("definite generator requires a2 >= 0");
            d2 = c.a2;
            break;
        case GeneratorMode::indefinite_plus:
            d2 = c.a2_plus;
            break;
        case GeneratorMode::indefinite_full:
            d2 = c.a2;
            break;
    }
    const Eigen::MatrixXd lap = laplacian_matrix(g);
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(4 * n, 4 * n);
    G.block(0, n, n, n) = id;
    G.block(n, 0, n, n) = lap;
    G.block(n, n, n, n) = -c.a1.asDiagonal().toDenseMatrix();
    G.block(n, 3 * n, n, n) = -c.b.asDiagonal().toDenseMatrix();
    G.block(2 * n, 3 * n, n, n) = id;
    G.block(3 * n, n, n, n) = c.b.asDiagonal().toDenseMatrix();
    G.block(3 * n, 2 * n, n, n) = lap;
    G.block(3 * n, 3 * n, n, n) = -d2.asDiagonal().toDenseMatrix();
    return G;
}

/// Gram matrix K of the energy inner product: (U, V)_H = U^T K V.
inline Eigen::MatrixXd energy_gram(const Grid1D& g) {
    const int n = g.n_interior;
    const Eigen::MatrixXd stiff = -g.h * laplacian_matrix(g);
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(4 * n, 4 * n);
    K.block(0, 0, n, n) = stiff;
    K.block(n, n, n, n) = g.h * Eigen::MatrixXd::Identity(n, n);
    K.block(2 * n, 2 * n, n, n) = stiff;
    K.block(3 * n, 3 * n, n, n) = g.h * Eigen::MatrixXd::Identity(n, n);
    return K;
}

/// Upper-triangular R with K = R^T R.
inline Eigen::MatrixXd energy_factor(const Grid1D& g) {
    Eigen::LLT<Eigen::MatrixXd> llt(energy_gram(g));
    if (llt.info() != Eigen::Success) throw NumericalError("energy Gram matrix is not positive definite");
    return llt.matrixU();
}

/// R G R^{-1}: the generator in coordinates where the energy norm is Euclidean.
inline Eigen::MatrixXd whitened_generator(const Eigen::MatrixXd& G, const Eigen::MatrixXd& R) {
    const Eigen::MatrixXd RG = R * G;
    // X R = RG  <=>  R^T X^T = (RG)^T
    const Eigen::MatrixXd Xt = R.transpose().triangularView<Eigen::Lower>().solve(RG.transpose());
    return Xt.transpose();
}

}  // namespace cwave
