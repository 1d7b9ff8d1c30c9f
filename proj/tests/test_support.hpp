#pragma once

#include <Eigen/Dense>
#include <random>

#include "qbattery/density_matrix.hpp"
#include "qbattery/types.hpp"

namespace qbattery::test {

/// Deterministic random complex matrix with entries in the unit square.
inline ComplexMatrix random_matrix(int rows, int cols, std::mt19937_64& gen) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    ComplexMatrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = Complex(dist(gen), dist(gen));
    return m;
}

inline ComplexMatrix random_hermitian(int n, std::mt19937_64& gen) {
    ComplexMatrix m = random_matrix(n, n, gen);
    return ComplexMatrix(0.5 * (m + m.adjoint()));
}

/// Random full-rank density matrix via a Ginibre matrix G G^+/Tr.
inline ComplexMatrix random_density(int n, std::mt19937_64& gen) {
    ComplexMatrix g = random_matrix(n, n, gen);
    ComplexMatrix rho = g * g.adjoint();
    rho /= rho.trace().real();
    return rho;
}

/// Haar-random unitary from the QR decomposition of a Ginibre matrix.
inline ComplexMatrix random_unitary(int n, std::mt19937_64& gen) {
    ComplexMatrix g = random_matrix(n, n, gen);
    Eigen::HouseholderQR<ComplexMatrix> qr(g);
    ComplexMatrix q = qr.householderQ();
    ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int i = 0; i < n; ++i) {
        Complex d = r(i, i);
        q.col(i) *= d / std::abs(d);
    }
    return q;
}

}  // namespace qbattery::test
