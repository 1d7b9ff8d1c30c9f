#include "qbattery/density_matrix.hpp"

#include <Eigen/Eigenvalues>
#include <sstream>
#include <stdexcept>

namespace qbattery {

namespace {

Eigen::Index dims_product(const std::vector<int>& dims) {
    Eigen::Index n = 1;
    for (int d : dims) {
        if (d < 1) throw std::invalid_argument("DensityMatrix: subsystem dimension < 1");
        n *= d;
    }
    return n;
}

}  // namespace

DensityMatrix::DensityMatrix(ComplexMatrix m, std::vector<int> dims, double tol)
    : matrix_(std::move(m)), dims_(std::move(dims)) {
    if (matrix_.rows() != matrix_.cols())
        throw std::invalid_argument("DensityMatrix: matrix must be square");
    if (matrix_.rows() != dims_product(dims_))
        throw std::invalid_argument("DensityMatrix: dims do not match matrix size");
    validate(tol);
}

DensityMatrix::DensityMatrix(ComplexMatrix m, std::vector<int> dims, Unchecked)
    : matrix_(std::move(m)), dims_(std::move(dims)) {}

double DensityMatrix::min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitize(matrix_), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

void DensityMatrix::validate(double tol) const {
    const double herm = (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
    if (herm > tol) {
        std::ostringstream msg;
        msg << "DensityMatrix: not Hermitian (max deviation " << herm << ", tol " << tol << ")";
        throw std::runtime_error(msg.str());
    }
    const double tr_err = std::abs(matrix_.trace() - Complex(1.0, 0.0));
    if (tr_err > tol) {
        std::ostringstream msg;
        msg << "DensityMatrix: trace differs from 1 by " << tr_err << " (tol " << tol << ")";
        throw std::runtime_error(msg.str());
    }
    const double min_eig = min_eigenvalue();
    if (min_eig < -tol) {
        std::ostringstream msg;
        msg << "DensityMatrix: negative eigenvalue " << min_eig << " (tol " << tol << ")";
        throw std::runtime_error(msg.str());
    }
}

DensityMatrix basis_state(int d, int n) {
    if (n < 0 || n >= d) throw std::invalid_argument("basis_state: index out of range");
    ComplexMatrix m = ComplexMatrix::Zero(d, d);
    m(n, n) = 1.0;
    return DensityMatrix(std::move(m), {d}, Unchecked{});
}

DensityMatrix ground_joint_state(int d) {
    ComplexMatrix m = ComplexMatrix::Zero(2 * d, 2 * d);
    m(0, 0) = 1.0;  // charger |g>, battery |0>; charger basis is [|g>, |e>]
    return DensityMatrix(std::move(m), {2, d}, Unchecked{});
}

}  // namespace qbattery
