#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>

namespace qbattery {

/// A run violated a numerical invariant (positivity drift, residual gate,
/// degenerate null space, ...). The CLI maps this to exit code 3.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent experiment configuration; CLI exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Default absolute tolerance for Hermiticity / trace / positivity checks.
inline constexpr double kDefaultTol = 1e-9;

/// Entry-wise comparison with an explicit absolute tolerance.
inline bool approx_equal(const ComplexMatrix& a, const ComplexMatrix& b, double tol) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    return ((a - b).cwiseAbs().maxCoeff() <= tol);
}

inline ComplexMatrix hermitize(const ComplexMatrix& m) {
    return 0.5 * (m + m.adjoint());
}

/// Column-stacking vectorization: vec(rho) stacks columns top to bottom,
/// so vec(A X B) = (B^T otimes A) vec(X). Eigen is column-major, which makes
/// this a plain reinterpret of the storage.
inline ComplexVector vec(const ComplexMatrix& m) {
    return Eigen::Map<const ComplexVector>(m.data(), m.size());
}

inline ComplexMatrix unvec(const ComplexVector& v, Eigen::Index rows, Eigen::Index cols) {
    return Eigen::Map<const ComplexMatrix>(v.data(), rows, cols);
}

inline ComplexMatrix unvec_square(const ComplexVector& v) {
    auto n = static_cast<Eigen::Index>(std::llround(std::sqrt(double(v.size()))));
    return unvec(v, n, n);
}

/// Trace distance (1/2) ||a - b||_1 between Hermitian matrices.
double trace_distance(const ComplexMatrix& a, const ComplexMatrix& b);

}  // namespace qbattery
