#pragma once

#include <vector>

#include "qbattery/types.hpp"

namespace qbattery {

struct Unchecked {};

/// Density matrix on a (possibly composite) Hilbert space. `dims` lists the
/// subsystem dimensions in tensor order; the joint convention throughout is
/// charger (qubit) first, battery second, i.e. dims = {2, d}.
class DensityMatrix {
public:
    /// Empty placeholder; only assignment and destruction are meaningful.
    DensityMatrix() = default;

    /// Validates Hermiticity, unit trace and spectrum >= -tol.
    DensityMatrix(ComplexMatrix m, std::vector<int> dims, double tol = kDefaultTol);

    /// Skips validation; caller guarantees the invariants.
    DensityMatrix(ComplexMatrix m, std::vector<int> dims, Unchecked);

    const ComplexMatrix& matrix() const { return matrix_; }
    const std::vector<int>& dims() const { return dims_; }
    Eigen::Index dim() const { return matrix_.rows(); }

    /// Smallest eigenvalue (Hermitian part); used for positivity diagnostics.
    double min_eigenvalue() const;

    /// Re-checks all invariants; throws std::runtime_error on violation.
    void validate(double tol = kDefaultTol) const;

private:
    ComplexMatrix matrix_;
    std::vector<int> dims_;
};

/// Pure state |n><n| on a single d-dimensional system.
DensityMatrix basis_state(int d, int n);

/// Ground product state |g><g| (x) |0><0| on the charger (x) battery space.
DensityMatrix ground_joint_state(int d);

}  // namespace qbattery
