#pragma once

#include <vector>

#include "qbattery/density_matrix.hpp"
#include "qbattery/types.hpp"

namespace qbattery {

/// Kronecker product a (x) b. Subsystem ordering is fixed charger (x) battery
/// everywhere in this codebase. Inputs must be square.
ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b);

/// Trace out every subsystem except `keep` (index into `dims`).
ComplexMatrix partial_trace(const ComplexMatrix& rho, const std::vector<int>& dims, int keep);

DensityMatrix partial_trace(const DensityMatrix& rho, int keep);

/// Lindblad dissipator D[A]rho = A rho A^+ - 1/2 {A^+ A, rho}.
ComplexMatrix dissipator_apply(const ComplexMatrix& a, const ComplexMatrix& rho);

/// Innovation superoperator H[A]rho = A rho + rho A^+ - Tr[rho (A + A^+)] rho.
ComplexMatrix innovation_apply(const ComplexMatrix& a, const ComplexMatrix& rho);

}  // namespace qbattery
