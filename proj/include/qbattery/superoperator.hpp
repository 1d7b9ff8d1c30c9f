#pragma once

#include <vector>

#include "qbattery/types.hpp"

namespace qbattery {

/// Dense matrix acting on column-stacked density matrices.
struct Superoperator {
    ComplexMatrix matrix;  // (D^2) x (D^2)
    Eigen::Index dim = 0;  // D

    ComplexMatrix apply(const ComplexMatrix& rho) const {
        return unvec(ComplexVector(matrix * vec(rho)), dim, dim);
    }
};

/// One additive term of a master-equation generator.
///
/// Dissipator:    weight * D[op] with weight >= 0.
/// FeedbackCross: i * weight * [cross_op, op rho + rho op^+], the non-Lindblad
///                term produced by direct feedback (cross_op = sigma_y,
///                op = sigma_-). weight may have either sign.
struct GeneratorTerm {
    enum class Kind { Dissipator, FeedbackCross };

    Kind kind;
    double weight;
    ComplexMatrix op;
    ComplexMatrix cross_op;  // FeedbackCross only

    static GeneratorTerm dissipator(double rate, ComplexMatrix a);
    static GeneratorTerm feedback_cross(double gain, ComplexMatrix cross, ComplexMatrix record);
};

/// Matrix form of the generator L with L vec(rho) = vec(drho/dt),
/// drho/dt = -i[H, rho] + sum of terms.
Superoperator vectorize_generator(const ComplexMatrix& hamiltonian,
                                  const std::vector<GeneratorTerm>& terms);

/// Same generator applied directly to a matrix (no (D^2)x(D^2) product);
/// used as the fast route in time evolution and as the cross-check against
/// the vectorized form.
ComplexMatrix apply_generator(const ComplexMatrix& hamiltonian,
                              const std::vector<GeneratorTerm>& terms,
                              const ComplexMatrix& rho);

}  // namespace qbattery
