#include "qbattery/superoperator.hpp"

#include <stdexcept>

#include "qbattery/ops.hpp"

namespace qbattery {

GeneratorTerm GeneratorTerm::dissipator(double rate, ComplexMatrix a) {
    if (rate < 0.0)
        throw std::invalid_argument("GeneratorTerm: dissipator rate must be non-negative");
    return GeneratorTerm{Kind::Dissipator, rate, std::move(a), ComplexMatrix()};
}

GeneratorTerm GeneratorTerm::feedback_cross(double gain, ComplexMatrix cross, ComplexMatrix record) {
    return GeneratorTerm{Kind::FeedbackCross, gain, std::move(record), std::move(cross)};
}

namespace {

void check_dim(const ComplexMatrix& m, Eigen::Index dim, const char* what) {
    if (m.rows() != dim || m.cols() != dim)
        throw std::invalid_argument(std::string("vectorize_generator: dimension mismatch in ") + what);
}

}  // namespace

Superoperator vectorize_generator(const ComplexMatrix& hamiltonian,
                                  const std::vector<GeneratorTerm>& terms) {
    const Eigen::Index dim = hamiltonian.rows();
    check_dim(hamiltonian, dim, "hamiltonian");

    const ComplexMatrix id = ComplexMatrix::Identity(dim, dim);
    const Complex i_unit(0.0, 1.0);

    // -i [H, rho]  ->  -i (I (x) H - H^T (x) I)
    ComplexMatrix L = -i_unit * (tensor_product(id, hamiltonian) -
                                 tensor_product(hamiltonian.transpose(), id));

    for (const auto& term : terms) {
        switch (term.kind) {
            case GeneratorTerm::Kind::Dissipator: {
                check_dim(term.op, dim, "dissipator operator");
                if (term.weight < 0.0)
                    throw std::invalid_argument("vectorize_generator: negative dissipator rate");
                const ComplexMatrix& a = term.op;
                ComplexMatrix ad_a = a.adjoint() * a;
                L += term.weight * (tensor_product(a.conjugate(), a) -
                                    0.5 * tensor_product(id, ad_a) -
                                    0.5 * tensor_product(ad_a.transpose(), id));
                break;
            }
            case GeneratorTerm::Kind::FeedbackCross: {
                // i w [C, B rho + rho B^+]
                check_dim(term.op, dim, "feedback record operator");
                check_dim(term.cross_op, dim, "feedback cross operator");
                const ComplexMatrix& b = term.op;
                const ComplexMatrix& c = term.cross_op;
                L += (i_unit * term.weight) *
                     (tensor_product(id, c * b) + tensor_product(b.conjugate(), c) -
                      tensor_product(c.transpose(), b) - tensor_product((b.adjoint() * c).transpose(), id));
                break;
            }
        }
    }
    return Superoperator{std::move(L), dim};
}

ComplexMatrix apply_generator(const ComplexMatrix& hamiltonian,
                              const std::vector<GeneratorTerm>& terms,
                              const ComplexMatrix& rho) {
    const Complex i_unit(0.0, 1.0);
    ComplexMatrix out = -i_unit * (hamiltonian * rho - rho * hamiltonian);
    for (const auto& term : terms) {
        switch (term.kind) {
            case GeneratorTerm::Kind::Dissipator:
                if (term.weight != 0.0) out += term.weight * dissipator_apply(term.op, rho);
                break;
            case GeneratorTerm::Kind::FeedbackCross: {
                if (term.weight == 0.0) break;
                ComplexMatrix inner = term.op * rho + rho * term.op.adjoint();
                out += (i_unit * term.weight) * (term.cross_op * inner - inner * term.cross_op);
                break;
            }
        }
    }
    return out;
}

}  // namespace qbattery
