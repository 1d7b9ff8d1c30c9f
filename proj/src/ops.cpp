#include "qbattery/ops.hpp"

#include <Eigen/Eigenvalues>
#include <stdexcept>

namespace qbattery {

double trace_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitize(a - b), Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != a.cols() || b.rows() != b.cols())
        throw std::invalid_argument("tensor_product: inputs must be square");
    const auto na = a.rows(), nb = b.rows();
    ComplexMatrix out(na * nb, na * nb);
    for (Eigen::Index i = 0; i < na; ++i)
        for (Eigen::Index j = 0; j < na; ++j)
            out.block(i * nb, j * nb, nb, nb) = a(i, j) * b;
    return out;
}

ComplexMatrix partial_trace(const ComplexMatrix& rho, const std::vector<int>& dims, int keep) {
    if (dims.size() < 2)
        throw std::invalid_argument("partial_trace: need at least two subsystems");
    if (keep < 0 || keep >= static_cast<int>(dims.size()))
        throw std::invalid_argument("partial_trace: invalid subsystem index");
    Eigen::Index total = 1;
    for (int d : dims) total *= d;
    if (rho.rows() != total || rho.cols() != total)
        throw std::invalid_argument("partial_trace: dims do not match matrix size");

    // Row-major strides of the tensor index (i_0, i_1, ...).
    std::vector<Eigen::Index> stride(dims.size());
    Eigen::Index acc = 1;
    for (int k = static_cast<int>(dims.size()) - 1; k >= 0; --k) {
        stride[k] = acc;
        acc *= dims[k];
    }
    const Eigen::Index dk = dims[keep], sk = stride[keep];
    const Eigen::Index rest = total / dk;

    ComplexMatrix out = ComplexMatrix::Zero(dk, dk);
    // Enumerate the traced-out multi-index by skipping the kept digit.
    for (Eigen::Index r = 0; r < rest; ++r) {
        Eigen::Index base = 0, rem = r;
        for (int k = static_cast<int>(dims.size()) - 1; k >= 0; --k) {
            if (k == keep) continue;
            base += (rem % dims[k]) * stride[k];
            rem /= dims[k];
        }
        for (Eigen::Index i = 0; i < dk; ++i)
            for (Eigen::Index j = 0; j < dk; ++j)
                out(i, j) += rho(base + i * sk, base + j * sk);
    }
    return out;
}

DensityMatrix partial_trace(const DensityMatrix& rho, int keep) {
    ComplexMatrix reduced = partial_trace(rho.matrix(), rho.dims(), keep);
    return DensityMatrix(std::move(reduced), {rho.dims()[keep]}, Unchecked{});
}

ComplexMatrix dissipator_apply(const ComplexMatrix& a, const ComplexMatrix& rho) {
    if (a.rows() != rho.rows() || a.cols() != rho.cols())
        throw std::invalid_argument("dissipator_apply: dimension mismatch");
    ComplexMatrix ad_a = a.adjoint() * a;
    return a * rho * a.adjoint() - 0.5 * (ad_a * rho + rho * ad_a);
}

ComplexMatrix innovation_apply(const ComplexMatrix& a, const ComplexMatrix& rho) {
    if (a.rows() != rho.rows() || a.cols() != rho.cols())
        throw std::invalid_argument("innovation_apply: dimension mismatch");
    ComplexMatrix out = a * rho + rho * a.adjoint();
    out -= out.trace() * rho;
    return out;
}

}  // namespace qbattery
