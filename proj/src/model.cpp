#include "qbattery/model.hpp"

#include <sstream>
#include <stdexcept>

#include "qbattery/ops.hpp"

namespace qbattery {

void ModelParams::validate() const {
    auto fail = [](const std::string& msg) { throw std::invalid_argument("ModelParams: " + msg); };
    if (!(omega0 > 0.0)) fail("omega0 must be > 0");
    if (d < 2) fail("d must be >= 2");
    if (Gamma < 0.0) fail("Gamma must be >= 0");
    if (eta_c < 0.0 || eta_c > 1.0) fail("eta_c must lie in [0, 1]");
    if (eta_d < 0.0 || eta_d > 1.0) fail("eta_d must lie in [0, 1]");
    if (nbar < 0.0) fail("nbar must be >= 0");
    if (f != 0.0 && !(eta() * Gamma > 0.0))
        fail("f != 0 requires eta*Gamma > 0 (the f^2/(eta*Gamma) feedback-noise rate diverges)");
}

ComplexMatrix sigma_x() {
    ComplexMatrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

ComplexMatrix sigma_y() {
    // Basis [|g>, |e>]: sigma_y = -i sigma_+ + i sigma_-.
    ComplexMatrix m(2, 2);
    m << Complex(0, 0), Complex(0, 1), Complex(0, -1), Complex(0, 0);
    return m;
}

ComplexMatrix sigma_z() {
    ComplexMatrix m(2, 2);
    m << -1, 0, 0, 1;
    return m;
}

ComplexMatrix sigma_plus() {
    ComplexMatrix m = ComplexMatrix::Zero(2, 2);
    m(1, 0) = 1.0;  // |e><g|
    return m;
}

ComplexMatrix sigma_minus() {
    ComplexMatrix m = ComplexMatrix::Zero(2, 2);
    m(0, 1) = 1.0;  // |g><e|
    return m;
}

std::pair<ComplexMatrix, ComplexMatrix> battery_operators(int d) {
    if (d < 2) throw std::invalid_argument("battery_operators: d must be >= 2");
    ComplexMatrix n_hat = ComplexMatrix::Zero(d, d);
    ComplexMatrix b_hat = ComplexMatrix::Zero(d, d);
    for (int n = 0; n < d; ++n) n_hat(n, n) = n;
    for (int n = 1; n < d; ++n) b_hat(n - 1, n) = 1.0;
    return {n_hat, b_hat};
}

ComplexMatrix interaction_hamiltonian(const ModelParams& p) {
    p.validate();
    auto [n_hat, b_hat] = battery_operators(p.d);
    (void)n_hat;
    return p.g * (tensor_product(sigma_plus(), b_hat) +
                  tensor_product(sigma_minus(), b_hat.adjoint()));
}

ComplexMatrix bare_hamiltonian(const ModelParams& p) {
    p.validate();
    auto [n_hat, b_hat] = battery_operators(p.d);
    (void)b_hat;
    const ComplexMatrix id2 = ComplexMatrix::Identity(2, 2);
    const ComplexMatrix idd = ComplexMatrix::Identity(p.d, p.d);
    return 0.5 * p.omega0 * tensor_product(sigma_z(), idd) +
           p.omega0 * tensor_product(id2, n_hat);
}

ComplexMatrix rotating_frame_hamiltonian(const ModelParams& p, double Omega) {
    p.validate();
    auto [n_hat, b_hat] = battery_operators(p.d);
    (void)b_hat;
    const ComplexMatrix id2 = ComplexMatrix::Identity(2, 2);
    const ComplexMatrix idd = ComplexMatrix::Identity(p.d, p.d);
    return p.delta_B * tensor_product(id2, n_hat) + interaction_hamiltonian(p) +
           Omega * tensor_product(sigma_y(), idd);
}

JointOps::JointOps(const ModelParams& p) : d(p.d), dim(2 * p.d) {
    const ComplexMatrix idd = ComplexMatrix::Identity(p.d, p.d);
    const ComplexMatrix id2 = ComplexMatrix::Identity(2, 2);
    auto [n_hat, b_hat] = battery_operators(p.d);
    sm = tensor_product(sigma_minus(), idd);
    sp = tensor_product(sigma_plus(), idd);
    sx = tensor_product(sigma_x(), idd);
    sy = tensor_product(sigma_y(), idd);
    number = tensor_product(id2, n_hat);
    h_int = p.g * (tensor_product(sigma_plus(), b_hat) +
                   tensor_product(sigma_minus(), b_hat.adjoint()));
}

GeneratorParts generator_parts(const ModelParams& p, const JointOps& ops) {
    p.validate();
    GeneratorParts parts;
    parts.hamiltonian = p.delta_B * ops.number + ops.h_int + p.Omega0 * ops.sy;

    if (p.f != 0.0) {
        parts.terms.push_back(GeneratorTerm::feedback_cross(p.f, ops.sy, ops.sm));
        parts.terms.push_back(
            GeneratorTerm::dissipator(p.f * p.f / (p.eta() * p.Gamma), ops.sy));
    }
    parts.terms.push_back(GeneratorTerm::dissipator(p.eta_c * p.Gamma, ops.sm));
    const double thermal = (1.0 - p.eta_c) * p.Gamma;
    if (thermal > 0.0) {
        parts.terms.push_back(GeneratorTerm::dissipator(thermal * (1.0 + p.nbar), ops.sm));
        if (p.nbar > 0.0)
            parts.terms.push_back(GeneratorTerm::dissipator(thermal * p.nbar, ops.sp));
    }
    return parts;
}

Superoperator markovian_generator(const ModelParams& p) {
    JointOps ops(p);
    GeneratorParts parts = generator_parts(p, ops);
    return vectorize_generator(parts.hamiltonian, parts.terms);
}

MasterGenerator::MasterGenerator(const ModelParams& p)
    : params_(p), ops_(p), parts_(generator_parts(p, ops_)) {}

ComplexMatrix MasterGenerator::apply(const ComplexMatrix& rho) const {
    return apply_generator(parts_.hamiltonian, parts_.terms, rho);
}

Superoperator MasterGenerator::matrix() const {
    return vectorize_generator(parts_.hamiltonian, parts_.terms);
}

}  // namespace qbattery
