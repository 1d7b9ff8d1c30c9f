#pragma once

#include <utility>
#include <vector>

#include "qbattery/superoperator.hpp"
#include "qbattery/types.hpp"

namespace qbattery {

/// Physical constants of the charger-battery-bath system. All energies share
/// the units of omega0; rates share the units of Gamma. omega0 enters only
/// the energetics (the dynamics live in the interaction picture).
///
/// Validity of the underlying rotating-wave treatment additionally assumes
/// omega0 >> |Omega0|, g, Gamma; that is a physical-regime statement and is
/// deliberately not enforced here.
struct ModelParams {
    double omega0 = 1.0;   // charger/battery level splitting
    double delta_B = 0.0;  // omega_B - omega0 detuning
    double g = 1.0;        // charger-battery coupling
    int d = 20;            // battery levels
    double Gamma = 1.0;    // spontaneous emission rate
    double Omega0 = 0.0;   // constant Rabi drive
    double f = 0.0;        // feedback gain
    double eta_c = 1.0;    // photon collection efficiency
    double eta_d = 1.0;    // detector efficiency
    double nbar = 0.0;     // thermal occupation of the uncollected channel

    double eta() const { return eta_c * eta_d; }
    double e_max() const { return omega0 * (d - 1); }

    /// Eager validation; throws std::invalid_argument naming the field.
    void validate() const;
};

// Qubit operators in the fixed charger basis [|g>, |e>].
ComplexMatrix sigma_x();
ComplexMatrix sigma_y();
ComplexMatrix sigma_z();
ComplexMatrix sigma_plus();
ComplexMatrix sigma_minus();

/// Battery number operator N = diag(0..d-1) and lowering operator
/// B = sum_n |n-1><n|.
std::pair<ComplexMatrix, ComplexMatrix> battery_operators(int d);

/// H_int = g (sigma_+ (x) B + sigma_- (x) B^+) on the 2d joint space.
ComplexMatrix interaction_hamiltonian(const ModelParams& p);

/// Bare H_0 = omega0/2 sigma_z (x) I + I (x) omega0 N; commutes with H_int.
ComplexMatrix bare_hamiltonian(const ModelParams& p);

/// H = delta_B (I (x) N) + H_int + Omega (sigma_y (x) I), the interaction
/// picture Hamiltonian in the frame rotating at the drive frequency.
ComplexMatrix rotating_frame_hamiltonian(const ModelParams& p, double Omega);

/// Qubit and battery operators lifted to the joint space, cached once.
struct JointOps {
    int d = 0;
    Eigen::Index dim = 0;  // 2*d
    ComplexMatrix sm, sp, sx, sy;
    ComplexMatrix number;  // I (x) N
    ComplexMatrix h_int;

    explicit JointOps(const ModelParams& p);
};

/// Hamiltonian plus term list of the ensemble-average generator:
///   drho/dt = -i[delta_B N + H_int + Omega0 sigma_y, rho]
///             + i f [sigma_y, sigma_- rho + rho sigma_+]
///             + eta_c Gamma D[sigma_-] rho + (f^2/(eta Gamma)) D[sigma_y] rho
///             + (1 - eta_c) Gamma { (1+nbar) D[sigma_-] + nbar D[sigma_+] } rho.
struct GeneratorParts {
    ComplexMatrix hamiltonian;
    std::vector<GeneratorTerm> terms;
};

GeneratorParts generator_parts(const ModelParams& p, const JointOps& ops);

/// Dense superoperator form of the generator above.
Superoperator markovian_generator(const ModelParams& p);

/// Direct (matrix-product) application of the generator; the fast route used
/// by the ODE integrator.
class MasterGenerator {
public:
    explicit MasterGenerator(const ModelParams& p);

    ComplexMatrix apply(const ComplexMatrix& rho) const;
    Superoperator matrix() const;

    const ModelParams& params() const { return params_; }
    const JointOps& ops() const { return ops_; }

private:
    ModelParams params_;
    JointOps ops_;
    GeneratorParts parts_;
};

}  // namespace qbattery
