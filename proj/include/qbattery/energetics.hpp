#pragma once

#include "qbattery/density_matrix.hpp"
#include "qbattery/types.hpp"

namespace qbattery {

/// Energy bookkeeping for one battery state, in units where omega0 carries
/// the energy scale. e_max = omega0 (d-1) is the top-rung energy.
struct EnergyReport {
    double energy = 0.0;
    double ergotropy = 0.0;
    double ergotropy_incoherent = 0.0;
    double ergotropy_coherent = 0.0;
    double e_max = 0.0;
};

/// Eigenvalues in [-clip, 0] are clipped to zero and the spectrum is
/// renormalized before any sorting; small negatives produced by numerical
/// integration must not corrupt the passive-state construction.
inline constexpr double kSpectrumClip = 1e-10;

/// E[rho_B] = omega0 Tr[rho_B N].
double battery_energy(const DensityMatrix& rho_B, double omega0);
double battery_energy(const ComplexMatrix& rho_B, double omega0);

/// Eigenvalues of rho_B sorted in non-increasing order (ties broken by the
/// original eigendecomposition index), placed on |0>, |1>, ... ascending.
DensityMatrix passive_state(const DensityMatrix& rho_B);

/// Ergotropy E[rho] - E[passive(rho)] >= 0.
double ergotropy(const DensityMatrix& rho_B, double omega0);
double ergotropy(const ComplexMatrix& rho_B, double omega0);

/// Full report including the incoherent part (ergotropy of the energy-basis
/// dephased state) and the coherent remainder.
EnergyReport ergotropy_split(const DensityMatrix& rho_B, double omega0);
EnergyReport ergotropy_split(const ComplexMatrix& rho_B, double omega0);

/// T_v = -omega0 / ln R; negative exactly when R > 1. Throws
/// std::domain_error for R <= 0 and std::range_error for R = 1 (infinite
/// temperature).
double virtual_temperature(double R, double omega0);

}  // namespace qbattery
