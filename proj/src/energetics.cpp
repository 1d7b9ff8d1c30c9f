#include "qbattery/energetics.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace qbattery {

namespace {

/// Clipped, renormalized spectrum sorted in non-increasing order.
std::vector<double> sorted_spectrum(const ComplexMatrix& rho) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitize(rho), Eigen::EigenvaluesOnly);
    RealVector vals = es.eigenvalues();
    double sum = 0.0;
    for (Eigen::Index i = 0; i < vals.size(); ++i) {
        if (vals(i) < 0.0) {
            if (vals(i) < -kSpectrumClip)
                throw std::invalid_argument("ergotropy: state has eigenvalue below clip window");
            vals(i) = 0.0;
        }
        sum += vals(i);
    }
    if (sum <= 0.0) throw std::invalid_argument("ergotropy: state has zero trace after clipping");
    std::vector<double> p(vals.data(), vals.data() + vals.size());
    for (double& x : p) x /= sum;
    std::stable_sort(p.begin(), p.end(), std::greater<double>());
    return p;
}

double ladder_energy(const std::vector<double>& populations, double omega0) {
    double e = 0.0;
    for (std::size_t n = 0; n < populations.size(); ++n) e += double(n) * populations[n];
    return omega0 * e;
}

std::vector<double> diagonal_populations(const ComplexMatrix& rho) {
    std::vector<double> q(rho.rows());
    double sum = 0.0;
    for (Eigen::Index n = 0; n < rho.rows(); ++n) {
        double v = rho(n, n).real();
        if (v < 0.0) {
            if (v < -kSpectrumClip)
                throw std::invalid_argument("ergotropy: diagonal population below clip window");
            v = 0.0;
        }
        q[static_cast<std::size_t>(n)] = v;
        sum += v;
    }
    for (double& x : q) x /= sum;
    return q;
}

}  // namespace

double battery_energy(const ComplexMatrix& rho_B, double omega0) {
    double e = 0.0;
    for (Eigen::Index n = 0; n < rho_B.rows(); ++n) e += double(n) * rho_B(n, n).real();
    return omega0 * e;
}

double battery_energy(const DensityMatrix& rho_B, double omega0) {
    return battery_energy(rho_B.matrix(), omega0);
}

DensityMatrix passive_state(const DensityMatrix& rho_B) {
    std::vector<double> p = sorted_spectrum(rho_B.matrix());
    ComplexMatrix out = ComplexMatrix::Zero(rho_B.dim(), rho_B.dim());
    for (Eigen::Index n = 0; n < rho_B.dim(); ++n) out(n, n) = p[static_cast<std::size_t>(n)];
    return DensityMatrix(std::move(out), rho_B.dims(), Unchecked{});
}

double ergotropy(const ComplexMatrix& rho_B, double omega0) {
    std::vector<double> p = sorted_spectrum(rho_B);
    double e_state = battery_energy(rho_B, omega0);
    double e_passive = ladder_energy(p, omega0);
    // Clipping may shift e_passive by O(clip * d); clamp the roundoff tail.
    return std::max(0.0, e_state - e_passive);
}

double ergotropy(const DensityMatrix& rho_B, double omega0) {
    return ergotropy(rho_B.matrix(), omega0);
}

EnergyReport ergotropy_split(const ComplexMatrix& rho_B, double omega0) {
    EnergyReport report;
    report.e_max = omega0 * double(rho_B.rows() - 1);
    report.energy = battery_energy(rho_B, omega0);
    report.ergotropy = ergotropy(rho_B, omega0);

    // Incoherent part: ergotropy of the energy-basis dephased state, whose
    // spectrum is just the diagonal populations.
    std::vector<double> q = diagonal_populations(rho_B);
    double e_dephased = ladder_energy(q, omega0);
    std::vector<double> q_sorted = q;
    std::stable_sort(q_sorted.begin(), q_sorted.end(), std::greater<double>());
    report.ergotropy_incoherent = std::max(0.0, e_dephased - ladder_energy(q_sorted, omega0));
    report.ergotropy_coherent = report.ergotropy - report.ergotropy_incoherent;
    return report;
}

EnergyReport ergotropy_split(const DensityMatrix& rho_B, double omega0) {
    return ergotropy_split(rho_B.matrix(), omega0);
}

double virtual_temperature(double R, double omega0) {
    if (R <= 0.0) throw std::domain_error("virtual_temperature: R must be > 0");
    if (R == 1.0) throw std::range_error("virtual_temperature: infinite at R = 1");
    return -omega0 / std::log(R);
}

}  // namespace qbattery
