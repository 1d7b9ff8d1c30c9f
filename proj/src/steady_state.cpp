#include "qbattery/steady_state.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <cmath>
#include <sstream>

#include "qbattery/energetics.hpp"
#include "qbattery/ops.hpp"
#include "qbattery/rng.hpp"

namespace qbattery {

namespace {

/// Largest singular value of L by power iteration on L^+ L.
double spectral_scale(const ComplexMatrix& L) {
    NormalStream rng(0x5ca1eULL);
    ComplexVector v(L.cols());
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = Complex(rng.next(), rng.next());
    v.normalize();
    double sigma = 0.0;
    for (int it = 0; it < 12; ++it) {
        ComplexVector w = L * v;
        v = L.adjoint() * w;
        sigma = std::sqrt(v.norm());
        v.normalize();
    }
    return sigma;
}

}  // namespace

DensityMatrix steady_state_numeric(const ModelParams& p, SteadyOptions* opts) {
    p.validate();
    SteadyOptions local;
    SteadyOptions& o = opts ? *opts : local;

    const Superoperator gen = markovian_generator(p);
    const ComplexMatrix& L = gen.matrix;
    const Eigen::Index dim = gen.dim;        // joint Hilbert dimension
    const Eigen::Index n = L.rows();         // dim^2

    // Trace preservation makes the diagonal rows of L linearly dependent;
    // replace the first one with the trace functional to pin Tr rho = 1.
    ComplexMatrix bordered = L;
    bordered.row(0).setZero();
    for (Eigen::Index k = 0; k < dim; ++k) bordered(0, k * dim + k) = 1.0;

    Eigen::PartialPivLU<ComplexMatrix> lu(bordered);
    // A second null direction makes the bordered matrix itself singular;
    // catch that through the pivot spread (rcond() misses exact zeros).
    double min_pivot = std::numeric_limits<double>::max(), max_pivot = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double v = std::abs(lu.matrixLU()(i, i));
        min_pivot = std::min(min_pivot, v);
        max_pivot = std::max(max_pivot, v);
    }
    if (!(min_pivot > 1e-12 * max_pivot)) {
        std::ostringstream msg;
        msg << "steady_state_numeric: degenerate null space (pivot ratio "
            << min_pivot / max_pivot << ")";
        throw NumericalError(msg.str());
    }

    ComplexVector rhs = ComplexVector::Zero(n);
    rhs(0) = 1.0;
    ComplexVector x = lu.solve(rhs);

    // Uniqueness gate: inverse iteration for the second-smallest spectral
    // magnitude of L, deflating the null vector. The bordered factor solves
    // L y = v exactly for v in range(L) (traceless v), reusing the LU.
    const double sigma_max = spectral_scale(L);
    {
        NormalStream rng(0xdef1a7eULL);
        ComplexVector xhat = x.normalized();
        ComplexVector v(n);
        for (Eigen::Index i = 0; i < n; ++i) v(i) = Complex(rng.next(), rng.next());
        v -= xhat * xhat.dot(v);
        v.normalize();
        double growth = 0.0;
        for (int it = 0; it < 10; ++it) {
            // Project onto range(L): remove the trace component.
            Complex tr = 0.0;
            for (Eigen::Index k = 0; k < dim; ++k) tr += v(k * dim + k);
            for (Eigen::Index k = 0; k < dim; ++k) v(k * dim + k) -= tr / double(dim);
            v(0) = 0.0;  // bordered row pins the trace of the solution
            ComplexVector y = lu.solve(v);
            y -= xhat * xhat.dot(y);
            growth = y.norm() / std::max(v.norm(), 1e-300);
            if (!std::isfinite(growth))
                throw NumericalError("steady_state_numeric: degenerate null space "
                                     "(singular bordered solve)");
            if (growth > 1.0 / (o.gap_tol * sigma_max)) break;  // clearly non-degenerate
            v = y.normalized();
        }
        const double lambda2 = 1.0 / std::max(growth, 1e-300);
        if (!std::isfinite(lambda2) || lambda2 <= o.gap_tol * sigma_max) {
            std::ostringstream msg;
            msg << "steady_state_numeric: null space not unique (|lambda_2| ~ " << lambda2
                << " <= " << o.gap_tol << " * ||L|| = " << o.gap_tol * sigma_max << ")";
            throw NumericalError(msg.str());
        }
    }

    // Hermitize, clip the spectrum, renormalize.
    ComplexMatrix rho = hermitize(unvec(x, dim, dim));
    rho /= rho.trace().real();
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rho);
    RealVector vals = es.eigenvalues();
    long repairs = 0;
    for (Eigen::Index i = 0; i < vals.size(); ++i) {
        if (vals(i) < 0.0) {
            if (vals(i) < -1e-8) {
                std::ostringstream msg;
                msg << "steady_state_numeric: spectrum not positive (min " << vals(i) << ")";
                throw NumericalError(msg.str());
            }
            vals(i) = 0.0;
            ++repairs;
        }
    }
    if (repairs > 0) {
        rho = es.eigenvectors() * vals.asDiagonal() * es.eigenvectors().adjoint();
        rho /= rho.trace().real();
    }
    o.positivity_repairs = repairs;

    const double residual = (L * vec(rho)).norm();
    o.residual = residual;
    if (residual > o.residual_tol) {
        std::ostringstream msg;
        msg << "steady_state_numeric: residual " << residual << " above tolerance "
            << o.residual_tol;
        throw NumericalError(msg.str());
    }

    return DensityMatrix(std::move(rho), {2, p.d}, Unchecked{});
}

double steady_sigma_z(const ModelParams& p) {
    p.validate();
    if (p.Omega0 != 0.0)
        throw std::invalid_argument("steady_sigma_z: closed form requires Omega0 = 0");
    const double denom = p.Gamma + 2.0 * p.Gamma * p.nbar * (1.0 - p.eta_c) - 2.0 * p.f +
                         2.0 * p.f * p.f / (p.eta() * p.Gamma);
    if (std::abs(denom) < 1e-300)
        throw std::invalid_argument("steady_sigma_z: zero denominator");
    return (2.0 * p.f - p.Gamma) / denom;
}

double optimal_feedback_gain(const ModelParams& p) {
    p.validate();
    if (p.Omega0 != 0.0)
        throw std::invalid_argument("optimal_feedback_gain: requires Omega0 = 0");
    return 0.5 * p.Gamma * (1.0 + std::sqrt(1.0 + 4.0 * p.nbar * (1.0 - p.eta_c) * p.eta()));
}

SteadyAnalytic steady_battery_analytic(const ModelParams& p) {
    SteadyAnalytic out;
    out.sigma_z = steady_sigma_z(p);
    const int d = p.d;
    const double w0 = p.omega0;

    const double denom = 1.0 - out.sigma_z;
    out.R = denom > 1e-15 ? (1.0 + out.sigma_z) / denom
                          : std::numeric_limits<double>::infinity();
    const double R = out.R;

    out.populations.assign(static_cast<std::size_t>(d), 0.0);
    if (!std::isfinite(R)) {
        out.populations.back() = 1.0;
        out.energy = w0 * (d - 1);
        out.ergotropy = out.energy;
        return out;
    }
    if (std::abs(R - 1.0) < 1e-9) {
        // Uniform-population limit of the geometric distribution.
        for (double& q : out.populations) q = 1.0 / d;
        out.energy = 0.5 * w0 * (d - 1);
        out.ergotropy = 0.0;
        return out;
    }

    // Geometric weights accumulated from whichever end stays bounded.
    double sum = 0.0;
    for (int n = 0; n < d; ++n) {
        const double w = (R <= 1.0) ? std::pow(R, n) : std::pow(R, n - (d - 1));
        out.populations[static_cast<std::size_t>(n)] = w;
        sum += w;
    }
    for (double& q : out.populations) q /= sum;

    if (R < 1.0) {
        const double Rd = std::pow(R, d);
        out.energy = w0 * (d * Rd / (Rd - 1.0) - R / (R - 1.0));
    } else {
        const double Rmd = std::pow(R, -d);
        out.energy = w0 * (d / (1.0 - Rmd) - 1.0 / (1.0 - 1.0 / R));
    }
    out.ergotropy = R > 1.0 ? 2.0 * out.energy - w0 * (d - 1) : 0.0;
    return out;
}

}  // namespace qbattery
