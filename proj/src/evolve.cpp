#include "qbattery/evolve.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "qbattery/ops.hpp"
#include "qbattery/steady_state.hpp"

namespace qbattery {

namespace {

void check_sample(const ComplexMatrix& rho, double t, double tol, double* min_eig_out) {
    const double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    const double tr_err = std::abs(rho.trace() - Complex(1.0, 0.0));
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitize(rho), Eigen::EigenvaluesOnly);
    const double min_eig = es.eigenvalues().minCoeff();
    if (min_eig_out) *min_eig_out = min_eig;
    if (herm > tol || tr_err > tol || min_eig < -tol) {
        std::ostringstream msg;
        msg << "evolve_master_equation: invariant violation at t = " << t
            << " (hermiticity " << herm << ", trace error " << tr_err
            << ", min eigenvalue " << min_eig << ", tol " << tol << ")";
        throw NumericalError(msg.str());
    }
}

}  // namespace

EvolutionResult evolve_master_equation(const ModelParams& p, const DensityMatrix& rho0,
                                       double t_max, std::vector<double> sample_times,
                                       const EvolveOptions& opts) {
    p.validate();
    if (!(t_max > 0.0)) throw std::invalid_argument("evolve_master_equation: t_max must be > 0");
    for (double t : sample_times)
        if (t < 0.0 || t > t_max)
            throw std::invalid_argument("evolve_master_equation: sample time outside [0, t_max]");
    std::sort(sample_times.begin(), sample_times.end());
    for (std::size_t i = 1; i < sample_times.size(); ++i)
        if (sample_times[i] == sample_times[i - 1])
            throw std::invalid_argument("evolve_master_equation: duplicate sample time");
    if (sample_times.empty() || sample_times.back() < t_max) sample_times.push_back(t_max);

    const MasterGenerator gen(p);
    auto rhs = [&gen](const ComplexMatrix& y, ComplexMatrix& out) { out = gen.apply(y); };

    EvolutionResult result;
    result.times = sample_times;
    result.battery_states.reserve(sample_times.size());
    result.reports.reserve(sample_times.size());

    ComplexMatrix rho = rho0.matrix();
    double t = 0.0;
    for (double ts : sample_times) {
        if (ts > t) {
            result.stats += rk45_advance(rhs, rho, t, ts, opts.ode);
            t = ts;
        }
        double min_eig = 0.0;
        check_sample(rho, ts, opts.validate_tol, &min_eig);
        result.min_eigenvalues.push_back(min_eig);

        ComplexMatrix battery = partial_trace(rho, {2, p.d}, 1);
        result.reports.push_back(ergotropy_split(battery, p.omega0));
        result.battery_states.emplace_back(std::move(battery), std::vector<int>{p.d},
                                           Unchecked{});
        if (opts.keep_joint_states)
            result.joint_states.emplace_back(rho, std::vector<int>{2, p.d}, Unchecked{});
    }
    return result;
}

double first_threshold_time(const std::function<double(double)>& energy_at, double threshold,
                            double t_max, double coarse_dt, double time_tol) {
    if (!(t_max > 0.0)) throw std::invalid_argument("first_threshold_time: t_max must be > 0");
    if (!(coarse_dt > 0.0)) coarse_dt = t_max / 2048.0;
    if (!(time_tol > 0.0)) time_tol = 1e-9 * t_max;

    double t_lo = 0.0;
    double e_lo = energy_at(0.0);
    if (e_lo >= threshold) return 0.0;

    double t_hi = 0.0;
    bool bracketed = false;
    while (t_hi < t_max) {
        t_hi = std::min(t_lo + coarse_dt, t_max);
        const double e_hi = energy_at(t_hi);
        if (e_hi >= threshold) {
            bracketed = true;
            break;
        }
        t_lo = t_hi;
        e_lo = e_hi;
    }
    if (!bracketed)
        throw NumericalError("first_threshold_time: horizon too short, threshold not reached");

    while (t_hi - t_lo > time_tol) {
        const double mid = 0.5 * (t_lo + t_hi);
        if (energy_at(mid) >= threshold)
            t_hi = mid;
        else
            t_lo = mid;
    }
    return t_hi;
}

double charging_time(const ModelParams& p, double epsilon, const DensityMatrix& rho0,
                     const ChargingOptions& opts) {
    p.validate();
    if (!(epsilon > 0.0) || !(epsilon < 1.0))
        throw std::invalid_argument("charging_time: epsilon must lie in (0, 1)");
    if (!(opts.t_max > 0.0)) throw std::invalid_argument("charging_time: t_max must be > 0");

    const DensityMatrix steady = steady_state_numeric(p);
    const double e_inf = battery_energy(partial_trace(steady.matrix(), {2, p.d}, 1), p.omega0);
    if (!(e_inf > 0.0))
        throw std::invalid_argument("charging_time: asymptotic battery energy is not positive");
    const double threshold = (1.0 - epsilon) * e_inf;

    const MasterGenerator gen(p);
    auto rhs = [&gen](const ComplexMatrix& y, ComplexMatrix& out) { out = gen.apply(y); };

    // Checkpointed evaluator: the march advances `state`; bisection queries
    // re-integrate from the retained bracket checkpoint.
    struct Checkpoint {
        double t;
        ComplexMatrix rho;
    };
    Checkpoint current{0.0, rho0.matrix()};
    Checkpoint bracket = current;

    auto energy_at = [&](double t) {
        if (t >= current.t) {
            if (t > current.t) {
                bracket = current;
                rk45_advance(rhs, current.rho, current.t, t, opts.ode);
                current.t = t;
            }
            return battery_energy(partial_trace(current.rho, {2, p.d}, 1), p.omega0);
        }
        // Backward query inside the bracketing interval.
        ComplexMatrix rho = bracket.rho;
        if (t > bracket.t) rk45_advance(rhs, rho, bracket.t, t, opts.ode);
        return battery_energy(partial_trace(rho, {2, p.d}, 1), p.omega0);
    };

    return first_threshold_time(energy_at, threshold, opts.t_max, opts.coarse_dt, opts.time_tol);
}

}  // namespace qbattery
