#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "qbattery/energetics.hpp"
#include "qbattery/ops.hpp"
#include "qbattery/steady_state.hpp"
#include "test_support.hpp"

using namespace qbattery;

namespace {

ModelParams inversion_params(double f_over_gamma, double eta, int d) {
    ModelParams p;
    p.d = d;
    p.Omega0 = 0.0;
    p.f = f_over_gamma * p.Gamma;
    p.eta_c = p.eta_d = std::sqrt(eta);
    return p;
}

}  // namespace

TEST_CASE("stationary inversion formula") {
    // f = Gamma: <sigma_z> = eta / (2 - eta).
    CHECK(steady_sigma_z(inversion_params(1.0, 0.3, 2)) ==
          doctest::Approx(0.3 / 1.7).epsilon(1e-12));
    CHECK(steady_sigma_z(inversion_params(1.0, 1.0, 2)) == doctest::Approx(1.0));
    // f = Gamma/2: inversion changes sign.
    CHECK(steady_sigma_z(inversion_params(0.5, 0.6, 2)) == doctest::Approx(0.0));

    ModelParams driven = inversion_params(1.0, 0.5, 2);
    driven.Omega0 = 0.1;
    CHECK_THROWS_AS(steady_sigma_z(driven), std::invalid_argument);
}

TEST_CASE("stationary inversion from the generator null space") {
    ModelParams p = inversion_params(1.0, 0.3, 2);
    DensityMatrix rho = steady_state_numeric(p);
    JointOps ops(p);
    const ComplexMatrix sz = tensor_product(sigma_z(), ComplexMatrix::Identity(p.d, p.d));
    const double sz_val = (rho.matrix() * sz).trace().real();
    CHECK(sz_val == doctest::Approx(0.3 / 1.7).epsilon(1e-9));
}

TEST_CASE("optimal feedback gain") {
    ModelParams p;
    p.Omega0 = 0.0;
    CHECK(optimal_feedback_gain(p) == doctest::Approx(p.Gamma));

    ModelParams thermal;
    thermal.nbar = 2.0;
    thermal.eta_c = thermal.eta_d = 0.7;
    // (Gamma/2) (1 + sqrt(1 + 4*2*0.3*0.49))
    CHECK(optimal_feedback_gain(thermal) ==
          doctest::Approx(0.5 * (1.0 + std::sqrt(1.0 + 4.0 * 2.0 * 0.3 * 0.49)))
              .epsilon(1e-12));

    // Grid-search oracle: f* maximises steady_sigma_z over a 200-point grid.
    std::mt19937_64 gen(17);
    std::uniform_real_distribution<double> nbar_dist(0.0, 3.0);
    std::uniform_real_distribution<double> eta_dist(0.2, 1.0);
    for (int it = 0; it < 20; ++it) {
        ModelParams q;
        q.nbar = nbar_dist(gen);
        q.eta_c = eta_dist(gen);
        q.eta_d = eta_dist(gen);
        const double f_star = optimal_feedback_gain(q);
        ModelParams at_star = q;
        at_star.f = f_star;
        const double best = steady_sigma_z(at_star);
        for (int k = 0; k < 200; ++k) {
            ModelParams trial = q;
            trial.f = (0.5 + 2.5 * double(k) / 199.0) * q.Gamma;
            CHECK(steady_sigma_z(trial) <= best + 1e-12);
        }
    }
}

TEST_CASE("analytic steady battery state") {
    // f = Gamma, eta = 0.3: R = (1 - eta)^{-1} = 10/7.
    ModelParams p = inversion_params(1.0, 0.3, 20);
    SteadyAnalytic ss = steady_battery_analytic(p);
    CHECK(ss.R == doctest::Approx(10.0 / 7.0).epsilon(1e-12));
    // E from Eq. of the geometric family, evaluated independently here.
    const double R = 10.0 / 7.0;
    const double e_ref = 20.0 * std::pow(R, 20) / (std::pow(R, 20) - 1.0) - R / (R - 1.0);
    CHECK(ss.energy == doctest::Approx(e_ref).epsilon(1e-12));
    CHECK(ss.energy / p.e_max() == doctest::Approx(0.8780).epsilon(2e-4));
    CHECK(ss.ergotropy == doctest::Approx(2.0 * e_ref - 19.0).epsilon(1e-12));

    // Populations geometric with ratio R.
    for (int n = 1; n < p.d; ++n)
        CHECK(ss.populations[n] / ss.populations[n - 1] == doctest::Approx(R).epsilon(1e-10));

    // Perfect efficiency: R -> inf, full charge.
    SteadyAnalytic perfect = steady_battery_analytic(inversion_params(1.0, 1.0, 20));
    CHECK(perfect.energy == doctest::Approx(19.0));
    CHECK(perfect.ergotropy == doctest::Approx(19.0));

    // R -> 1 limit: uniform populations, E = omega0 (d-1)/2, no ergotropy.
    ModelParams flat = inversion_params(0.5, 0.8, 12);
    SteadyAnalytic uniform = steady_battery_analytic(flat);
    CHECK(uniform.energy == doctest::Approx(5.5).epsilon(1e-9));
    CHECK(uniform.ergotropy == doctest::Approx(0.0));

    // Eq. (19) linear relation on the R > 1 branch.
    for (double f_rel : {0.6, 0.8, 1.0, 1.4, 2.0}) {
        SteadyAnalytic a = steady_battery_analytic(inversion_params(f_rel, 0.7, 15));
        if (a.R > 1.0)
            CHECK(a.ergotropy ==
                  doctest::Approx(2.0 * a.energy - 14.0).epsilon(1e-10));
    }
}

TEST_CASE("numeric steady state matches the analytic family") {
    ModelParams p = inversion_params(1.0, 0.3, 12);
    SteadyAnalytic analytic = steady_battery_analytic(p);
    DensityMatrix rho = steady_state_numeric(p);
    ComplexMatrix battery = partial_trace(rho.matrix(), {2, p.d}, 1);

    // Product ansatz: joint off-diagonals vanish, battery populations geometric.
    for (int n = 0; n < p.d; ++n)
        CHECK(battery(n, n).real() ==
              doctest::Approx(analytic.populations[n]).epsilon(1e-8));
    ComplexMatrix off = rho.matrix();
    off.diagonal().setZero();
    CHECK(off.cwiseAbs().maxCoeff() < 1e-8);

    CHECK(battery_energy(battery, p.omega0) ==
          doctest::Approx(analytic.energy).epsilon(1e-8));
    CHECK(ergotropy(battery, p.omega0) == doctest::Approx(analytic.ergotropy).epsilon(1e-8));
}

TEST_CASE("steady state is independent of the detuning") {
    ModelParams p = inversion_params(1.0, 0.49, 8);
    DensityMatrix resonant = steady_state_numeric(p);
    ModelParams q = p;
    q.delta_B = q.g;
    DensityMatrix detuned = steady_state_numeric(q);
    CHECK(trace_distance(resonant.matrix(), detuned.matrix()) < 1e-8);
}

TEST_CASE("thermal monotonicity under the optimal gain") {
    double prev_e = 1e300, prev_erg = 1e300;
    for (double nbar : {0.0, 0.5, 1.0, 2.0, 3.0}) {
        ModelParams p;
        p.d = 20;
        p.eta_c = p.eta_d = 0.7;
        p.nbar = nbar;
        p.f = optimal_feedback_gain(p);
        SteadyAnalytic ss = steady_battery_analytic(p);
        CHECK(ss.energy <= prev_e + 1e-12);
        CHECK(ss.ergotropy <= prev_erg + 1e-12);
        prev_e = ss.energy;
        prev_erg = ss.ergotropy;
    }
}

TEST_CASE("degenerate generator is rejected") {
    // g = 0 conserves every battery population: the null space is d-fold.
    ModelParams p;
    p.d = 4;
    p.g = 0.0;
    p.f = 0.0;
    CHECK_THROWS_AS(steady_state_numeric(p), NumericalError);
}

TEST_CASE("residual reporting") {
    ModelParams p = inversion_params(1.2, 0.5, 6);
    SteadyOptions opts;
    DensityMatrix rho = steady_state_numeric(p, &opts);
    CHECK(opts.residual < 1e-10);
    CHECK(rho.min_eigenvalue() > -1e-10);
}
