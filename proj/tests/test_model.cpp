#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "qbattery/model.hpp"
#include "qbattery/ops.hpp"
#include "test_support.hpp"

using namespace qbattery;

TEST_CASE("battery operators") {
    auto [n2, b2] = battery_operators(2);
    CHECK(n2(0, 0) == Complex(0.0));
    CHECK(n2(1, 1) == Complex(1.0));
    CHECK(b2(0, 1) == Complex(1.0));
    CHECK(b2.cwiseAbs().sum() == doctest::Approx(1.0));  // single entry |0><1|

    auto [n20, b20] = battery_operators(20);
    // B annihilates the bottom rung.
    ComplexVector bottom = ComplexVector::Zero(20);
    bottom(0) = 1.0;
    CHECK((b20 * bottom).norm() == doctest::Approx(0.0));
    // Ladder commutator [N, B] = -B, exact for integer-structured matrices.
    CHECK(approx_equal(n20 * b20 - b20 * n20, ComplexMatrix(-b20), 0.0));

    CHECK_THROWS_AS(battery_operators(1), std::invalid_argument);
}

TEST_CASE("qubit algebra in the [g, e] basis") {
    CHECK(approx_equal(sigma_plus() + sigma_minus(), sigma_x(), 0.0));
    ComplexMatrix comm = sigma_x() * sigma_y() - sigma_y() * sigma_x();
    CHECK(approx_equal(comm, ComplexMatrix(Complex(0, 2) * sigma_z()), 1e-15));
    CHECK(approx_equal(ComplexMatrix(sigma_plus() * sigma_minus()),
                       ComplexMatrix(0.5 * (ComplexMatrix::Identity(2, 2) + sigma_z())),
                       1e-15));
}

TEST_CASE("interaction Hamiltonian") {
    ModelParams p;
    p.d = 6;
    p.g = 1.7;
    ComplexMatrix h_int = interaction_hamiltonian(p);
    CHECK(approx_equal(h_int, h_int.adjoint(), 1e-15));

    // Resonance: [H_0, H_int] = 0 exactly at delta_B = 0.
    ComplexMatrix h0 = bare_hamiltonian(p);
    CHECK(approx_equal(h0 * h_int - h_int * h0, ComplexMatrix::Zero(12, 12), 0.0));

    ModelParams p0 = p;
    p0.g = 0.0;
    CHECK(approx_equal(interaction_hamiltonian(p0), ComplexMatrix::Zero(12, 12), 0.0));

    // <e,0|H_int|g,1> = g: charger-first ordering, |e,0> index d, |g,1> index 1.
    CHECK(h_int(p.d, 1) == Complex(p.g));
}

TEST_CASE("rotating frame Hamiltonian") {
    ModelParams p;
    p.d = 2;
    p.g = 0.8;
    p.delta_B = p.g;

    ComplexMatrix h = rotating_frame_hamiltonian(p, 0.0);
    CHECK(approx_equal(h, h.adjoint(), 1e-15));

    ModelParams resonant = p;
    resonant.delta_B = 0.0;
    CHECK(approx_equal(rotating_frame_hamiltonian(resonant, 0.0),
                       interaction_hamiltonian(resonant), 0.0));

    // Eigenvalues against a hand-assembled 4x4 (brute-force oracle).
    ComplexMatrix manual = ComplexMatrix::Zero(4, 4);
    // Basis ordering |g,0>, |g,1>, |e,0>, |e,1>; delta_B N on the battery.
    manual(1, 1) = p.delta_B;
    manual(3, 3) = p.delta_B;
    manual(1, 2) = p.g;  // |g,1> <-> |e,0|
    manual(2, 1) = p.g;
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> ours(h, Eigen::EigenvaluesOnly);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> ref(manual, Eigen::EigenvaluesOnly);
    CHECK((ours.eigenvalues() - ref.eigenvalues()).cwiseAbs().maxCoeff() < 1e-12);

    // Random-parameter Hermiticity.
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    for (int it = 0; it < 10; ++it) {
        ModelParams q;
        q.d = 5;
        q.delta_B = dist(gen);
        q.g = dist(gen);
        ComplexMatrix hq = rotating_frame_hamiltonian(q, dist(gen));
        CHECK(approx_equal(hq, hq.adjoint(), 1e-14));
    }
}

TEST_CASE("markovian generator limits") {
    // f = 0, nbar = 0: drive + bare decay only (Eq. of the undriven cascade),
    // assembled independently term by term.
    ModelParams p;
    p.d = 3;
    p.f = 0.0;
    p.Omega0 = 0.4;
    p.eta_c = 0.8;
    p.eta_d = 0.9;
    JointOps ops(p);
    Superoperator L = markovian_generator(p);
    std::vector<GeneratorTerm> expected_terms{GeneratorTerm::dissipator(p.Gamma, ops.sm)};
    Superoperator expected =
        vectorize_generator(ops.h_int + p.Omega0 * ops.sy, expected_terms);
    CHECK(approx_equal(L.matrix, expected.matrix, 1e-12));

    // nbar = 0, eta_c = 1: total sigma_- decay rate is Gamma, independent of
    // the eta split between collection and detection.
    ModelParams q;
    q.d = 3;
    q.f = 0.7;
    q.eta_c = 1.0;
    q.eta_d = 0.3;
    JointOps qops(q);
    std::vector<GeneratorTerm> eq11{
        GeneratorTerm::feedback_cross(q.f, qops.sy, qops.sm),
        GeneratorTerm::dissipator(q.f * q.f / (q.eta() * q.Gamma), qops.sy),
        GeneratorTerm::dissipator(q.Gamma, qops.sm)};
    Superoperator ref11 = vectorize_generator(qops.h_int + q.Omega0 * qops.sy, eq11);
    CHECK(approx_equal(markovian_generator(q).matrix, ref11.matrix, 1e-12));
}

TEST_CASE("markovian generator trace and hermiticity preservation") {
    ModelParams p;
    p.d = 4;
    p.f = 0.6;
    p.eta_c = 0.7;
    p.eta_d = 0.8;
    p.nbar = 0.5;
    p.Omega0 = 0.2;
    p.delta_B = 0.3;
    Superoperator L = markovian_generator(p);

    std::mt19937_64 gen(21);
    for (int it = 0; it < 50; ++it) {
        ComplexMatrix rho = test::random_density(8, gen);
        ComplexMatrix out = L.apply(rho);
        CHECK(std::abs(out.trace()) < 1e-12);
        CHECK((out - out.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("parameter validation") {
    ModelParams p;
    p.omega0 = 0.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);

    ModelParams q;
    q.eta_c = 1.2;
    CHECK_THROWS_AS(q.validate(), std::invalid_argument);

    ModelParams r;
    r.f = 0.5;
    r.eta_d = 0.0;  // divergent feedback-noise rate
    CHECK_THROWS_AS(r.validate(), std::invalid_argument);

    ModelParams s;
    s.d = 1;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}
