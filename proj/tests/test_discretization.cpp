#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qcycle/discretization.hpp"
#include "support/test_models.hpp"

using namespace qcycle;

TEST_CASE("uniform grids: midpoints and weights") {
    ModelSpec m = testing::static_single();
    auto g1 = build_mode_grid(m.reservoirs[0], 0.4, GridScheme::Uniform, 1, 1.0);
    CHECK(g1.nodes[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(g1.weights[0] == doctest::Approx(1.0).epsilon(1e-15));

    auto g10 = build_mode_grid(m.reservoirs[0], 0.5, GridScheme::Uniform, 10, 10.0);
    for (int j = 0; j < 10; ++j) {
        CHECK(g10.nodes[j] == doctest::Approx(0.5 + j).epsilon(1e-15));
        CHECK(g10.weights[j] == doctest::Approx(1.0).epsilon(1e-15));
    }
    CHECK_THROWS_AS(build_mode_grid(m.reservoirs[0], 0.5, GridScheme::Uniform, 10, 0.9),
                    ConfigError);
}

TEST_CASE("gauss grid integrates u exactly") {
    ModelSpec m = testing::static_single();
    auto g = build_mode_grid(m.reservoirs[0], 0.5, GridScheme::GaussLegendre, 20, 5.0);
    double acc = 0.0, mass = 0.0;
    for (int j = 0; j < 20; ++j) {
        acc += g.weights[j] * g.nodes[j];
        mass += g.weights[j];
    }
    CHECK(acc == doctest::Approx(0.5 * 5.0 * 5.0).epsilon(1e-13));
    CHECK(mass == doctest::Approx(5.0).epsilon(1e-13));
    for (int j = 1; j < 20; ++j) CHECK(g.nodes[j] > g.nodes[j - 1]);
}

TEST_CASE("recurrence estimate") {
    ModelSpec m = testing::static_single();
    auto g = build_mode_grid(m.reservoirs[0], 0.5, GridScheme::Uniform, 400, 4.0);
    CHECK(recurrence_estimate(g) == doctest::Approx(2.0 * pi / 0.01).epsilon(1e-12));
    auto g2 = build_mode_grid(m.reservoirs[0], 0.5, GridScheme::Uniform, 800, 4.0);
    CHECK(recurrence_estimate(g2) == doctest::Approx(2.0 * recurrence_estimate(g)).epsilon(1e-12));
    auto g3 = build_mode_grid(m.reservoirs[0], 0.4, GridScheme::Uniform, 1, 1.0);
    CHECK(std::isinf(recurrence_estimate(g3)));
}

TEST_CASE("single-particle hamiltonian: structure, hermiticity, periodicity") {
    ModelSpec m = testing::driven_pair(1.0, 2.0, 0.12, 2.6, 0.5);
    DiscretizedModel dm = discretize(m, GridScheme::Uniform, 7, 3.0);
    CHECK(dm.dim() == 15);

    // g = 0: diagonal
    ModelSpec m0 = m;
    m0.g = 0.0;
    DiscretizedModel dm0 = discretize(m0, GridScheme::Uniform, 7, 3.0);
    auto h0 = dm0.single_particle_hamiltonian(0.4);
    CHECK((h0 - Eigen::MatrixXcd(h0.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0);
    CHECK(h0(0, 0).real() == doctest::Approx(1.0));

    for (double t : {0.0, 0.31, 1.7}) {
        auto h = dm.single_particle_hamiltonian(t);
        CHECK((h - h.adjoint()).cwiseAbs().maxCoeff() == 0.0);  // exact by construction
        auto hp = dm.single_particle_hamiltonian(t + 2.6);
        CHECK((h - hp).cwiseAbs().maxCoeff() < 1e-13);
    }
}

TEST_CASE("two-level rabi block has the closed-form eigenvalues") {
    // N = 2: impurity + one mode, constant coupling
    ModelSpec m = testing::static_single(1.0, 0.3, 2.0, 1.0);
    DiscretizedModel dm = discretize(m, GridScheme::Uniform, 1, 1.6);
    auto h = dm.single_particle_hamiltonian(0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    const double eps = 1.0, u = 0.8;
    const double lam = std::abs(h(0, 1));
    const double mid = 0.5 * (eps + u), half = std::sqrt(0.25 * (eps - u) * (eps - u) + lam * lam);
    CHECK(es.eigenvalues()(0) == doctest::Approx(mid - half).epsilon(1e-13));
    CHECK(es.eigenvalues()(1) == doctest::Approx(mid + half).epsilon(1e-13));
}

TEST_CASE("coupling consistency: weighted sums converge to the integral") {
    // sum_j |lambda_j|^2 ~ g^2 |h(t)|^2 int m phi^2 du, first order in du
    ModelSpec m = testing::static_single(1.0, 0.2, 2.0, 1.4);
    const auto& prof = m.reservoirs[0].form_factor.radial;
    // cutoff where the integrand still has slope, so the midpoint error is visible
    const double umax = 2.5;
    double ref = 0.0;
    const int NF = 2000000;
    for (int j = 0; j < NF; ++j) {
        const double u = (j + 0.5) * umax / NF;
        ref += prof.measure(u) * prof.phi(u) * prof.phi(u) * (umax / NF);
    }
    ref *= m.g * m.g;
    auto err_at = [&](int M) {
        DiscretizedModel dm = discretize(m, GridScheme::Uniform, M, umax);
        const double s = m.g * m.g * dm.radial_coupling().squaredNorm();
        return std::abs(s - ref);
    };
    const double e1 = err_at(100), e2 = err_at(200);
    CHECK(e1 / e2 > 1.9);  // at least first-order shrinkage under refinement
    CHECK(e2 < 1e-4 * ref + 1e-12);
}

TEST_CASE("discretization hash is deterministic and sensitive") {
    ModelSpec m = testing::driven_pair(1.0, 2.0, 0.12, 2.6, 0.5);
    DiscretizedModel a = discretize(m, GridScheme::Uniform, 9, 3.0);
    DiscretizedModel b = discretize(m, GridScheme::Uniform, 9, 3.0);
    CHECK(a.hash() == b.hash());
    DiscretizedModel c = discretize(m, GridScheme::Uniform, 10, 3.0);
    CHECK(a.hash() != c.hash());
}
