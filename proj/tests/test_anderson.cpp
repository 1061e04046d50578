#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ucplab/anderson.hpp"
#include "ucplab/operator.hpp"
#include "ucplab/rng.hpp"
#include "ucplab/ucp.hpp"

using namespace ucplab;

namespace {

Grid make_grid(int d, double side, int n, BoundaryCondition bc) {
    Grid g;
    g.box.d = d;
    g.box.side = side;
    g.box.bc = bc;
    g.n_per_side = n;
    return g;
}

// One gamma1 point per unit cell, exactly at the cell centers.
DeloneArrangement centered_arrangement(int d, int L, double delta) {
    BoxSpec window;
    window.d = d;
    window.side = L;
    window.bc = BoundaryCondition::Periodic;
    DeloneArrangement arr;
    arr.d = d;
    arr.M_tilde = 0.6;
    arr.M = 1;
    arr.delta = delta;
    for (const auto& k : lattice_sites(window, 1)) {
        std::vector<int> cell(k.data(), k.data() + d);
        arr.gamma1[cell] = k.cast<double>();
    }
    return arr;
}

DeloneAndersonModel lattice_model(int d, int L, double delta_minus = 0.3) {
    DeloneAndersonModel m;
    m.arrangement = centered_arrangement(d, L, delta_minus);
    m.delta_minus = delta_minus;
    m.delta_plus = delta_minus + 0.1;
    m.dist = CouplingDistribution::uniform(0.0, 1.0);
    return m;
}

}  // namespace

TEST_CASE("modulus of continuity") {
    const auto u = CouplingDistribution::uniform(-1.0, 1.0);
    CHECK(modulus_of_continuity(u, 0.5) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(modulus_of_continuity(u, 2.0) == 1.0);
    CHECK(modulus_of_continuity(u, 5.0) == 1.0);
    CHECK_THROWS_AS(modulus_of_continuity(u, 0.0), AndersonError);

    const auto b = CouplingDistribution::bernoulli(0.3, 0.0, 1.0);
    CHECK(modulus_of_continuity(b, 0.5) == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(modulus_of_continuity(b, 1.5) == 1.0);

    // sub-multiplicativity chain: s(eps) <= s(t eps) <= ceil(t) s(eps)
    for (double eps : {0.1, 0.3}) {
        for (double t : {1.5, 2.0, 3.7}) {
            const double s1 = modulus_of_continuity(u, eps);
            const double st = modulus_of_continuity(u, t * eps);
            CHECK(s1 <= st + 1e-12);
            CHECK(st <= std::ceil(t) * s1 + 1e-12);
        }
    }

    // truncated Gaussian against a direct scan oracle
    const auto g = CouplingDistribution::truncated_gaussian(0.2, 0.5, -1.0, 1.0);
    const double eps = 0.3;
    const auto cdf = [&](double x) { return 0.5 * std::erfc(-(x - 0.2) / (0.5 * std::sqrt(2.0))); };
    const double Z = cdf(1.0) - cdf(-1.0);
    double scan = 0.0;
    for (int i = 0; i <= 2000; ++i) {
        const double E = -1.0 + 2.0 * i / 2000.0;
        const double lo = std::max(-1.0, E - eps / 2), hi = std::min(1.0, E + eps / 2);
        if (hi > lo) scan = std::max(scan, (cdf(hi) - cdf(lo)) / Z);
    }
    CHECK(modulus_of_continuity(g, eps) == doctest::Approx(scan).epsilon(1e-6));
}

TEST_CASE("coupling samples are deterministic and in range") {
    const auto u = CouplingDistribution::uniform(-0.5, 2.0);
    for (int r = 0; r < 50; ++r) {
        const double v = u.sample(11, r, 3);
        CHECK(v >= -0.5);
        CHECK(v < 2.0);
        CHECK(v == u.sample(11, r, 3));
    }
    CHECK(u.support_bound() == 2.0);

    const auto b = CouplingDistribution::bernoulli(0.5, -1.0, 4.0);
    for (int s = 0; s < 50; ++s) {
        const double v = b.sample(3, 1, s);
        CHECK((v == -1.0 || v == 4.0));
    }

    const auto g = CouplingDistribution::truncated_gaussian(0.0, 1.0, -0.5, 0.5);
    for (int s = 0; s < 50; ++s) {
        const double v = g.sample(3, 1, s);
        CHECK(v >= -0.5);
        CHECK(v <= 0.5);
    }
}

TEST_CASE("model validation") {
    auto m = lattice_model(1, 5);
    CHECK_NOTHROW(m.validate());
    m.C_minus = 0.0;
    CHECK_THROWS_AS(m.validate(), AndersonError);
    m = lattice_model(1, 5);
    m.delta_plus = m.delta_minus;
    CHECK_THROWS_AS(m.validate(), AndersonError);
}

TEST_CASE("random potential sampling") {
    const int L = 5;
    const auto model = lattice_model(1, L);
    const Grid g = make_grid(1, L, 10 * L, BoundaryCondition::Periodic);

    auto [V1, rec1] = sample_potential(model, g, 7, 0);
    auto [V2, rec2] = sample_potential(model, g, 7, 0);
    CHECK((V1.values - V2.values).norm() == 0.0);  // bit-identical
    auto [V3, rec3] = sample_potential(model, g, 7, 1);
    CHECK((V1.values - V3.values).norm() != 0.0);

    REQUIRE(rec1.gamma1.size() == 5);
    CHECK(rec1.gamma2.empty());
    for (double w : rec1.gamma1) {
        CHECK(w >= 0.0);
        CHECK(w < 1.0);
    }

    // indicator profile: V is a plateau of height omega_k on each ball
    Eigen::VectorXd z = Eigen::VectorXd::Zero(1);
    for (Eigen::Index i = 0; i < V1.values.size(); ++i) {
        const Eigen::VectorXd x = g.node(i);
        if ((x - z).norm() < 0.25) CHECK(V1.values(i) == doctest::Approx(rec1.gamma1[2]));
    }
    CHECK(V1.values.maxCoeff() <= model.dist.support_bound() * model.C_plus + 1e-12);

    // zero couplings give the zero potential
    auto frozen = model;
    frozen.dist = CouplingDistribution::bernoulli(0.0, 0.0, 1.0);
    auto [V0f, rec0] = sample_potential(frozen, g, 7, 0);
    CHECK(V0f.values.norm() == 0.0);
}

TEST_CASE("frozen gamma1 potential dominates its balls") {
    const int L = 5;
    auto model = lattice_model(1, L);
    model.C_minus = 0.7;
    model.C_plus = 0.7;
    const Grid g = make_grid(1, L, 10 * L, BoundaryCondition::Periodic);
    const auto W = frozen_gamma1_potential(model, g);
    for (Eigen::Index i = 0; i < W.values.size(); ++i) {
        const Eigen::VectorXd x = g.node(i);
        bool in_ball = false;
        for (const auto& [cell, z] : model.arrangement.gamma1)
            if ((x - z).norm() < model.delta_minus) in_ball = true;
        if (in_ball)
            CHECK(W.values(i) == doctest::Approx(0.7).epsilon(1e-14));
        else
            CHECK(W.values(i) == 0.0);
    }

    // smooth profile stays within the assumption envelope
    model.profile = SingleSiteProfile::BumpBall;
    const auto Wb = frozen_gamma1_potential(model, g);
    for (Eigen::Index i = 0; i < Wb.values.size(); ++i) {
        CHECK(Wb.values(i) >= 0.0);
        CHECK(Wb.values(i) <= model.C_plus + 1e-14);
    }
}

TEST_CASE("wegner monte carlo") {
    const int L = 7;
    const auto model = lattice_model(1, L);
    const Grid g = make_grid(1, L, 10 * L, BoundaryCondition::Periodic);

    CHECK_THROWS_AS(wegner_mc(model, g, 0.1, {0.5}, 50, 1), AndersonError);
    CHECK_THROWS_AS(wegner_mc(model, g, 0.1, {0.1}, 1, 1), AndersonError);

    const std::vector<double> eps = {0.05, 0.1, 0.2};
    const auto t1 = wegner_mc(model, g, 0.1, eps, 60, 42, 1.0, 1);
    REQUIRE(t1.rows.size() == 3);
    CHECK(t1.dropped == 0);
    for (std::size_t i = 1; i < t1.rows.size(); ++i)
        CHECK(t1.rows[i].mean_count >= t1.rows[i - 1].mean_count);  // nested windows
    for (const auto& r : t1.rows) {
        CHECK(r.ci_lo <= r.mean_count);
        CHECK(r.mean_count <= r.ci_hi);
        CHECK(r.bound_all_E > 0.0);
    }

    // thread-count independence, bit for bit
    const auto t4 = wegner_mc(model, g, 0.1, eps, 60, 42, 1.0, 4);
    for (std::size_t i = 0; i < eps.size(); ++i) {
        CHECK(t1.rows[i].mean_count == t4.rows[i].mean_count);
        CHECK(t1.rows[i].ci_lo == t4.rows[i].ci_lo);
        CHECK(t1.rows[i].ci_hi == t4.rows[i].ci_hi);
    }
    CHECK(t1.loglog_slope == t4.loglog_slope);

    // frozen randomness: every realization identical, zero-width interval
    auto frozen = model;
    frozen.dist = CouplingDistribution::bernoulli(0.0, 0.5, 1.0);
    const auto tf = wegner_mc(frozen, g, 0.6, eps, 10, 1);
    for (const auto& r : tf.rows) {
        CHECK(r.ci_hi - r.ci_lo == 0.0);
        CHECK(r.mean_count == std::floor(r.mean_count));
    }
}

TEST_CASE("eigenvalue lifting") {
    const int L = 7;
    auto model = lattice_model(1, L);
    const Grid g = make_grid(1, L, 20 * L, BoundaryCondition::Periodic);
    std::vector<double> t_grid;
    for (int i = 0; i <= 5; ++i) t_grid.push_back(i / 5.0);
    const auto curve = eigenvalue_lift(model, g, t_grid);

    REQUIRE(curve.lambda.size() == 6);
    CHECK(curve.kappa_emp > 0.0);
    CHECK(curve.lambda[0] == doctest::Approx(0.0).epsilon(1e-9));  // free ground state
    for (std::size_t i = 1; i < curve.lambda.size(); ++i) {
        CHECK(curve.lambda[i] >= curve.lambda[i - 1] - 1e-12);  // W >= 0 lifts
        CHECK(curve.lambda[i] - curve.lambda[0] >=
              curve.kappa_emp * t_grid[i] * 0.95);  // linear floor
    }
    // concavity: second differences non-positive up to solver noise
    for (std::size_t i = 1; i + 1 < curve.lambda.size(); ++i)
        CHECK(curve.lambda[i + 1] - 2 * curve.lambda[i] + curve.lambda[i - 1] <= 1e-8);
    // Hellmann-Feynman residual at non-degenerate points
    for (std::size_t i = 0; i < curve.lambda.size(); ++i)
        if (curve.hf_valid[i])
            CHECK(std::abs(curve.hf_lhs[i] - curve.hf_rhs[i]) <=
                  1e-5 * (1.0 + std::abs(curve.lambda[i])));
}

TEST_CASE("uncertainty compression") {
    const int L = 7;
    const Grid g = make_grid(1, L, 10 * L, BoundaryCondition::Periodic);
    const auto H0 = build_hamiltonian(g, GridFunction::zero(g));

    SUBCASE("constant W compresses to a multiple of the identity") {
        const auto W = GridFunction::sample(g, [](const Eigen::VectorXd&) { return 0.8; });
        const auto res = uncertainty_check(H0, W, 0.5, 1.0);
        CHECK_FALSE(res.empty_projector);
        CHECK(res.projector_rank == count_in_interval(H0, -1e12, 0.5));
        CHECK(res.min_compression_eigenvalue == doctest::Approx(0.8).epsilon(1e-10));
        CHECK(res.ok);  // 0.8 >= (1 - 0.5) * 1.0
    }

    SUBCASE("parameter validation") {
        const auto W = GridFunction::sample(g, [](const Eigen::VectorXd&) { return 0.8; });
        CHECK_THROWS_AS(uncertainty_check(H0, W, 1.5, 1.0), AndersonError);
        CHECK_THROWS_AS(uncertainty_check(H0, W, 0.5, 0.0), AndersonError);
    }

    SUBCASE("lattice-ball W on the desk model") {
        const auto model = lattice_model(1, L);
        const auto W = frozen_gamma1_potential(model, g);
        const auto lift = eigenvalue_lift(model, g, {0.0, 0.5, 1.0});
        const auto res = uncertainty_check(H0, W, 0.5, lift.kappa_emp);
        CHECK_FALSE(res.empty_projector);
        CHECK(res.ok);
    }
}

TEST_CASE("spectral shift function") {
    const Grid g = make_grid(1, 3.0, 60, BoundaryCondition::Dirichlet);
    const auto H = build_hamiltonian(g, GridFunction::zero(g));
    const Eigen::MatrixXd H1(H.matrix);

    SUBCASE("zero perturbation") {
        const auto rec = ssf(H1, H1);
        for (int v : rec.xi) CHECK(v == 0);
        CHECK(rec.trace_identity_residual <= 1e-10);
    }

    SUBCASE("rank-one interlacing") {
        Eigen::MatrixXd H2 = H1;
        H2(10, 10) += 50.0;
        const auto rec = ssf(H1, H2);
        for (int v : rec.xi) {
            CHECK(v >= 0);
            CHECK(v <= 1);
        }
        CHECK(rec.trace_identity_residual <= 1e-8);
    }

    SUBCASE("rank-three PSD perturbation on a random pair") {
        CounterRng rng(91, 0);
        Eigen::MatrixXd A(50, 50);
        for (int i = 0; i < 50; ++i)
            for (int j = 0; j < 50; ++j) A(i, j) = rng.uniform(-1.0, 1.0);
        Eigen::MatrixXd S = 0.5 * (A + A.transpose());
        Eigen::MatrixXd U = Eigen::MatrixXd::Zero(50, 50);
        for (int r = 0; r < 3; ++r) {
            Eigen::VectorXd v(50);
            for (int i = 0; i < 50; ++i) v(i) = rng.uniform(-1.0, 1.0);
            U += v * v.transpose();
        }
        const auto rec = ssf(S, S + U);
        for (int v : rec.xi) {
            CHECK(v >= 0);
            CHECK(v <= 3);
        }
        CHECK(rec.trace_identity_residual <= 1e-8);
    }
}

TEST_CASE("partial-integration inequality") {
    const RhoSwitch rho(0.1);
    const auto phi_fn = [&](double x) { return static_cast<double>(rho(x - 0.05)); };

    SUBCASE("constant phi") {
        const auto rows = sme_check(CouplingDistribution::uniform(0.0, 1.0),
                                    [](double) { return 0.25; }, {0.05, 0.1});
        for (const auto& r : rows) {
            CHECK(r.lhs == doctest::Approx(0.0).epsilon(1e-12));
            CHECK(r.ok);
        }
    }

    SUBCASE("atom at zero saturates with s = 1") {
        const auto atom = CouplingDistribution::bernoulli(1.0, 0.0, 0.0);
        const auto rows = sme_check(atom, phi_fn, {0.05, 0.1, 0.2});
        for (const auto& r : rows) {
            CHECK(r.lhs == doctest::Approx(phi_fn(r.epsilon) - phi_fn(0.0)).epsilon(1e-12));
            CHECK(r.ok);
        }
    }

    SUBCASE("uniform coupling against the switch family") {
        // centers whose switch ramp covers the lower support edge keep the
        // inequality strict; fully interior ramps make it a tight equality
        // that quadrature error can cross at the 1e-10 scale
        const auto u = CouplingDistribution::uniform(0.0, 1.0);
        for (double center : {0.01, 0.05, 0.09}) {
            const auto f = [&, center](double x) { return static_cast<double>(rho(x - center)); };
            const auto rows = sme_check(u, f, {0.05, 0.1, 0.2});
            for (const auto& r : rows) CHECK(r.lhs <= r.rhs + 1e-10);
        }
    }
}
