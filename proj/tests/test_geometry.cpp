#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "ucplab/geometry.hpp"

using namespace ucplab;

namespace {

BoxSpec centered_box(int d, double side, BoundaryCondition bc = BoundaryCondition::Periodic) {
    BoxSpec b;
    b.d = d;
    b.side = side;
    b.bc = bc;
    return b;
}

std::vector<Eigen::VectorXd> integer_lattice(int d, int half) {
    std::vector<Eigen::VectorXd> pts;
    if (d == 1) {
        for (int i = -half; i <= half; ++i) {
            Eigen::VectorXd p(1);
            p << i;
            pts.push_back(p);
        }
    } else {
        for (int i = -half; i <= half; ++i)
            for (int j = -half; j <= half; ++j) {
                Eigen::VectorXd p(2);
                p << i, j;
                pts.push_back(p);
            }
    }
    return pts;
}

}  // namespace

TEST_CASE("lattice_sites decompositions") {
    const auto s1 = lattice_sites(centered_box(1, 3.0), 1);
    REQUIRE(s1.size() == 3);
    std::set<int> got;
    for (const auto& k : s1) got.insert(k(0));
    CHECK(got == std::set<int>{-1, 0, 1});

    CHECK(lattice_sites(centered_box(2, 5.0), 1).size() == 25);

    const auto s3 = lattice_sites(centered_box(2, 9.0), 3);
    REQUIRE(s3.size() == 9);
    for (const auto& k : s3) {
        CHECK(k(0) % 3 == 0);
        CHECK(k(1) % 3 == 0);
    }

    CHECK_THROWS_WITH_AS(lattice_sites(centered_box(1, 4.0), 1),
                         doctest::Contains("IncommensurateBox"), GeometryError);
    CHECK_THROWS_AS(lattice_sites(centered_box(1, 4.5), 1), GeometryError);
}

TEST_CASE("validate_delone detects crowding and empty cells") {
    const auto window = centered_box(2, 5.0);
    auto pts = integer_lattice(2, 2);
    CHECK_FALSE(validate_delone(pts, 0.5, 1, window).has_value());

    auto crowded = pts;
    Eigen::VectorXd extra(2);
    extra << 0.1, 0.0;
    crowded.push_back(extra);
    const auto v = validate_delone(crowded, 0.5, 1, window);
    REQUIRE(v.has_value());
    CHECK(v->what == "too crowded");
    CHECK(v->count == 2);

    // (2Z)^2 leaves unit boxes empty
    std::vector<Eigen::VectorXd> sparse;
    for (int i = -2; i <= 2; i += 2)
        for (int j = -2; j <= 2; j += 2) {
            Eigen::VectorXd p(2);
            p << i, j;
            sparse.push_back(p);
        }
    const auto e = validate_delone(sparse, 0.5, 1, window);
    REQUIRE(e.has_value());
    CHECK(e->what == "empty cell");
    CHECK(e->count == 0);
}

TEST_CASE("generate_delone is deterministic and valid") {
    const auto window = centered_box(2, 5.0);
    const auto a = generate_delone(2, 0.9, 1, window, 7);
    CHECK_FALSE(validate_delone(a.all_points(), 0.9, 1, window).has_value());
    CHECK(a.gamma1.size() == 25);
    CHECK(a.gamma2.empty());

    const auto b = generate_delone(2, 0.9, 1, window, 7);
    REQUIRE(b.gamma1.size() == a.gamma1.size());
    for (const auto& [cell, z] : a.gamma1) CHECK((b.gamma1.at(cell) - z).norm() == 0.0);

    CHECK_THROWS_WITH_AS(generate_delone(2, 1.5, 1, window, 7),
                         doctest::Contains("DeloneInfeasible"), GeometryError);
}

TEST_CASE("generate_delone property sweep over seeds") {
    const auto window = centered_box(1, 9.0);
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto a = generate_delone(1, 0.6, 1, window, seed, 0.2, 1);
        CHECK_FALSE(validate_delone(a.all_points(), 0.6, 1, window).has_value());
    }
}

TEST_CASE("split_delone assigns one gamma1 point per cell") {
    const auto window = centered_box(2, 5.0);
    auto pts = integer_lattice(2, 2);
    const auto pure = split_delone(pts, 0.5, 1, window, 0.2);
    CHECK(pure.gamma1.size() == 25);
    CHECK(pure.gamma2.empty());

    Eigen::VectorXd extra(2);
    extra << 0.4, 0.3;
    pts.push_back(extra);
    const auto mixed = split_delone(pts, 0.2, 1, window, 0.2);
    CHECK(mixed.gamma1.size() == 25);
    REQUIRE(mixed.gamma2.size() == 1);
    CHECK((mixed.gamma2[0] - extra).norm() == 0.0);
    // lexicographic tie-break: (0,0) stays in gamma1, (0.4,0.3) spills over
    CHECK(mixed.gamma1.at({0, 0})(0) == 0.0);

    CHECK(mixed.n_tilde() == 25);  // ceil(1/0.2)^2

    std::vector<Eigen::VectorXd> gap = integer_lattice(2, 2);
    gap.erase(gap.begin());  // remove one lattice point -> empty cell
    CHECK_THROWS_WITH_AS(split_delone(gap, 0.5, 1, window, 0.2),
                         doctest::Contains("NotDelone"), GeometryError);
}

TEST_CASE("ball_in_cell") {
    Eigen::VectorXd z(2);
    z << 0.1, -0.1;
    CHECK(ball_in_cell(z, {0, 0}, 1, 0.3));
    CHECK_FALSE(ball_in_cell(z, {0, 0}, 1, 0.45));
}

TEST_CASE("right_near_neighbor worked examples") {
    SiteIndex k2(2);
    k2 << 0, 0;
    const auto a = right_near_neighbor(k2, 7, BoundaryCondition::Periodic);
    CHECK(a.k_plus(0) == 3);  // ceil(sqrt(2)) + 1 = 3
    CHECK(a.k_plus(1) == 0);

    k2 << 3, 0;
    const auto b = right_near_neighbor(k2, 7, BoundaryCondition::Dirichlet);
    CHECK(b.k_plus(0) == 6);
    CHECK(b.k_plus_minus(0) == 1);  // mirror: 7 - 6
    CHECK(b.mirrored);

    SiteIndex k1(1);
    k1 << -3;
    const auto c = right_near_neighbor(k1, 7, BoundaryCondition::Periodic);
    CHECK(c.k_plus(0) == -1);
}

TEST_CASE("near-neighbor injectivity and Dirichlet multiplicity") {
    for (int d : {1, 2, 3}) {
        for (int L = 5; L <= 21; L += 2) {
            const auto sites = lattice_sites(centered_box(d, L), 1);
            std::set<std::vector<int>> periodic_images;
            std::map<std::vector<int>, int> dirichlet_images;
            for (const auto& k : sites) {
                const auto p = right_near_neighbor(k, L, BoundaryCondition::Periodic);
                std::vector<int> img(p.k_plus.data(), p.k_plus.data() + d);
                CHECK(periodic_images.insert(img).second);  // bijection on the torus
                const int half = (L - 1) / 2;
                for (int axis = 0; axis < d; ++axis) {
                    CHECK(p.k_plus(axis) >= -half);
                    CHECK(p.k_plus(axis) <= half);
                }
                const auto q = right_near_neighbor(k, L, BoundaryCondition::Dirichlet);
                std::vector<int> dimg(q.k_plus_minus.data(), q.k_plus_minus.data() + d);
                ++dirichlet_images[dimg];
                CHECK(q.k_plus_minus(0) >= -half);
                CHECK(q.k_plus_minus(0) <= half);
            }
            CHECK(periodic_images.size() == sites.size());
            for (const auto& [img, mult] : dirichlet_images) CHECK(mult <= 2);
        }
    }
}

TEST_CASE("reflect_extend_points") {
    Eigen::VectorXd p(1);
    p << 0.2;
    const auto ext = reflect_extend_points({p}, 1.0);
    REQUIRE(ext.size() == 2);
    bool has_pos = false, has_neg = false;
    for (const auto& q : ext) {
        if (q(0) == 0.2) has_pos = true;
        if (q(0) == -0.2) has_neg = true;
    }
    CHECK(has_pos);
    CHECK(has_neg);

    // d=2: cardinality <= 2^d per point, closed under negation mod 2L
    std::vector<Eigen::VectorXd> pts;
    Eigen::VectorXd a(2), b(2);
    a << 0.3, 0.7;
    b << 1.5, 0.25;
    pts.push_back(a);
    pts.push_back(b);
    const double L = 2.0;
    const auto ext2 = reflect_extend_points(pts, L);
    CHECK(ext2.size() <= 4 * pts.size());
    for (const auto& q : ext2) {
        for (int mask = 1; mask < 4; ++mask) {
            Eigen::VectorXd r = q;
            for (int i = 0; i < 2; ++i)
                if (mask & (1 << i)) r(i) = -r(i);
            // wrap into [-L, L)
            for (int i = 0; i < 2; ++i) {
                while (r(i) >= L) r(i) -= 2 * L;
                while (r(i) < -L) r(i) += 2 * L;
            }
            bool found = false;
            for (const auto& s : ext2)
                if ((s - r).lpNorm<Eigen::Infinity>() < 1e-12) found = true;
            CHECK(found);
        }
    }
}
