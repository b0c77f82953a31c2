#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "otlab/projections.hpp"
#include "otlab/transport.hpp"

using namespace otlab;

TEST_CASE("subspace validation") {
    CHECK_THROWS_AS(linear_span(2, {Vec{1.0, 0.0}, Vec{2.0, 0.0}}), DomainError);
    AffineSubspace point = make_subspace({1.0, 2.0}, {});
    CHECK(point.rank() == 0);
}

TEST_CASE("project_point: Euclidean orthogonal projection") {
    AffineSubspace diag = linear_span(2, {Vec{1.0, 1.0}});
    Vec p = project_point({1.0, 0.0}, diag, NormSpec::euclidean(), 2.0);
    CHECK(p[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(p[1] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("project_point rejects non-strictly-convex norms") {
    AffineSubspace axis = linear_span(2, {Vec{1.0, 0.0}});
    CHECK_THROWS_AS(project_point({1.0, 1.0}, axis, NormSpec::linf(), 2.0), DomainError);
    CHECK_THROWS_AS(project_point({1.0, 1.0}, axis, NormSpec::l1(), 1.0), DomainError);
}

TEST_CASE("project_point: l4 diagonal line witnesses") {
    NormSpec l4 = NormSpec::lq(4.0);
    AffineSubspace L = linear_span(3, {Vec{1.0, 1.0, 1.0}});

    // (1,-1,0) projects to the origin: its coordinate cubes sum to zero
    Vec p1 = project_point({1.0, -1.0, 0.0}, L, l4, 2.0);
    CHECK(norm2(p1) <= 1e-9);

    // (1,-2,1) has cube sum -6, so its projection is off the origin
    Vec p2 = project_point({1.0, -2.0, 1.0}, L, l4, 2.0);
    CHECK(norm2(p2) > 1e-4);
}

TEST_CASE("project_point idempotence") {
    Rng rng(31);
    NormSpec l3 = NormSpec::lq(3.0);
    AffineSubspace L = linear_span(3, {Vec{1.0, 0.0, 1.0}, Vec{0.0, 1.0, -1.0}});
    for (int trial = 0; trial < 20; ++trial) {
        Vec x = rng.gaussian_vec(3);
        Vec p = project_point(x, L, l3, 2.0);
        Vec pp = project_point(p, L, l3, 2.0);
        CHECK(dist2(p, pp) <= 1e-9);
    }
}

TEST_CASE("project_measure: drop the off-subspace coordinate") {
    NormSpec eu = NormSpec::euclidean();
    AffineSubspace xaxis = linear_span(2, {Vec{1.0, 0.0}});
    DiscreteMeasure mu = make_measure(2, {Atom{{1.0, 0.0}, 0.5}, Atom{{0.0, 1.0}, 0.5}});
    DiscreteMeasure hat = project_measure(mu, xaxis, eu, 2.0);
    CHECK(measure_equal(hat,
                        make_measure(2, {Atom{{1.0, 0.0}, 0.5}, Atom{{0.0, 0.0}, 0.5}})));

    DiscreteMeasure on = make_measure(2, {Atom{{1.0, 0.0}, 0.4}, Atom{{-2.0, 0.0}, 0.6}});
    CHECK(measure_equal(project_measure(on, xaxis, eu, 2.0), on));
}

TEST_CASE("project_measure minimality against random competitors") {
    Rng rng(32);
    NormSpec l3 = NormSpec::lq(3.0);
    AffineSubspace L = linear_span(2, {Vec{1.0, 0.0}});
    DiscreteMeasure mu = make_measure(
        2, {Atom{{0.3, 1.0}, 0.3}, Atom{{-1.0, 0.5}, 0.25}, Atom{{2.0, -1.5}, 0.45}});
    DiscreteMeasure hat = project_measure(mu, L, l3, 2.0);
    double d_hat = solve(mu, hat, l3, 2.0).distance;
    for (int c = 0; c < 20; ++c) {
        std::vector<Atom> atoms;
        int m = 1 + rng.uniform_int(3);
        double sum = 0.0;
        for (int i = 0; i < m; ++i) {
            atoms.push_back(Atom{{rng.uniform(-3.0, 3.0), 0.0}, rng.uniform(0.2, 1.0)});
            sum += atoms.back().weight;
        }
        for (Atom& a : atoms) a.weight /= sum;
        DiscreteMeasure comp;
        try {
            comp = make_measure(2, atoms);
        } catch (const DomainError&) {
            continue;
        }
        CHECK(solve(mu, comp, l3, 2.0).distance >= d_hat - 1e-9);
    }
}

TEST_CASE("kernel_membership") {
    NormSpec l4 = NormSpec::lq(4.0);
    AffineSubspace L = linear_span(3, {Vec{1.0, 1.0, 1.0}});
    CHECK(kernel_membership({0.0, -1.0, 1.0}, L, l4, 2.0));
    CHECK(kernel_membership({0.0, 0.0, 0.0}, L, l4, 2.0));
    CHECK_FALSE(kernel_membership({1.0, 1.0, 1.0}, L, l4, 2.0));
    CHECK_FALSE(kernel_membership({1.0, -2.0, 1.0}, L, l4, 2.0));
}

TEST_CASE("max_subspace_in_kernel") {
    // Euclidean, L the x-axis in the plane: the kernel is the y-axis
    AffineSubspace xaxis = linear_span(2, {Vec{1.0, 0.0}});
    AffineSubspace k1 =
        max_subspace_in_kernel(xaxis, NormSpec::euclidean(), 2.0, {Vec{0.0, 1.0}});
    CHECK(k1.rank() == 1);
    CHECK(std::abs(k1.directions[0][1]) == doctest::Approx(1.0).epsilon(1e-12));

    // l3, L the e1 axis in R^3: the kernel is the coordinate hyperplane x1 = 0
    AffineSubspace e1 = linear_span(3, {Vec{1.0, 0.0, 0.0}});
    AffineSubspace k2 =
        max_subspace_in_kernel(e1, NormSpec::lq(3.0), 2.0, {Vec{0.0, 1.0, 0.0}});
    CHECK(k2.rank() == 2);
    for (const Vec& d : k2.directions) CHECK(std::abs(d[0]) <= 1e-8);

    // l4, L the diagonal: the cubic surface contains lines but no planes
    AffineSubspace diag = linear_span(3, {Vec{1.0, 1.0, 1.0}});
    AffineSubspace k3 =
        max_subspace_in_kernel(diag, NormSpec::lq(4.0), 2.0, {Vec{1.0, -1.0, 0.0}});
    CHECK(k3.rank() == 1);

    CHECK_THROWS_AS(
        max_subspace_in_kernel(diag, NormSpec::lq(4.0), 2.0, {Vec{1.0, 1.0, 1.0}}),
        DomainError);
}

TEST_CASE("projection lemma identities, sampled") {
    Rng rng(33);
    const std::vector<NormSpec> specs = {NormSpec::euclidean(), NormSpec::lq(3.0),
                                         NormSpec::lq(4.0)};
    for (int trial = 0; trial < 30; ++trial) {
        const NormSpec& spec = specs[static_cast<size_t>(trial) % specs.size()];
        AffineSubspace L = linear_span(2, {Vec{rng.uniform(0.5, 1.0), rng.uniform(-1.0, 1.0)}});
        Vec x = rng.gaussian_vec(2);
        double lambda = rng.uniform(-2.0, 2.0);
        Vec k = scale(L.directions[0], rng.uniform(-1.0, 1.0));
        Vec lhs = project_point(add(scale(x, lambda), k), L, spec, 2.0);
        Vec rhs = add(scale(project_point(x, L, spec, 2.0), lambda), k);
        CHECK(dist2(lhs, rhs) <= 1e-8);
    }
}

TEST_CASE("property: projection graph is cyclically monotone") {
    Rng rng(34);
    NormSpec eu = NormSpec::euclidean();
    AffineSubspace L = linear_span(2, {Vec{2.0, 1.0}});
    std::vector<std::pair<Vec, Vec>> pairs;
    for (int i = 0; i < 5; ++i) {
        Vec x = rng.gaussian_vec(2);
        pairs.emplace_back(x, project_point(x, L, eu, 2.0));
    }
    CHECK(cyclical_monotonicity_check(pairs, eu, 2.0, 4).ok);

    NormSpec l3 = NormSpec::lq(3.0);
    pairs.clear();
    for (int i = 0; i < 6; ++i) {
        Vec x = rng.gaussian_vec(2);
        pairs.emplace_back(x, project_point(x, L, l3, 2.0));
    }
    CHECK(cyclical_monotonicity_check(pairs, l3, 2.0, 4).ok);
}

TEST_CASE("fingerprint and family membership") {
    NormSpec l3 = NormSpec::lq(3.0);
    AffineSubspace L = linear_span(2, {Vec{1.0, 0.0}});
    AffineSubspace H = linear_span(2, {Vec{0.0, 1.0}});

    DiscreteMeasure d = dirac({1.0, 2.0});
    Fingerprint f = fingerprint(d, L, H, l3, 2.0);
    CHECK(measure_equal(f.proj_L, dirac({1.0, 0.0})));
    CHECK(measure_equal(f.proj_H, dirac({0.0, 2.0})));
    CHECK(family_F_check(d, L, H, l3, 2.0).member);  // vacuous for one atom

    DiscreteMeasure on_L = make_measure(2, {Atom{{1.0, 0.0}, 0.3}, Atom{{2.0, 0.0}, 0.7}});
    Fingerprint f2 = fingerprint(on_L, L, H, l3, 2.0);
    CHECK(measure_equal(f2.proj_L, on_L));

    DiscreteMeasure equal_w =
        make_measure(2, {Atom{{0.0, 0.0}, 0.5}, Atom{{1.0, 1.0}, 0.5}});
    CHECK_FALSE(family_F_check(equal_w, L, H, l3, 2.0).member);

    DiscreteMeasure good = make_measure(2, {Atom{{0.1, 0.2}, 0.3}, Atom{{1.0, 1.0}, 0.7}});
    CHECK(family_F_check(good, L, H, NormSpec::euclidean(), 2.0).member);
}

TEST_CASE("perturbation_triple: distances and fingerprints") {
    NormSpec l3 = NormSpec::lq(3.0);
    AffineSubspace L = linear_span(2, {Vec{1.0, 0.0}});
    AffineSubspace H = linear_span(2, {Vec{0.0, 1.0}});
    DiscreteMeasure mu = make_measure(2, {Atom{{1.0, 0.5}, 0.3}, Atom{{2.5, 2.0}, 0.7}});
    Mat b(2, 2);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            b(i, j) = mu.atoms[static_cast<size_t>(i)].weight *
                      mu.atoms[static_cast<size_t>(j)].weight;

    for (double p : {1.5, 3.0}) {
        PerturbationTriple pt = perturbation_triple(mu, L, H, l3, p, 0.2, 0, 0, 1, b);
        double expect = std::pow(pt.a0, 1.0 / p) * 0.2;
        CHECK(solve(mu, pt.mu_prime, l3, p).distance ==
              doctest::Approx(expect).epsilon(1e-10));
        CHECK(solve(pt.nu, pt.nu1_prime, l3, p).distance ==
              doctest::Approx(expect).epsilon(1e-10));
        CHECK(solve(pt.nu, pt.nu2_prime, l3, p).distance ==
              doctest::Approx(expect).epsilon(1e-10));

        Fingerprint fm = fingerprint(pt.mu_prime, L, H, l3, p);
        CHECK(fingerprint_equal(fm, fingerprint(pt.nu1_prime, L, H, l3, p)));
        CHECK(fingerprint_equal(fm, fingerprint(pt.nu2_prime, L, H, l3, p)));
    }

    // h0 out of range and degenerate atom position are rejected
    CHECK_THROWS_AS(perturbation_triple(mu, L, H, l3, 2.0, 100.0, 0, 0, 1, b), DomainError);
    DiscreteMeasure on_h = make_measure(2, {Atom{{0.0, 0.5}, 0.3}, Atom{{2.5, 2.0}, 0.7}});
    CHECK_THROWS_AS(perturbation_triple(on_h, L, H, l3, 2.0, 0.2, 0, 0, 1, b), DomainError);
}
