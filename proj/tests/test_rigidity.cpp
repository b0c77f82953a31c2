#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "otlab/rigidity.hpp"

using namespace otlab;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("alignment_check: basic aligned and non-aligned triples") {
    NormSpec eu = NormSpec::euclidean();
    DiscreteMeasure mu = dirac({0.0, 0.0});
    DiscreteMeasure nu = make_measure(2, {Atom{{1.0, 0.0}, 0.5}, Atom{{0.0, 1.0}, 0.5}});
    DiscreteMeasure eta = dirac_align_construct({0.0, 0.0}, nu, eu, 2.0);
    AlignmentReport rep = alignment_check(mu, nu, eta, eu, 2.0, 1e-8);
    CHECK(rep.aligned);
    CHECK(rep.d_mu_eta == doctest::Approx(2.0 * rep.d_mu_nu).epsilon(1e-12));
    CHECK(rep.defect >= -1e-9);

    AlignmentReport bad = alignment_check(dirac({0.0, 0.0}), dirac({1.0, 0.0}),
                                          dirac({-1.0, 0.0}), eu, 2.0, 1e-8);
    CHECK_FALSE(bad.aligned);

    CHECK_THROWS_AS(
        alignment_check(dirac({0.0, 0.0}), dirac({0.0, 0.0}), dirac({1.0, 0.0}), eu, 2.0, 1e-8),
        DomainError);
}

TEST_CASE("alignment_check: the l1 two-atom example") {
    NormSpec l1 = NormSpec::l1();
    DiscreteMeasure mu = make_measure(2, {Atom{{0.0, 0.0}, 0.5}, Atom{{1.0, 0.0}, 0.5}});
    AlignmentReport rep = alignment_check(mu, dirac({0.0, 1.0}), dirac({0.0, 2.5}), l1,
                                          1.0, 1e-8);
    CHECK(rep.aligned);
    CHECK(rep.d_mu_nu == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(rep.d_nu_eta == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(rep.d_mu_eta == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("dirac_align_construct") {
    CHECK(measure_equal(dirac_align_construct({0.0, 0.0}, dirac({1.0, 0.0}),
                                              NormSpec::euclidean(), 2.0),
                        dirac({2.0, 0.0})));
    CHECK(measure_equal(dirac_align_construct({1.0, 0.0}, dirac({0.0, 0.0}),
                                              NormSpec::euclidean(), 2.0),
                        dirac({-1.0, 0.0})));
    CHECK_THROWS_AS(
        dirac_align_construct({1.0, 0.0}, dirac({1.0, 0.0}), NormSpec::euclidean(), 2.0),
        DomainError);
}

TEST_CASE("property: dilation alignment over random inputs") {
    Rng rng(51);
    const std::vector<NormSpec> specs = {NormSpec::euclidean(), NormSpec::lq(3.0),
                                         NormSpec::l1()};
    for (int trial = 0; trial < 100; ++trial) {
        const NormSpec& spec = specs[static_cast<size_t>(trial) % specs.size()];
        double p = trial % 2 == 0 ? 2.0 : 1.5;
        Vec x{rng.uniform(-2, 2), rng.uniform(-2, 2)};
        std::vector<Atom> atoms;
        int m = 2 + rng.uniform_int(2);
        double sum = 0.0;
        for (int i = 0; i < m; ++i) {
            atoms.push_back(Atom{{rng.uniform(-2, 2), rng.uniform(-2, 2)},
                                 rng.uniform(0.2, 1.0)});
            sum += atoms.back().weight;
        }
        for (Atom& a : atoms) a.weight /= sum;
        DiscreteMeasure nu;
        try {
            nu = make_measure(2, atoms);
        } catch (const DomainError&) {
            continue;
        }
        DiscreteMeasure eta = dirac_align_construct(x, nu, spec, p);
        AlignmentReport rep = alignment_check(dirac(x), nu, eta, spec, p, 1e-8);
        CHECK(std::abs(rep.defect) <= 1e-8);
        CHECK(std::abs(rep.d_mu_eta - 2.0 * rep.d_mu_nu) <= 1e-9);
    }
}

TEST_CASE("segment_test") {
    NormSpec l3 = NormSpec::lq(3.0);
    CHECK(segment_test({0.0, 0.0}, {1.0, 0.0}, {2.0, 0.0}, l3));
    CHECK_FALSE(segment_test({0.0, 0.0}, {0.0, 1.0}, {2.0, 0.0}, l3));
    CHECK(segment_test({0.5, 0.5}, {0.5, 0.5}, {2.0, 0.0}, l3));  // t = 0
    CHECK_THROWS_AS(segment_test({0.0, 0.0}, {0.0, 1.0}, {2.0, 0.0}, NormSpec::l1()),
                    DomainError);
}

TEST_CASE("property: segment_test separates collinear from non-collinear") {
    Rng rng(52);
    NormSpec l3 = NormSpec::lq(3.0);
    for (int trial = 0; trial < 100; ++trial) {
        Vec x = rng.gaussian_vec(2);
        Vec z = rng.gaussian_vec(2);
        if (dist2(x, z) < 0.2) continue;
        double t = rng.uniform(0.05, 0.95);
        Vec between = add(scale(x, 1.0 - t), scale(z, t));
        CHECK(segment_test(x, between, z, l3));
        Vec off = add(between, Vec{0.0, 0.5});
        // a strictly convex norm makes the detour strictly longer unless the
        // offset happens to stay on the line
        double cross = (z[0] - x[0]) * (off[1] - x[1]) - (z[1] - x[1]) * (off[0] - x[0]);
        if (std::abs(cross) > 1e-3) CHECK_FALSE(segment_test(x, off, z, l3));
    }
}

TEST_CASE("apply_candidate: phi_t and phi_star") {
    Vec axis{1.0, 0.0}, origin{0.0, 0.0};
    DiscreteMeasure mu0 = make_measure(2, {Atom{{-1.0, 0.0}, 0.5}, Atom{{1.0, 0.0}, 0.5}});

    DiscreteMeasure t_img =
        apply_candidate(IsometryCandidate::phi_t(std::log(2.0), axis, origin), mu0);
    CHECK(measure_equal(
        t_img, make_measure(2, {Atom{{-2.0, 0.0}, 0.2}, Atom{{0.5, 0.0}, 0.8}})));

    DiscreteMeasure mu1 =
        make_measure(2, {Atom{{-1.0, 0.0}, 2.0 / 3.0}, Atom{{2.0, 0.0}, 1.0 / 3.0}});
    DiscreteMeasure s_img = apply_candidate(IsometryCandidate::phi_star(axis, origin), mu1);
    CHECK(measure_equal(
        s_img, make_measure(2, {Atom{{-2.0, 0.0}, 1.0 / 3.0}, Atom{{1.0, 0.0}, 2.0 / 3.0}})));

    // Dirac masses are fixed, even off the axis
    DiscreteMeasure d = dirac({0.3, 0.7});
    CHECK(measure_equal(apply_candidate(IsometryCandidate::phi_star(axis, origin), d), d));

    // rotation fixes Dirac masses (barycenter is the point itself)
    CHECK(measure_equal(apply_candidate(IsometryCandidate::rotation(kPi / 4.0), d), d));

    // off-axis two-point measures are outside the family domain
    DiscreteMeasure off = make_measure(2, {Atom{{-1.0, 0.2}, 0.5}, Atom{{1.0, 0.0}, 0.5}});
    CHECK_THROWS_AS(apply_candidate(IsometryCandidate::phi_t(1.0, axis, origin), off),
                    DomainError);
}

TEST_CASE("property: phi_t composes additively on the parameter") {
    Rng rng(53);
    Vec axis{1.0, 0.0}, origin{0.0, 0.0};
    for (int trial = 0; trial < 25; ++trial) {
        TwoPointParams params{axis, origin, rng.uniform(-1, 1), rng.uniform(0.3, 1.5),
                              rng.uniform(-1, 1)};
        double s = rng.uniform(-1.0, 1.0), t = rng.uniform(-1.0, 1.0);
        DiscreteMeasure two = kloeckner_two_point(params);
        DiscreteMeasure lhs = apply_candidate(
            IsometryCandidate::phi_t(t, axis, origin),
            apply_candidate(IsometryCandidate::phi_t(s, axis, origin), two));
        TwoPointParams rec = recover_two_point(lhs, axis, origin);
        CHECK(std::abs(rec.p_param - (params.p_param + s + t)) <= 1e-12 * (1.0 + std::abs(rec.p_param)));
        CHECK(std::abs(rec.x - params.x) <= 1e-12 * (1.0 + std::abs(params.x)));
        CHECK(std::abs(rec.sigma - params.sigma) <= 1e-12 * (1.0 + params.sigma));
    }
}

TEST_CASE("isometry_certificate: the q = 3 witnesses") {
    NormSpec l3 = NormSpec::lq(3.0);
    Vec axis{1.0, 0.0}, origin{0.0, 0.0};
    DiscreteMeasure mu0 = make_measure(2, {Atom{{-1.0, 0.0}, 0.5}, Atom{{1.0, 0.0}, 0.5}});

    Certificate phi_t_cert = isometry_certificate(
        IsometryCandidate::phi_t(std::log(2.0), axis, origin),
        {{mu0, dirac({0.0, 1.0})}}, l3, 2.0, 1e-8);
    CHECK_FALSE(phi_t_cert.preserved);
    CHECK(phi_t_cert.lhs * phi_t_cert.lhs == doctest::Approx(1.73070).epsilon(1e-5));
    CHECK(phi_t_cert.rhs * phi_t_cert.rhs == doctest::Approx(1.58740).epsilon(1e-5));
    CHECK(phi_t_cert.max_violation > 0.01);

    DiscreteMeasure mu1 =
        make_measure(2, {Atom{{-1.0, 0.0}, 2.0 / 3.0}, Atom{{2.0, 0.0}, 1.0 / 3.0}});
    Certificate phi_s_cert = isometry_certificate(
        IsometryCandidate::phi_star(axis, origin), {{mu1, dirac({1.0, 1.0})}}, l3, 2.0,
        1e-8);
    CHECK_FALSE(phi_s_cert.preserved);
    CHECK(phi_s_cert.rhs * phi_s_cert.rhs == doctest::Approx(3.41363).epsilon(1e-5));
    CHECK(phi_s_cert.lhs * phi_s_cert.lhs == doctest::Approx(3.74029).epsilon(1e-5));
    CHECK(phi_s_cert.lhs * phi_s_cert.lhs - phi_s_cert.rhs * phi_s_cert.rhs > 0.05);
}

TEST_CASE("property: phi_t preserves Euclidean W2 on family and Dirac probes") {
    Rng rng(54);
    NormSpec eu = NormSpec::euclidean();
    Vec axis{1.0, 0.0}, origin{0.0, 0.0};
    IsometryCandidate phi = IsometryCandidate::phi_t(0.7, axis, origin);
    std::vector<std::pair<DiscreteMeasure, DiscreteMeasure>> probes;
    for (int i = 0; i < 20; ++i) {
        TwoPointParams params{axis, origin, rng.uniform(-1.5, 1.5), rng.uniform(0.3, 2.0),
                              rng.uniform(-1, 1)};
        probes.emplace_back(kloeckner_two_point(params),
                            dirac({rng.uniform(-2, 2), rng.uniform(-2, 2)}));
    }
    Certificate cert = isometry_certificate(phi, probes, eu, 2.0, 1e-9);
    CHECK(cert.preserved);
}

TEST_CASE("convexity_gap") {
    CHECK(convexity_gap(3.0, 1.0) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(convexity_gap(1.7, 1.0) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(convexity_gap(3.0, 2.0) < -1e-3);
    CHECK(convexity_gap(1.5, 2.0) > 1e-3);
    CHECK_THROWS_AS(convexity_gap(-1.0, 2.0), DomainError);
}

TEST_CASE("commutation_check") {
    NormSpec eu = NormSpec::euclidean();
    AffineSubspace xaxis = linear_span(2, {Vec{1.0, 0.0}});

    // translations along the subspace commute with the projection
    IsometryCandidate shift = IsometryCandidate::pushforward_map(
        [](const Vec& y) { return Vec{y[0] + 1.3, y[1]}; });
    DiscreteMeasure mu = make_measure(2, {Atom{{0.5, 1.0}, 0.4}, Atom{{-1.0, 2.0}, 0.6}});
    CHECK(commutation_check(shift, mu, xaxis, eu, 2.0));

    // a rotation about the barycenter leaves the fiber structure
    DiscreteMeasure slanted =
        make_measure(2, {Atom{{0.0, 0.0}, 0.4}, Atom{{1.0, 1.0}, 0.6}});
    CHECK_FALSE(commutation_check(IsometryCandidate::rotation(kPi / 4.0), slanted, xaxis,
                                  eu, 2.0));

    // measures already on the subspace are fixed on both routes
    DiscreteMeasure flat = make_measure(2, {Atom{{0.0, 0.0}, 0.4}, Atom{{1.0, 0.0}, 0.6}});
    CHECK(commutation_check(shift, flat, xaxis, eu, 2.0));
}

TEST_CASE("rotation is a Euclidean W2 isometry and not an lq(4) one") {
    Rng rng(55);
    IsometryCandidate rot = IsometryCandidate::rotation(kPi / 4.0);
    std::vector<std::pair<DiscreteMeasure, DiscreteMeasure>> probes;
    for (int i = 0; i < 12; ++i) {
        std::vector<Atom> a1, a2;
        double s1 = 0.0, s2 = 0.0;
        for (int k = 0; k < 2; ++k) {
            a1.push_back(Atom{{rng.uniform(-2, 2), rng.uniform(-2, 2)}, rng.uniform(0.2, 1.0)});
            a2.push_back(Atom{{rng.uniform(-2, 2), rng.uniform(-2, 2)}, rng.uniform(0.2, 1.0)});
            s1 += a1.back().weight;
            s2 += a2.back().weight;
        }
        for (Atom& a : a1) a.weight /= s1;
        for (Atom& a : a2) a.weight /= s2;
        try {
            probes.emplace_back(make_measure(2, a1), make_measure(2, a2));
        } catch (const DomainError&) {
            --i;
        }
    }
    Certificate eu_cert = isometry_certificate(rot, probes, NormSpec::euclidean(), 2.0, 1e-8);
    CHECK(eu_cert.preserved);
    Certificate l4_cert = isometry_certificate(rot, probes, NormSpec::lq(4.0), 2.0, 1e-8);
    CHECK_FALSE(l4_cert.preserved);
    CHECK(l4_cert.max_violation > 1e-3);
}
