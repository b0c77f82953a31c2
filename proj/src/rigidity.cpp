#include "otlab/rigidity.hpp"

#include <cmath>

namespace otlab {

AlignmentReport alignment_check(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                const DiscreteMeasure& eta, const NormSpec& spec,
                                double p, double tol) {
    if (measure_equal(mu, nu) || measure_equal(nu, eta) || measure_equal(mu, eta))
        throw DomainError("alignment_check requires three pairwise distinct measures");
    AlignmentReport r;
    r.d_mu_nu = solve(mu, nu, spec, p).distance;
    r.d_nu_eta = solve(nu, eta, spec, p).distance;
    r.d_mu_eta = solve(mu, eta, spec, p).distance;
    r.defect = r.d_mu_nu + r.d_nu_eta - r.d_mu_eta;
    r.aligned = std::abs(r.defect) <= tol;
    return r;
}

DiscreteMeasure dirac_align_construct(const Vec& x, const DiscreteMeasure& nu,
                                      const NormSpec& spec, double p) {
    (void)spec;
    (void)p;
    if (measure_equal(nu, dirac(x)))
        throw DomainError("dirac_align_construct: nu must differ from delta_x");
    return pushforward(nu, [&](const Vec& y) {
        Vec r = y;
        for (size_t i = 0; i < r.size(); ++i) r[i] = x[i] + 2.0 * (y[i] - x[i]);
        return r;
    });
}

bool segment_test(const Vec& x, const Vec& y, const Vec& z, const NormSpec& spec) {
    if (!spec.strictly_convex)
        throw DomainError("segment_test requires a strictly convex norm");
    double lhs = norm_eval(spec, sub(x, y)) + norm_eval(spec, sub(y, z));
    double rhs = norm_eval(spec, sub(x, z));
    return std::abs(lhs - rhs) <= 1e-10 * (1.0 + rhs);
}

IsometryCandidate IsometryCandidate::pushforward_map(std::function<Vec(const Vec&)> f) {
    IsometryCandidate c;
    c.kind = Kind::pushforward;
    c.map = std::move(f);
    return c;
}

IsometryCandidate IsometryCandidate::phi_t(double t, Vec axis, Vec origin) {
    IsometryCandidate c;
    c.kind = Kind::phi_t;
    c.t = t;
    c.axis = std::move(axis);
    c.origin = std::move(origin);
    return c;
}

IsometryCandidate IsometryCandidate::phi_star(Vec axis, Vec origin) {
    IsometryCandidate c;
    c.kind = Kind::phi_star;
    c.axis = std::move(axis);
    c.origin = std::move(origin);
    return c;
}

IsometryCandidate IsometryCandidate::rotation(double angle) {
    IsometryCandidate c;
    c.kind = Kind::rotation;
    c.angle = angle;
    return c;
}

std::string IsometryCandidate::name() const {
    switch (kind) {
        case Kind::pushforward: return "pushforward";
        case Kind::phi_t: return "phi_t(" + std::to_string(t) + ")";
        case Kind::phi_star: return "phi_star";
        case Kind::rotation: return "rotation(" + std::to_string(angle) + ")";
    }
    return "?";
}

DiscreteMeasure apply_candidate(const IsometryCandidate& cand, const DiscreteMeasure& mu) {
    switch (cand.kind) {
        case IsometryCandidate::Kind::pushforward:
            return pushforward(mu, cand.map);
        case IsometryCandidate::Kind::phi_t:
        case IsometryCandidate::Kind::phi_star: {
            if (mu.atoms.size() == 1) return mu;  // Dirac masses are fixed
            TwoPointParams params = recover_two_point(mu, cand.axis, cand.origin);
            if (cand.kind == IsometryCandidate::Kind::phi_t)
                params.p_param += cand.t;
            else
                params.p_param = -params.p_param;
            return kloeckner_two_point(params);
        }
        case IsometryCandidate::Kind::rotation: {
            if (mu.dim != 2) throw DomainError("rotation candidate requires dimension 2");
            Vec b = barycenter(mu);
            const double c = std::cos(cand.angle), s = std::sin(cand.angle);
            return pushforward(mu, [&](const Vec& y) {
                double dx = y[0] - b[0], dy = y[1] - b[1];
                return Vec{b[0] + c * dx - s * dy, b[1] + s * dx + c * dy};
            });
        }
    }
    throw DomainError("unknown isometry candidate");
}

Certificate isometry_certificate(const IsometryCandidate& cand,
                                 const std::vector<std::pair<DiscreteMeasure,
                                                             DiscreteMeasure>>& probes,
                                 const NormSpec& spec, double p, double tol) {
    if (probes.empty()) throw DomainError("isometry_certificate needs probes");
    Certificate cert;
    for (size_t i = 0; i < probes.size(); ++i) {
        DiscreteMeasure fmu = apply_candidate(cand, probes[i].first);
        DiscreteMeasure fnu = apply_candidate(cand, probes[i].second);
        double lhs = solve(fmu, fnu, spec, p).distance;
        double rhs = solve(probes[i].first, probes[i].second, spec, p).distance;
        double v = std::abs(lhs - rhs);
        if (v > cert.max_violation || cert.witness < 0) {
            cert.max_violation = v;
            cert.witness = static_cast<int>(i);
            cert.lhs = lhs;
            cert.rhs = rhs;
        }
    }
    cert.preserved = cert.max_violation <= tol;
    return cert;
}

double convexity_gap(double q, double A) {
    if (!(q > 0.0)) throw DomainError("convexity_gap requires q > 0");
    if (!(A > 0.0)) throw DomainError("convexity_gap requires A > 0");
    double e = 2.0 / q;
    return 0.5 * std::pow(A, e) + 0.5 * std::pow(A, -e) -
           std::pow(0.5 * A + 0.5 / A, e);
}

bool commutation_check(const IsometryCandidate& cand, const DiscreteMeasure& mu,
                       const AffineSubspace& space, const NormSpec& spec, double p) {
    DiscreteMeasure lhs = project_measure(apply_candidate(cand, mu), space, spec, p);
    DiscreteMeasure rhs = apply_candidate(cand, project_measure(mu, space, spec, p));
    return measure_equal(lhs, rhs, 1e-8, 1e-9);
}

}  // namespace otlab
