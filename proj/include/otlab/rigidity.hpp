#pragma once

#include <functional>
#include <string>
#include <vector>

#include "otlab/measures.hpp"
#include "otlab/norms.hpp"
#include "otlab/projections.hpp"
#include "otlab/transport.hpp"

namespace otlab {

struct AlignmentReport {
    double d_mu_nu = 0.0;
    double d_nu_eta = 0.0;
    double d_mu_eta = 0.0;
    double defect = 0.0;  // d(mu,nu) + d(nu,eta) - d(mu,eta)
    bool aligned = false;
};

// Triangle-equality check for three pairwise distinct measures.
AlignmentReport alignment_check(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                const DiscreteMeasure& eta, const NormSpec& spec,
                                double p, double tol = 1e-8);

// eta = (D_x)_# nu with D_x(y) = x + 2(y - x); (delta_x, nu, eta) is aligned
// and d(delta_x, eta) = 2 d(delta_x, nu).
DiscreteMeasure dirac_align_construct(const Vec& x, const DiscreteMeasure& nu,
                                      const NormSpec& spec, double p);

// N(x-y) + N(y-z) = N(x-z) iff y lies on the segment [x, z] (strictly convex
// norms).
bool segment_test(const Vec& x, const Vec& y, const Vec& z, const NormSpec& spec);

struct IsometryCandidate {
    enum class Kind { pushforward, phi_t, phi_star, rotation };
    Kind kind = Kind::pushforward;

    std::function<Vec(const Vec&)> map;  // pushforward

    // phi_t / phi_star act on the two-point family along this line and fix
    // every Dirac mass
    Vec axis;
    Vec origin;
    double t = 0.0;  // phi_t shift

    double angle = 0.0;  // rotation about the barycenter, dim 2

    static IsometryCandidate pushforward_map(std::function<Vec(const Vec&)> f);
    static IsometryCandidate phi_t(double t, Vec axis, Vec origin);
    static IsometryCandidate phi_star(Vec axis, Vec origin);
    static IsometryCandidate rotation(double angle);

    std::string name() const;
};

DiscreteMeasure apply_candidate(const IsometryCandidate& cand, const DiscreteMeasure& mu);

struct Certificate {
    bool preserved = false;
    double max_violation = 0.0;
    int witness = -1;        // probe index of the worst violation
    double lhs = 0.0;        // d(Phi mu, Phi nu) at the witness
    double rhs = 0.0;        // d(mu, nu) at the witness
};

// Max over probes of |d(Phi mu, Phi nu) - d(mu, nu)|. A single strict
// violation is a complete non-isometry certificate; only the worst witness
// is reported. Finite probe sets certify instances, not the universal claim.
Certificate isometry_certificate(const IsometryCandidate& cand,
                                 const std::vector<std::pair<DiscreteMeasure,
                                                             DiscreteMeasure>>& probes,
                                 const NormSpec& spec, double p, double tol);

// (A^{2/q} + A^{-2/q})/2 - ((A + 1/A)/2)^{2/q}: negative for q > 2, positive
// for q < 2, zero at A = 1.
double convexity_gap(double q, double A);

// project_measure(apply(mu)) equals apply(project_measure(mu)); the caller
// asserts that the candidate fixes measures on `space`.
bool commutation_check(const IsometryCandidate& cand, const DiscreteMeasure& mu,
                       const AffineSubspace& space, const NormSpec& spec, double p);

}  // namespace otlab
