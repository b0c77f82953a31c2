#pragma once

#include <optional>
#include <string>
#include <vector>

#include "otlab/measures.hpp"
#include "otlab/norms.hpp"

namespace otlab {

// base + span(directions); directions must be linearly independent.
struct AffineSubspace {
    Vec base;
    std::vector<Vec> directions;  // possibly empty (single point)

    int dim() const { return static_cast<int>(base.size()); }
    int rank() const { return static_cast<int>(directions.size()); }
};

AffineSubspace make_subspace(Vec base, std::vector<Vec> directions);
AffineSubspace linear_span(int dim, std::vector<Vec> directions);

// Orthonormal basis of span(directions).
std::vector<Vec> subspace_onb(const AffineSubspace& sub);

// Nearest point of the subspace in the norm N; strictly convex norms only
// (the minimizer is unique). Damped Newton on the span coefficients with the
// objective N(...)^max(p,2) and Armijo backtracking; golden-section coordinate
// descent when second derivatives are unavailable.
Vec project_point(const Vec& x, const AffineSubspace& sub, const NormSpec& spec,
                  double p);

// Pushforward of mu under project_point. Verifies against the transport
// solver that d_Wp(mu, mu_hat)^p equals the integrated pointwise cost.
DiscreteMeasure project_measure(const DiscreteMeasure& mu, const AffineSubspace& sub,
                                const NormSpec& spec, double p);

// x projects onto 0 (subspace through the origin), threshold
// 1e-8 * (1 + |x|).
bool kernel_membership(const Vec& x, const AffineSubspace& sub, const NormSpec& spec,
                       double p);

// Greedy heuristic: grows a linear subspace inside P_L^{-1}(0) from the
// seeds, admitting a candidate direction only when a 30-point probe grid of
// the extended span (15 random directions x radii {0.5, 2.0}) passes
// kernel_membership. Certifies membership on samples only.
AffineSubspace max_subspace_in_kernel(const AffineSubspace& sub, const NormSpec& spec,
                                      double p, const std::vector<Vec>& seeds);

struct Fingerprint {
    DiscreteMeasure proj_L;
    DiscreteMeasure proj_H;
};

Fingerprint fingerprint(const DiscreteMeasure& mu, const AffineSubspace& L,
                        const AffineSubspace& H, const NormSpec& spec, double p);

bool fingerprint_equal(const Fingerprint& a, const Fingerprint& b,
                       double pos_tol = 1e-8, double w_tol = 1e-9);

struct FamilyCheck {
    bool member = false;
    std::string reason;
};

// Weights pairwise distinct and both projected atom sets pairwise distinct
// (gaps > 1e-9).
FamilyCheck family_F_check(const DiscreteMeasure& mu, const AffineSubspace& L,
                           const AffineSubspace& H, const NormSpec& spec, double p);

struct PerturbationTriple {
    DiscreteMeasure mu_prime;
    DiscreteMeasure nu;        // grid measure sum b_{k,k'} delta_{x_{k,k'}}
    DiscreteMeasure nu1_prime;
    DiscreteMeasure nu2_prime;
    std::vector<std::vector<Vec>> grid;  // grid[k][k'] = (H + x_k) cap P_H^{-1}(P_H(x_{k'}))
    Vec x0;
    double a0 = 0.0;
    double h = 0.0;   // min pairwise grid distance in the norm
    double h0 = 0.0;
};

// Weight-shift construction over the (L, H) grid. `b` is an M x M coupling
// table with row and column sums equal to the weights of mu; the shifted
// mass is a0 = min(b[k0][k1], b[k0][k2]) / 2. Requires 0 < h0 < h/2.
PerturbationTriple perturbation_triple(const DiscreteMeasure& mu,
                                       const AffineSubspace& L,
                                       const AffineSubspace& H, const NormSpec& spec,
                                       double p, double h0, int k0, int k1, int k2,
                                       const Mat& b);

}  // namespace otlab
