#pragma once

#include <utility>
#include <vector>

#include "otlab/measures.hpp"
#include "otlab/norms.hpp"
#include "otlab/projections.hpp"

namespace otlab {

// x -> d_Wp^p(mu, delta_x) = sum_i w_i N(x - x_i)^p.
double potential_eval(const DiscreteMeasure& mu, const NormSpec& spec, double p,
                      const Vec& x);

// (N^p(x+h) - 2 N^p(x) + N^p(x-h)) / (2 N^p(h)), h != 0. Scale invariant:
// G(s*x, s*h) = G(x, h).
double second_diff_G(const NormSpec& spec, double p, const Vec& x, const Vec& h);

// Second-difference recovery of mu({x}) for p < 2: the measure-level G at
// h_k = h0 * shrink^k * direction converges to the atom weight at x.
struct AtomEstimate {
    Vec location;
    double estimate = 0.0;
    std::vector<std::pair<double, double>> h_sequence;  // (h, G value)
    bool converged = false;
};

AtomEstimate atom_estimate(const DiscreteMeasure& mu, const NormSpec& spec, double p,
                           const Vec& x, const Vec& direction, double h0, double shrink,
                           int steps);

// T(x) = v2' Hess(N^p)(x) v1. Directions are unit (Euclidean).
struct HessianPairing {
    Vec v1;
    Vec v2;
    NormSpec spec;
    double p = 2.0;
};

HessianPairing make_pairing(Vec v1, Vec v2, NormSpec spec, double p);

// T(0) = 0 for p > 2 ((p-2)-homogeneity); domain error at the origin for
// p <= 2.
double pairing_T(const HessianPairing& pairing, const Vec& x);

struct IntegratedT {
    double value = 0.0;
    bool excluded_atom = false;  // p = 2 convention: the atom at x is skipped
};

// sum_i w_i T(x - x_i); for p = 2 an atom sitting exactly at x is excluded
// and flagged.
IntegratedT integrated_T(const DiscreteMeasure& mu, const HessianPairing& pairing,
                         const Vec& x);

struct DirectionSearchResult {
    bool found = false;
    Vec v1;
    Vec v2;
    double min_value = 0.0;
    double max_value = 0.0;
    bool nonconstant = false;
};

// Searches for unit directions (v1, v2) whose Hessian pairing is nonnegative,
// non-constant and attains zero on the norm sphere: sampled scan over seeded
// direction pairs (canonical axes first), minimum polished by local descent,
// near-misses refined by Nelder-Mead on the pair. Not-found is a value, not
// an error. zero_tol bounds the attained minimum, spread_tol separates
// "kernel exists" from "constant zero".
DirectionSearchResult direction_search(const NormSpec& spec, double p, int dim,
                                       int grid, uint64_t seed, double zero_tol = 1e-8,
                                       double spread_tol = 1e-4);

// Every atom lies on `space` (1e-9) and integrated_T vanishes (1e-8) at every
// atom.
bool support_in_translate_check(const DiscreteMeasure& mu, const HessianPairing& pairing,
                                const AffineSubspace& space);

}  // namespace otlab
