#pragma once

#include <functional>
#include <vector>

#include "otlab/linalg.hpp"

namespace otlab {

struct Atom {
    Vec point;
    double weight = 0.0;
};

// Finitely supported probability measure. Invariants: weights strictly
// positive and summing to 1, atom points pairwise distinct.
struct DiscreteMeasure {
    int dim = 0;
    std::vector<Atom> atoms;

    size_t size() const { return atoms.size(); }
};

// Validates the invariants (weight sum tolerance sum_tol) and normalizes the
// weight sum exactly to 1.
DiscreteMeasure make_measure(int dim, std::vector<Atom> atoms, double sum_tol = 1e-9);

DiscreteMeasure dirac(const Vec& point);

// Image measure; images closer than 1e-12 (Euclidean) merge by weight sum.
DiscreteMeasure pushforward(const DiscreteMeasure& mu,
                            const std::function<Vec(const Vec&)>& map);

// Atom y -> center + factor * (y - center).
DiscreteMeasure dilate(const DiscreteMeasure& mu, const Vec& center, double factor);

Vec barycenter(const DiscreteMeasure& mu);

// Two-point family on the line origin + R*axis: weights e^{-p}/(e^{-p}+e^{p})
// and e^{p}/(e^{-p}+e^{p}) at axis positions x - sigma*e^{p} and
// x + sigma*e^{-p}. Barycenter sits at origin + x*axis and the second moment
// about it along the axis equals sigma^2, independent of p_param.
struct TwoPointParams {
    Vec axis;     // unit direction
    Vec origin;
    double x = 0.0;
    double sigma = 1.0;
    double p_param = 0.0;
};

DiscreteMeasure kloeckner_two_point(const TwoPointParams& params);

// Inverse of the parametrization for a 2-atom measure supported on the line
// origin + R*axis. Throws DomainError when the atoms leave the line (beyond
// 1e-9) or the measure has a different shape.
TwoPointParams recover_two_point(const DiscreteMeasure& mu, const Vec& axis,
                                 const Vec& origin);

// Moves `mass` from atoms[from_atom] to a new atom at to_point.
DiscreteMeasure shift_weight(const DiscreteMeasure& mu, size_t from_atom,
                             const Vec& to_point, double mass);

// Equality up to atom reordering: positions within pos_tol (Euclidean),
// weights within w_tol, via maximum bipartite matching.
bool measure_equal(const DiscreteMeasure& a, const DiscreteMeasure& b,
                   double pos_tol = 1e-9, double w_tol = 1e-9);

}  // namespace otlab
