#include "otlab/measures.hpp"

#include <algorithm>
#include <cmath>

namespace otlab {

namespace {
constexpr double kMergeTol = 1e-12;
}

DiscreteMeasure make_measure(int dim, std::vector<Atom> atoms, double sum_tol) {
    if (dim < 1) throw DomainError("measure dimension must be >= 1");
    if (atoms.empty()) throw DomainError("measure needs at least one atom");
    double sum = 0.0;
    for (const Atom& a : atoms) {
        if (static_cast<int>(a.point.size()) != dim)
            throw DomainError("atom dimension mismatch");
        if (!all_finite(a.point)) throw DomainError("atom has non-finite coordinates");
        if (!(a.weight > 0.0)) throw DomainError("atom weights must be strictly positive");
        sum += a.weight;
    }
    if (std::abs(sum - 1.0) > sum_tol)
        throw DomainError("atom weights must sum to 1");
    for (size_t i = 0; i < atoms.size(); ++i)
        for (size_t j = i + 1; j < atoms.size(); ++j)
            if (dist2(atoms[i].point, atoms[j].point) <= kMergeTol)
                throw DomainError("atom points must be pairwise distinct");
    for (Atom& a : atoms) a.weight /= sum;
    return DiscreteMeasure{dim, std::move(atoms)};
}

DiscreteMeasure dirac(const Vec& point) {
    if (!all_finite(point)) throw DomainError("dirac point has non-finite coordinates");
    return DiscreteMeasure{static_cast<int>(point.size()), {Atom{point, 1.0}}};
}

DiscreteMeasure pushforward(const DiscreteMeasure& mu,
                            const std::function<Vec(const Vec&)>& map) {
    std::vector<Atom> out;
    out.reserve(mu.atoms.size());
    for (const Atom& a : mu.atoms) {
        Vec y = map(a.point);
        if (static_cast<int>(y.size()) != mu.dim)
            throw DomainError("pushforward map changed the dimension");
        if (!all_finite(y)) throw DomainError("pushforward image is non-finite");
        bool merged = false;
        for (Atom& o : out) {
            if (dist2(o.point, y) < kMergeTol) {
                o.weight += a.weight;
                merged = true;
                break;
            }
        }
        if (!merged) out.push_back(Atom{std::move(y), a.weight});
    }
    return DiscreteMeasure{mu.dim, std::move(out)};
}

DiscreteMeasure dilate(const DiscreteMeasure& mu, const Vec& center, double factor) {
    return pushforward(mu, [&](const Vec& y) {
        Vec r = center;
        for (size_t i = 0; i < r.size(); ++i) r[i] += factor * (y[i] - center[i]);
        return r;
    });
}

Vec barycenter(const DiscreteMeasure& mu) {
    Vec b = zeros(mu.dim);
    for (const Atom& a : mu.atoms) axpy(a.weight, a.point, b);
    return b;
}

DiscreteMeasure kloeckner_two_point(const TwoPointParams& params) {
    if (!(params.sigma > 0.0)) throw DomainError("two-point family requires sigma > 0");
    Vec axis = params.axis;
    double an = norm2(axis);
    if (an < 1e-12) throw DomainError("two-point family requires a nonzero axis");
    axis = scale(axis, 1.0 / an);
    const double p = params.p_param;
    // stable forms of e^{-p}/(e^{-p}+e^{p}) and its complement
    const double w_minus = 1.0 / (1.0 + std::exp(2.0 * p));
    const double w_plus = 1.0 / (1.0 + std::exp(-2.0 * p));
    if (!(w_minus > 0.0) || !(w_plus > 0.0))
        throw DomainError("two-point family parameter p_param too large");
    const double s_minus = params.x - params.sigma * std::exp(p);
    const double s_plus = params.x + params.sigma * std::exp(-p);
    Vec a_minus = params.origin;
    axpy(s_minus, axis, a_minus);
    Vec a_plus = params.origin;
    axpy(s_plus, axis, a_plus);
    return make_measure(static_cast<int>(axis.size()),
                        {Atom{a_minus, w_minus}, Atom{a_plus, w_plus}}, 1e-12);
}

TwoPointParams recover_two_point(const DiscreteMeasure& mu, const Vec& axis_in,
                                 const Vec& origin) {
    if (mu.atoms.size() != 2)
        throw DomainError("two-point recovery needs exactly two atoms");
    Vec axis = axis_in;
    double an = norm2(axis);
    if (an < 1e-12) throw DomainError("two-point recovery requires a nonzero axis");
    axis = scale(axis, 1.0 / an);

    double s[2];
    for (int i = 0; i < 2; ++i) {
        Vec d = sub(mu.atoms[static_cast<size_t>(i)].point, origin);
        s[i] = dot(d, axis);
        axpy(-s[i], axis, d);
        if (norm2(d) > 1e-9)
            throw DomainError("measure is not supported on the candidate line");
    }
    int lo = s[0] < s[1] ? 0 : 1;
    int hi = 1 - lo;
    const double w_minus = mu.atoms[static_cast<size_t>(lo)].weight;
    const double w_plus = mu.atoms[static_cast<size_t>(hi)].weight;
    TwoPointParams params;
    params.axis = axis;
    params.origin = origin;
    params.p_param = 0.5 * std::log(w_plus / w_minus);
    params.sigma = (s[hi] - s[lo]) / (std::exp(params.p_param) + std::exp(-params.p_param));
    params.x = w_minus * s[lo] + w_plus * s[hi];
    // round trip consistency with the defining display
    const double s_minus = params.x - params.sigma * std::exp(params.p_param);
    const double s_plus = params.x + params.sigma * std::exp(-params.p_param);
    if (std::abs(s_minus - s[lo]) > 1e-9 * (1.0 + std::abs(s[lo])) ||
        std::abs(s_plus - s[hi]) > 1e-9 * (1.0 + std::abs(s[hi])))
        throw DomainError("measure is inconsistent with the two-point family");
    return params;
}

DiscreteMeasure shift_weight(const DiscreteMeasure& mu, size_t from_atom,
                             const Vec& to_point, double mass) {
    if (from_atom >= mu.atoms.size()) throw DomainError("shift_weight: atom index out of range");
    const double w = mu.atoms[from_atom].weight;
    if (!(mass > 0.0) || !(mass < w))
        throw DomainError("shift_weight: mass must lie strictly between 0 and the atom weight");
    for (const Atom& a : mu.atoms)
        if (dist2(a.point, to_point) <= kMergeTol)
            throw DomainError("shift_weight: target point is an existing atom");
    std::vector<Atom> atoms = mu.atoms;
    atoms[from_atom].weight = w - mass;
    atoms.push_back(Atom{to_point, mass});
    return DiscreteMeasure{mu.dim, std::move(atoms)};
}

namespace {

bool kuhn_augment(int i, const std::vector<std::vector<int>>& adm,
                  std::vector<int>& match_b, std::vector<char>& used) {
    for (int j : adm[static_cast<size_t>(i)]) {
        if (used[static_cast<size_t>(j)]) continue;
        used[static_cast<size_t>(j)] = 1;
        if (match_b[static_cast<size_t>(j)] < 0 ||
            kuhn_augment(match_b[static_cast<size_t>(j)], adm, match_b, used)) {
            match_b[static_cast<size_t>(j)] = i;
            return true;
        }
    }
    return false;
}

}  // namespace

bool measure_equal(const DiscreteMeasure& a, const DiscreteMeasure& b,
                   double pos_tol, double w_tol) {
    if (a.dim != b.dim) return false;
    if (a.atoms.size() != b.atoms.size()) return false;
    const int n = static_cast<int>(a.atoms.size());
    std::vector<std::vector<int>> adm(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (dist2(a.atoms[static_cast<size_t>(i)].point,
                      b.atoms[static_cast<size_t>(j)].point) <= pos_tol &&
                std::abs(a.atoms[static_cast<size_t>(i)].weight -
                         b.atoms[static_cast<size_t>(j)].weight) <= w_tol)
                adm[static_cast<size_t>(i)].push_back(j);
    std::vector<int> match_b(static_cast<size_t>(n), -1);
    int matched = 0;
    for (int i = 0; i < n; ++i) {
        std::vector<char> used(static_cast<size_t>(n), 0);
        if (kuhn_augment(i, adm, match_b, used)) ++matched;
    }
    return matched == n;
}

}  // namespace otlab
