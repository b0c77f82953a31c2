#include "otlab/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace otlab {

double potential_eval(const DiscreteMeasure& mu, const NormSpec& spec, double p,
                      const Vec& x) {
    if (!(p >= 1.0)) throw DomainError("potential_eval requires p >= 1");
    double s = 0.0;
    for (const Atom& a : mu.atoms)
        s += a.weight * std::pow(norm_eval(spec, sub(x, a.point)), p);
    return s;
}

double second_diff_G(const NormSpec& spec, double p, const Vec& x, const Vec& h) {
    double nh = norm_eval(spec, h);
    if (nh == 0.0) throw DomainError("second_diff_G requires h != 0");
    double np_h = std::pow(nh, p);
    double fp = std::pow(norm_eval(spec, add(x, h)), p);
    double f0 = std::pow(norm_eval(spec, x), p);
    double fm = std::pow(norm_eval(spec, sub(x, h)), p);
    return (fp - 2.0 * f0 + fm) / (2.0 * np_h);
}

AtomEstimate atom_estimate(const DiscreteMeasure& mu, const NormSpec& spec, double p,
                           const Vec& x, const Vec& direction, double h0, double shrink,
                           int steps) {
    if (!(p >= 1.0) || p >= 2.0)
        throw DomainError("atom_estimate is defined for p in [1, 2)");
    if (steps < 4) throw DomainError("atom_estimate needs steps >= 4");
    if (!(h0 > 0.0)) throw DomainError("atom_estimate needs h0 > 0");
    if (!(shrink > 0.0) || !(shrink < 1.0))
        throw DomainError("atom_estimate needs shrink in (0, 1)");
    double dn = norm2(direction);
    if (dn < 1e-12) throw DomainError("atom_estimate needs a nonzero direction");
    Vec dir = scale(direction, 1.0 / dn);

    AtomEstimate out;
    out.location = x;
    double hk = h0;
    for (int k = 0; k < steps; ++k) {
        Vec h = scale(dir, hk);
        double g = 0.0;
        for (const Atom& a : mu.atoms)
            g += a.weight * second_diff_G(spec, p, sub(x, a.point), h);
        out.h_sequence.emplace_back(hk, g);
        hk *= shrink;
    }
    out.estimate = out.h_sequence.back().second;
    const size_t n = out.h_sequence.size();
    double lo = out.h_sequence[n - 1].second, hi = lo;
    for (size_t i = n - 3; i < n; ++i) {
        lo = std::min(lo, out.h_sequence[i].second);
        hi = std::max(hi, out.h_sequence[i].second);
    }
    out.converged = hi - lo <= 5e-4;
    return out;
}

HessianPairing make_pairing(Vec v1, Vec v2, NormSpec spec, double p) {
    double n1 = norm2(v1), n2 = norm2(v2);
    if (n1 < 1e-12 || n2 < 1e-12) throw DomainError("pairing directions must be nonzero");
    return HessianPairing{scale(v1, 1.0 / n1), scale(v2, 1.0 / n2), std::move(spec), p};
}

double pairing_T(const HessianPairing& pairing, const Vec& x) {
    if (norm2(x) == 0.0) {
        if (pairing.p > 2.0) return 0.0;  // (p-2)-homogeneous, vanishes at 0
        throw DomainError("pairing_T undefined at the origin for p <= 2");
    }
    Mat h = norm_hessian(pairing.spec, pairing.p, x);
    return bilinear(pairing.v2, h, pairing.v1);
}

IntegratedT integrated_T(const DiscreteMeasure& mu, const HessianPairing& pairing,
                         const Vec& x) {
    IntegratedT out;
    for (const Atom& a : mu.atoms) {
        Vec d = sub(x, a.point);
        if (norm2(d) <= 1e-12) {
            if (pairing.p > 2.0) continue;  // T(0) = 0
            out.excluded_atom = true;       // p = 2: integrate over R^n \ {x}
            continue;
        }
        out.value += a.weight * pairing_T(pairing, d);
    }
    return out;
}

namespace {

// Minimize T over the Euclidean unit sphere by projected gradient descent
// from x0 (finite-difference gradient of T).
double refine_sphere_min(const HessianPairing& pairing, Vec x0) {
    const int n = static_cast<int>(x0.size());
    Vec x = scale(x0, 1.0 / norm2(x0));
    double fx = pairing_T(pairing, x);
    const double fd = 1e-6;
    for (int iter = 0; iter < 80; ++iter) {
        Vec g(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) {
            Vec xp = x, xm = x;
            xp[static_cast<size_t>(i)] += fd;
            xm[static_cast<size_t>(i)] -= fd;
            g[static_cast<size_t>(i)] =
                (pairing_T(pairing, xp) - pairing_T(pairing, xm)) / (2.0 * fd);
        }
        axpy(-dot(g, x), x, g);  // tangent component
        double gn = norm2(g);
        if (gn < 1e-12) break;
        double step = 0.5;
        bool moved = false;
        for (int ls = 0; ls < 30; ++ls) {
            Vec xn = x;
            axpy(-step, g, xn);
            xn = scale(xn, 1.0 / norm2(xn));
            double fn = pairing_T(pairing, xn);
            if (fn < fx - 1e-16) {
                x = xn;
                fx = fn;
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if (!moved) break;
    }
    return fx;
}

struct PairScan {
    double min_sampled = 0.0;
    double max_sampled = 0.0;
    double refined_min = 0.0;
};

PairScan scan_pair(const HessianPairing& pairing, const std::vector<Vec>& samples) {
    PairScan s;
    s.min_sampled = std::numeric_limits<double>::infinity();
    s.max_sampled = -std::numeric_limits<double>::infinity();
    const Vec* argmin = nullptr;
    for (const Vec& x : samples) {
        double v = pairing_T(pairing, x);
        if (v < s.min_sampled) {
            s.min_sampled = v;
            argmin = &x;
        }
        s.max_sampled = std::max(s.max_sampled, v);
    }
    s.refined_min = std::min(s.min_sampled, refine_sphere_min(pairing, *argmin));
    return s;
}

// Plain Nelder-Mead; deterministic, unconstrained.
Vec nelder_mead(const std::function<double(const Vec&)>& f, Vec start, double scale0,
                int max_iter) {
    const int n = static_cast<int>(start.size());
    std::vector<Vec> xs(static_cast<size_t>(n + 1), start);
    for (int i = 0; i < n; ++i) xs[static_cast<size_t>(i + 1)][static_cast<size_t>(i)] += scale0;
    std::vector<double> fs(static_cast<size_t>(n + 1));
    for (int i = 0; i <= n; ++i) fs[static_cast<size_t>(i)] = f(xs[static_cast<size_t>(i)]);

    for (int iter = 0; iter < max_iter; ++iter) {
        std::vector<int> order(static_cast<size_t>(n + 1));
        for (int i = 0; i <= n; ++i) order[static_cast<size_t>(i)] = i;
        std::sort(order.begin(), order.end(),
                  [&](int a, int b) { return fs[static_cast<size_t>(a)] < fs[static_cast<size_t>(b)]; });
        std::vector<Vec> xs2;
        std::vector<double> fs2;
        for (int i = 0; i <= n; ++i) {
            xs2.push_back(xs[static_cast<size_t>(order[static_cast<size_t>(i)])]);
            fs2.push_back(fs[static_cast<size_t>(order[static_cast<size_t>(i)])]);
        }
        xs = xs2;
        fs = fs2;
        if (fs[0] < 1e-12) break;
        double spread = 0.0;
        for (int i = 1; i <= n; ++i) spread = std::max(spread, dist2(xs[0], xs[static_cast<size_t>(i)]));
        if (spread < 1e-12) break;

        Vec centroid = zeros(n);
        for (int i = 0; i < n; ++i) axpy(1.0 / n, xs[static_cast<size_t>(i)], centroid);
        auto blend = [&](double c) {
            Vec r = centroid;
            for (int i = 0; i < n; ++i)
                r[static_cast<size_t>(i)] += c * (centroid[static_cast<size_t>(i)] -
                                                  xs[static_cast<size_t>(n)][static_cast<size_t>(i)]);
            return r;
        };
        Vec xr = blend(1.0);
        double fr = f(xr);
        if (fr < fs[0]) {
            Vec xe = blend(2.0);
            double fe = f(xe);
            if (fe < fr) {
                xs[static_cast<size_t>(n)] = xe;
                fs[static_cast<size_t>(n)] = fe;
            } else {
                xs[static_cast<size_t>(n)] = xr;
                fs[static_cast<size_t>(n)] = fr;
            }
        } else if (fr < fs[static_cast<size_t>(n - 1)]) {
            xs[static_cast<size_t>(n)] = xr;
            fs[static_cast<size_t>(n)] = fr;
        } else {
            Vec xc = blend(-0.5);
            double fc = f(xc);
            if (fc < fs[static_cast<size_t>(n)]) {
                xs[static_cast<size_t>(n)] = xc;
                fs[static_cast<size_t>(n)] = fc;
            } else {
                for (int i = 1; i <= n; ++i) {
                    for (int j = 0; j < n; ++j)
                        xs[static_cast<size_t>(i)][static_cast<size_t>(j)] =
                            0.5 * (xs[static_cast<size_t>(i)][static_cast<size_t>(j)] +
                                   xs[0][static_cast<size_t>(j)]);
                    fs[static_cast<size_t>(i)] = f(xs[static_cast<size_t>(i)]);
                }
            }
        }
    }
    int best = 0;
    for (int i = 1; i <= n; ++i)
        if (fs[static_cast<size_t>(i)] < fs[static_cast<size_t>(best)]) best = i;
    return xs[static_cast<size_t>(best)];
}

}  // namespace

DirectionSearchResult direction_search(const NormSpec& spec, double p, int dim,
                                       int grid, uint64_t seed, double zero_tol,
                                       double spread_tol) {
    if (grid < 16) throw DomainError("direction_search needs grid >= 16");
    if (dim < 2) throw DomainError("direction_search needs dim >= 2");

    // sample set on the norm sphere, enriched with coordinate-hyperplane
    // points so kernels along the axes are hit exactly
    std::vector<Vec> samples = sphere_sample_normed(dim, grid, seed, spec);
    const size_t base_count = std::min<size_t>(samples.size(), 30);
    for (size_t s = 0; s < base_count; ++s) {
        for (int i = 0; i < dim; ++i) {
            Vec v = samples[s];
            v[static_cast<size_t>(i)] = 0.0;
            double nn = norm_eval(spec, v);
            if (nn > 1e-9) samples.push_back(scale(v, 1.0 / nn));
        }
    }
    for (int i = 0; i < dim; ++i) {
        Vec e = basis_vector(dim, i);
        samples.push_back(scale(e, 1.0 / norm_eval(spec, e)));
    }

    std::vector<std::pair<Vec, Vec>> cands;
    for (int i = 0; i < dim; ++i) cands.emplace_back(basis_vector(dim, i), basis_vector(dim, i));
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j)
            if (i != j) cands.emplace_back(basis_vector(dim, i), basis_vector(dim, j));
    std::vector<Vec> vset = sphere_sample(dim, 16, seed + 1000);
    for (const Vec& v : vset) cands.emplace_back(v, v);
    for (size_t a = 0; a < vset.size(); ++a)
        for (size_t b = a + 1; b < vset.size(); ++b) cands.emplace_back(vset[a], vset[b]);

    const double kZeroTol = zero_tol;
    const double kSpreadTol = spread_tol;

    struct Near {
        Vec v1, v2;
        double score;
    };
    std::vector<Near> near_misses;

    auto admit = [&](const Vec& v1, const Vec& v2,
                     DirectionSearchResult& out) -> bool {
        HessianPairing pr = make_pairing(v1, v2, spec, p);
        PairScan s = scan_pair(pr, samples);
        if (s.max_sampled < kSpreadTol) return false;      // constant-ish zero
        if (s.min_sampled < -kZeroTol) return false;       // indefinite pairing
        if (s.refined_min < -kZeroTol) return false;
        if (s.refined_min <= kZeroTol) {
            out.found = true;
            out.v1 = pr.v1;
            out.v2 = pr.v2;
            out.min_value = s.refined_min;
            out.max_value = s.max_sampled;
            out.nonconstant = true;
            return true;
        }
        if (s.refined_min < 5.0)
            near_misses.push_back({pr.v1, pr.v2, s.refined_min});
        return false;
    };

    DirectionSearchResult out;
    for (const auto& [v1, v2] : cands)
        if (admit(v1, v2, out)) return out;

    // Refine the closest candidates: drive the sphere minimum of the pairing
    // to zero while keeping it nonnegative and non-constant.
    std::sort(near_misses.begin(), near_misses.end(),
              [](const Near& a, const Near& b) { return a.score < b.score; });
    const size_t tries = std::min<size_t>(near_misses.size(), 6);
    for (size_t c = 0; c < tries; ++c) {
        Vec z(static_cast<size_t>(2 * dim));
        for (int i = 0; i < dim; ++i) {
            z[static_cast<size_t>(i)] = near_misses[c].v1[static_cast<size_t>(i)];
            z[static_cast<size_t>(dim + i)] = near_misses[c].v2[static_cast<size_t>(i)];
        }
        auto unpack = [&](const Vec& zz) {
            Vec v1(zz.begin(), zz.begin() + dim);
            Vec v2(zz.begin() + dim, zz.end());
            return std::make_pair(v1, v2);
        };
        auto objective = [&](const Vec& zz) {
            auto [v1, v2] = unpack(zz);
            if (norm2(v1) < 1e-6 || norm2(v2) < 1e-6) return 1e6;
            HessianPairing pr = make_pairing(v1, v2, spec, p);
            PairScan s = scan_pair(pr, samples);
            double bad = 0.0;
            if (s.min_sampled < -kZeroTol) bad += 1e4 * (-s.min_sampled);
            if (s.max_sampled < kSpreadTol) bad += 1e4 * (kSpreadTol - s.max_sampled);
            return std::abs(s.refined_min) + bad;
        };
        Vec zbest = nelder_mead(objective, z, 0.2, 400);
        auto [v1, v2] = unpack(zbest);
        if (norm2(v1) < 1e-6 || norm2(v2) < 1e-6) continue;
        if (admit(v1, v2, out)) return out;
    }
    return out;  // not found
}

bool support_in_translate_check(const DiscreteMeasure& mu, const HessianPairing& pairing,
                                const AffineSubspace& space) {
    std::vector<Vec> onb = subspace_onb(space);
    for (const Atom& a : mu.atoms)
        if (residual_to_span(a.point, space.base, onb) > 1e-9) return false;
    for (const Atom& a : mu.atoms) {
        IntegratedT t = integrated_T(mu, pairing, a.point);
        if (std::abs(t.value) > 1e-8) return false;
    }
    return true;
}

}  // namespace otlab
