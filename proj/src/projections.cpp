#include "otlab/projections.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "otlab/transport.hpp"

namespace otlab {

AffineSubspace make_subspace(Vec base, std::vector<Vec> directions) {
    if (!all_finite(base)) throw DomainError("subspace base is non-finite");
    const int n = static_cast<int>(base.size());
    for (const Vec& d : directions) {
        if (static_cast<int>(d.size()) != n)
            throw DomainError("subspace direction dimension mismatch");
        if (!all_finite(d)) throw DomainError("subspace direction is non-finite");
        if (norm2(d) < 1e-12) throw DomainError("subspace direction is zero");
    }
    std::vector<Vec> onb = orthonormalize(directions, 1e-10);
    if (onb.size() != directions.size())
        throw DomainError("subspace directions are linearly dependent");
    return AffineSubspace{std::move(base), std::move(directions)};
}

AffineSubspace linear_span(int dim, std::vector<Vec> directions) {
    return make_subspace(zeros(dim), std::move(directions));
}

std::vector<Vec> subspace_onb(const AffineSubspace& space) {
    return orthonormalize(space.directions, 1e-10);
}

namespace {

// Cyclic golden-section descent on the span coefficients; used when the norm
// has no usable second derivatives.
Vec golden_fallback(const std::function<double(const Vec&)>& f, Vec t, double span0) {
    const double phi = 0.6180339887498949;
    const int r = static_cast<int>(t.size());
    double window = std::max(1.0, span0);
    for (int sweep = 0; sweep < 200; ++sweep) {
        double moved = 0.0;
        for (int i = 0; i < r; ++i) {
            double lo = t[static_cast<size_t>(i)] - window;
            double hi = t[static_cast<size_t>(i)] + window;
            double a = hi - phi * (hi - lo);
            double b = lo + phi * (hi - lo);
            Vec ta = t, tb = t;
            ta[static_cast<size_t>(i)] = a;
            tb[static_cast<size_t>(i)] = b;
            double fa = f(ta), fb = f(tb);
            for (int it = 0; it < 120 && hi - lo > 1e-13 * (1.0 + std::abs(lo)); ++it) {
                if (fa < fb) {
                    hi = b;
                    b = a;
                    fb = fa;
                    a = hi - phi * (hi - lo);
                    ta[static_cast<size_t>(i)] = a;
                    fa = f(ta);
                } else {
                    lo = a;
                    a = b;
                    fa = fb;
                    b = lo + phi * (hi - lo);
                    tb[static_cast<size_t>(i)] = b;
                    fb = f(tb);
                }
            }
            double ti = 0.5 * (lo + hi);
            moved = std::max(moved, std::abs(ti - t[static_cast<size_t>(i)]));
            t[static_cast<size_t>(i)] = ti;
        }
        window = std::max(4.0 * moved, 1e-10);
        if (moved < 1e-12) break;
    }
    return t;
}

}  // namespace

Vec project_point(const Vec& x, const AffineSubspace& space, const NormSpec& spec,
                  double p) {
    if (!spec.strictly_convex)
        throw DomainError(
            "projection rejected: norm is not strictly convex, nearest point may not be unique");
    if (!(p >= 1.0)) throw DomainError("project_point requires p >= 1");
    if (static_cast<int>(x.size()) != space.dim())
        throw DomainError("project_point: dimension mismatch");
    if (space.rank() == 0) return space.base;

    const std::vector<Vec> onb = subspace_onb(space);
    const int r = static_cast<int>(onb.size());
    const Vec d0 = sub(x, space.base);

    auto point_at = [&](const Vec& t) {
        Vec y = space.base;
        for (int i = 0; i < r; ++i)
            axpy(t[static_cast<size_t>(i)], onb[static_cast<size_t>(i)], y);
        return y;
    };
    auto residual = [&](const Vec& t) { return sub(x, point_at(t)); };

    // Euclidean least-squares coefficients; exact when x lies on the subspace.
    Vec t(static_cast<size_t>(r));
    for (int i = 0; i < r; ++i)
        t[static_cast<size_t>(i)] = dot(d0, onb[static_cast<size_t>(i)]);
    if (norm2(residual(t)) <= 1e-14 * (1.0 + norm2(x))) return point_at(t);

    const double m_exp = std::max(p, 2.0);
    auto objective = [&](const Vec& tt) {
        return std::pow(norm_eval(spec, residual(tt)), m_exp);
    };
    const double gtol = 1e-11 * (1.0 + norm2(x));
    const double step_tol = 1e-10 * (1.0 + norm2(x));

    auto newton_step = [&](const Vec& tt, const Vec& grad, Vec& step) {
        Mat hess_full = norm_hessian(spec, m_exp, residual(tt));
        Mat h(r, r);
        for (int i = 0; i < r; ++i) {
            Vec hu = matvec(hess_full, onb[static_cast<size_t>(i)]);
            for (int j = 0; j < r; ++j) h(j, i) = dot(onb[static_cast<size_t>(j)], hu);
        }
        double damping = 0.0;
        for (int attempt = 0; attempt < 12; ++attempt) {
            Mat hd = h;
            for (int i = 0; i < r; ++i) hd(i, i) += damping;
            Vec rhs = scale(grad, -1.0);
            Vec d;
            if (solve_linear(hd, rhs, d) && dot(d, grad) < 0.0) {
                step = d;
                return true;
            }
            damping = damping == 0.0 ? 1e-10 * (1.0 + std::abs(h(0, 0))) : damping * 10.0;
        }
        return false;
    };
    auto coeff_grad = [&](const Vec& tt, Vec& grad) {
        Vec g = residual(tt);
        Vec grad_full = norm_grad(spec, m_exp, g);
        grad.assign(static_cast<size_t>(r), 0.0);
        for (int i = 0; i < r; ++i)
            grad[static_cast<size_t>(i)] = -dot(grad_full, onb[static_cast<size_t>(i)]);
        return norm_eval(spec, g) > 0.0;
    };

    double fcur = objective(t);
    for (int iter = 0; iter < 200; ++iter) {
        Vec grad;
        try {
            if (!coeff_grad(t, grad)) break;  // residual hit the origin
        } catch (const DomainError&) {
            break;
        }

        Vec step;
        bool have_step = false;
        try {
            have_step = newton_step(t, grad, step);
        } catch (const DomainError&) {
            return point_at(golden_fallback(objective, t, norm2(d0)));
        }

        if (norm2(grad) <= gtol) break;
        if (!have_step) step = scale(grad, -1.0);

        const double slope = dot(grad, step);
        double alpha = 1.0;
        bool moved = false;
        for (int ls = 0; ls < 60; ++ls) {
            Vec tn = t;
            axpy(alpha, step, tn);
            double fn = objective(tn);
            if (fn <= fcur + 1e-4 * alpha * slope) {
                t = tn;
                fcur = fn;
                moved = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!moved) break;
    }
    // The gradient criterion and the Armijo floor both leave position slack
    // along flat Hessian directions, where objective differences are already
    // below rounding. Pure Newton polishing squares the position error per
    // step; the size guard keeps it inside the quadratic basin.
    try {
        Vec grad;
        if (coeff_grad(t, grad)) {
            Vec step;
            for (int polish = 0; polish < 8; ++polish) {
                if (!newton_step(t, grad, step)) break;
                if (norm2(step) > 1e-4 * (1.0 + norm2(x))) break;
                axpy(1.0, step, t);
                if (norm2(step) <= step_tol) break;
                if (!coeff_grad(t, grad)) break;
            }
        }
    } catch (const DomainError&) {
    }
    // fall back to the derivative-free route if the gradient is still loose
    Vec g = residual(t);
    if (norm_eval(spec, g) > 0.0) {
        Vec grad_full = norm_grad(spec, m_exp, g);
        Vec grad(static_cast<size_t>(r));
        for (int i = 0; i < r; ++i)
            grad[static_cast<size_t>(i)] = -dot(grad_full, onb[static_cast<size_t>(i)]);
        if (norm2(grad) > 1e3 * gtol)
            return point_at(golden_fallback(objective, t, norm2(d0)));
    }
    return point_at(t);
}

DiscreteMeasure project_measure(const DiscreteMeasure& mu, const AffineSubspace& space,
                                const NormSpec& spec, double p) {
    DiscreteMeasure hat =
        pushforward(mu, [&](const Vec& y) { return project_point(y, space, spec, p); });
    // the projection plan must be optimal: the solver has to agree with the
    // integrated pointwise cost
    double direct = 0.0;
    for (const Atom& a : mu.atoms)
        direct +=
            a.weight *
            std::pow(norm_eval(spec, sub(a.point, project_point(a.point, space, spec, p))), p);
    double direct_dist = std::pow(direct, 1.0 / p);
    double solver_dist = solve(mu, hat, spec, p).distance;
    if (std::abs(direct_dist - solver_dist) > 1e-8 * (1.0 + direct_dist))
        throw DomainError("project_measure: solver disagrees with the projection cost");
    return hat;
}

bool kernel_membership(const Vec& x, const AffineSubspace& space, const NormSpec& spec,
                       double p) {
    if (norm2(space.base) > 1e-12)
        throw DomainError("kernel_membership requires a subspace through the origin");
    Vec px = project_point(x, space, spec, p);
    return norm2(px) <= 1e-8 * (1.0 + norm2(x));
}

AffineSubspace max_subspace_in_kernel(const AffineSubspace& space, const NormSpec& spec,
                                      double p, const std::vector<Vec>& seeds) {
    if (seeds.empty()) throw DomainError("max_subspace_in_kernel: seeds required");
    const int n = space.dim();
    std::vector<Vec> members;
    for (const Vec& s : seeds)
        if (norm2(s) > 1e-10 && kernel_membership(s, space, spec, p)) members.push_back(s);
    if (members.empty())
        throw DomainError("max_subspace_in_kernel: no seed lies in the kernel set");

    std::vector<Vec> span_onb = orthonormalize({members[0]});
    Rng rng(0);

    // candidates after the seeds: sphere samples dropped into the kernel via
    // y -> y - P_L(y)
    std::vector<Vec> candidates(members.begin() + 1, members.end());
    for (const Vec& y : sphere_sample(n, 24, 1)) {
        Vec ky = sub(y, project_point(y, space, spec, p));
        if (norm2(ky) > 1e-8) candidates.push_back(ky);
    }

    for (const Vec& cand : candidates) {
        if (static_cast<int>(span_onb.size()) >= n) break;
        if (residual_to_span(cand, zeros(n), span_onb) <= 1e-8 * (1.0 + norm2(cand)))
            continue;  // already inside the current span
        std::vector<Vec> with_cand = span_onb;
        with_cand.push_back(cand);
        std::vector<Vec> trial = orthonormalize(with_cand);
        if (trial.size() != span_onb.size() + 1) continue;

        bool all_pass = true;
        for (int probe = 0; probe < 15 && all_pass; ++probe) {
            Vec dir = zeros(n);
            for (const Vec& u : trial) axpy(rng.gaussian(), u, dir);
            double dn = norm2(dir);
            if (dn < 1e-12) continue;
            dir = scale(dir, 1.0 / dn);
            for (double radius : {0.5, 2.0}) {
                if (!kernel_membership(scale(dir, radius), space, spec, p)) {
                    all_pass = false;
                    break;
                }
            }
        }
        if (all_pass) span_onb = trial;
    }
    return AffineSubspace{zeros(n), span_onb};
}

Fingerprint fingerprint(const DiscreteMeasure& mu, const AffineSubspace& L,
                        const AffineSubspace& H, const NormSpec& spec, double p) {
    return Fingerprint{project_measure(mu, L, spec, p), project_measure(mu, H, spec, p)};
}

bool fingerprint_equal(const Fingerprint& a, const Fingerprint& b, double pos_tol,
                       double w_tol) {
    return measure_equal(a.proj_L, b.proj_L, pos_tol, w_tol) &&
           measure_equal(a.proj_H, b.proj_H, pos_tol, w_tol);
}

FamilyCheck family_F_check(const DiscreteMeasure& mu, const AffineSubspace& L,
                           const AffineSubspace& H, const NormSpec& spec, double p) {
    const size_t m = mu.atoms.size();
    for (size_t i = 0; i < m; ++i)
        for (size_t j = i + 1; j < m; ++j)
            if (std::abs(mu.atoms[i].weight - mu.atoms[j].weight) <= 1e-9)
                return {false, "weights not pairwise distinct"};
    std::vector<Vec> pl, ph;
    for (const Atom& a : mu.atoms) {
        pl.push_back(project_point(a.point, L, spec, p));
        ph.push_back(project_point(a.point, H, spec, p));
    }
    for (size_t i = 0; i < m; ++i)
        for (size_t j = i + 1; j < m; ++j) {
            if (dist2(pl[i], pl[j]) <= 1e-9) return {false, "projections onto L collide"};
            if (dist2(ph[i], ph[j]) <= 1e-9) return {false, "projections onto H collide"};
        }
    return {true, ""};
}

PerturbationTriple perturbation_triple(const DiscreteMeasure& mu,
                                       const AffineSubspace& L,
                                       const AffineSubspace& H, const NormSpec& spec,
                                       double p, double h0, int k0, int k1, int k2,
                                       const Mat& b) {
    const int m = static_cast<int>(mu.atoms.size());
    FamilyCheck fc = family_F_check(mu, L, H, spec, p);
    if (!fc.member)
        throw DomainError("perturbation_triple: measure not in the family (" + fc.reason + ")");
    if (k0 < 0 || k0 >= m || k1 < 0 || k1 >= m || k2 < 0 || k2 >= m || k1 == k2)
        throw DomainError("perturbation_triple: bad indices");
    if (b.rows() != m || b.cols() != m)
        throw DomainError("perturbation_triple: weight table must be M x M");
    for (int i = 0; i < m; ++i) {
        double row = 0.0, col = 0.0;
        for (int j = 0; j < m; ++j) {
            if (b(i, j) < -1e-15) throw DomainError("perturbation_triple: negative table entry");
            row += b(i, j);
            col += b(j, i);
        }
        if (std::abs(row - mu.atoms[static_cast<size_t>(i)].weight) > 1e-9 ||
            std::abs(col - mu.atoms[static_cast<size_t>(i)].weight) > 1e-9)
            throw DomainError("perturbation_triple: table marginals must equal the weights");
    }
    if (!(b(k0, k1) > 0.0) || !(b(k0, k2) > 0.0))
        throw DomainError("perturbation_triple: b[k0][k1] and b[k0][k2] must be positive");

    const std::vector<Vec> h_onb = subspace_onb(H);

    std::vector<Vec> ph(static_cast<size_t>(m));
    std::vector<Vec> pl(static_cast<size_t>(m));
    for (int k = 0; k < m; ++k) {
        ph[static_cast<size_t>(k)] =
            project_point(mu.atoms[static_cast<size_t>(k)].point, H, spec, p);
        pl[static_cast<size_t>(k)] =
            project_point(mu.atoms[static_cast<size_t>(k)].point, L, spec, p);
    }

    // grid point (H + x_k) cap P_H^{-1}(P_H(x_{k'})): shift x_k inside its
    // H-translate so the H-projection lands on P_H(x_{k'}); the shift
    // P_H(x_{k'}) - P_H(x_k) must be representable in the span of H.
    auto grid_point = [&](int k, int kp) {
        Vec delta = sub(ph[static_cast<size_t>(kp)], ph[static_cast<size_t>(k)]);
        if (residual_to_span(delta, zeros(mu.dim), h_onb) > 1e-8 * (1.0 + norm2(delta)))
            throw DomainError(
                "perturbation_triple: grid system is singular (H-fibers not parallel)");
        return add(mu.atoms[static_cast<size_t>(k)].point, delta);
    };

    PerturbationTriple out;
    out.grid.assign(static_cast<size_t>(m), std::vector<Vec>(static_cast<size_t>(m)));
    for (int k = 0; k < m; ++k)
        for (int kp = 0; kp < m; ++kp) {
            Vec g = grid_point(k, kp);
            // complementarity: a shift along H must not move the L-projection
            Vec plg = project_point(g, L, spec, p);
            if (dist2(plg, pl[static_cast<size_t>(k)]) > 1e-7 * (1.0 + norm2(g)))
                throw DomainError(
                    "perturbation_triple: L and H are not complementary for this norm");
            out.grid[static_cast<size_t>(k)][static_cast<size_t>(kp)] = std::move(g);
        }

    double h = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m * m; ++i)
        for (int j = i + 1; j < m * m; ++j) {
            const Vec& gi = out.grid[static_cast<size_t>(i / m)][static_cast<size_t>(i % m)];
            const Vec& gj = out.grid[static_cast<size_t>(j / m)][static_cast<size_t>(j % m)];
            h = std::min(h, norm_eval(spec, sub(gi, gj)));
        }
    if (!(h0 > 0.0) || !(h0 < 0.5 * h))
        throw DomainError("perturbation_triple: need 0 < h0 < h/2 with h = " +
                          std::to_string(h));

    // shift direction: away from the H-projection, which moves the
    // L-fingerprint atom while fixing the H-projection
    const Vec& x_k0 = mu.atoms[static_cast<size_t>(k0)].point;
    Vec w = sub(x_k0, ph[static_cast<size_t>(k0)]);
    double wn = norm_eval(spec, w);
    if (wn <= 1e-10)
        throw DomainError("perturbation_triple: atom k0 lies on H, shift direction undefined");
    Vec x0 = x_k0;
    axpy(h0 / wn, w, x0);
    out.x0 = x0;
    out.h = h;
    out.h0 = h0;
    out.a0 = 0.5 * std::min(b(k0, k1), b(k0, k2));

    out.mu_prime = shift_weight(mu, static_cast<size_t>(k0), x0, out.a0);

    std::vector<Atom> nu_atoms;
    for (int k = 0; k < m; ++k)
        for (int kp = 0; kp < m; ++kp)
            if (b(k, kp) > 0.0)
                nu_atoms.push_back(
                    Atom{out.grid[static_cast<size_t>(k)][static_cast<size_t>(kp)], b(k, kp)});
    out.nu = make_measure(mu.dim, std::move(nu_atoms), 1e-9);

    Vec ph_x0 = project_point(x0, H, spec, p);
    auto shifted_grid_target = [&](int kp) {
        Vec delta = sub(ph[static_cast<size_t>(kp)], ph_x0);
        return add(x0, delta);
    };
    auto find_nu_atom = [&](int k, int kp) {
        const Vec& pt = out.grid[static_cast<size_t>(k)][static_cast<size_t>(kp)];
        for (size_t i = 0; i < out.nu.atoms.size(); ++i)
            if (dist2(out.nu.atoms[i].point, pt) < 1e-12) return i;
        throw DomainError("perturbation_triple: grid atom missing from nu");
    };
    out.nu1_prime = shift_weight(out.nu, find_nu_atom(k0, k1), shifted_grid_target(k1), out.a0);
    out.nu2_prime = shift_weight(out.nu, find_nu_atom(k0, k2), shifted_grid_target(k2), out.a0);
    return out;
}

}  // namespace otlab
