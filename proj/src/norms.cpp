#include "otlab/norms.hpp"

#include <algorithm>
#include <cmath>

namespace otlab {

namespace {

double sgn(double x) { return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0); }

double pow_abs(double x, double e) { return std::pow(std::abs(x), e); }

double fd_step(const Vec& x) { return 1e-5 * std::max(1.0, norm2(x)); }

void require_finite(const Vec& x) {
    if (!all_finite(x)) throw DomainError("vector has non-finite coordinates");
}

}  // namespace

NormSpec NormSpec::euclidean() {
    NormSpec s;
    s.kind = NormKind::euclidean;
    s.strictly_convex = true;
    s.smoothness_order = 2;
    return s;
}

NormSpec NormSpec::lq(double q) {
    if (!(q > 1.0)) throw DomainError("lq norm requires q > 1");
    NormSpec s;
    s.kind = NormKind::lq;
    s.q = q;
    s.strictly_convex = true;
    s.smoothness_order = q >= 2.0 ? 2 : 1;
    return s;
}

NormSpec NormSpec::linf() {
    NormSpec s;
    s.kind = NormKind::linf;
    s.strictly_convex = false;
    s.smoothness_order = 0;
    return s;
}

NormSpec NormSpec::l1() {
    NormSpec s;
    s.kind = NormKind::l1;
    s.strictly_convex = false;
    s.smoothness_order = 0;
    return s;
}

NormSpec NormSpec::custom(std::function<double(const Vec&)> value,
                          bool strictly_convex, int smoothness_order) {
    NormSpec s;
    s.kind = NormKind::custom;
    s.custom_value = std::move(value);
    s.strictly_convex = strictly_convex;
    s.smoothness_order = smoothness_order;
    return s;
}

std::string NormSpec::name() const {
    switch (kind) {
        case NormKind::euclidean: return "euclidean";
        case NormKind::lq: return "lq(" + std::to_string(q) + ")";
        case NormKind::linf: return "linf";
        case NormKind::l1: return "l1";
        case NormKind::custom: return "custom";
    }
    return "?";
}

double norm_eval(const NormSpec& spec, const Vec& x) {
    require_finite(x);
    switch (spec.kind) {
        case NormKind::euclidean:
            return norm2(x);
        case NormKind::lq: {
            double m = 0.0;
            for (double v : x) m = std::max(m, std::abs(v));
            if (m == 0.0) return 0.0;
            double s = 0.0;
            for (double v : x) s += std::pow(std::abs(v) / m, spec.q);
            return m * std::pow(s, 1.0 / spec.q);
        }
        case NormKind::linf: {
            double m = 0.0;
            for (double v : x) m = std::max(m, std::abs(v));
            return m;
        }
        case NormKind::l1: {
            double s = 0.0;
            for (double v : x) s += std::abs(v);
            return s;
        }
        case NormKind::custom:
            if (!spec.custom_value)
                throw DomainError("custom norm is missing its value function");
            return spec.custom_value(x);
    }
    throw DomainError("unknown norm kind");
}

Vec fd_gradient(const NormSpec& spec, double p, const Vec& x) {
    const double h = fd_step(x);
    Vec g(x.size());
    Vec xp = x, xm = x;
    for (size_t i = 0; i < x.size(); ++i) {
        xp[i] = x[i] + h;
        xm[i] = x[i] - h;
        double fp = std::pow(norm_eval(spec, xp), p);
        double fm = std::pow(norm_eval(spec, xm), p);
        g[i] = (fp - fm) / (2.0 * h);
        xp[i] = x[i];
        xm[i] = x[i];
    }
    return g;
}

Mat fd_hessian(const NormSpec& spec, double p, const Vec& x) {
    const int n = static_cast<int>(x.size());
    const double h = fd_step(x);
    const bool have_grad = spec.kind == NormKind::euclidean || spec.kind == NormKind::lq ||
                           (spec.kind == NormKind::custom && spec.custom_grad);
    Mat hess(n, n);
    if (have_grad) {
        Vec xp = x, xm = x;
        for (int i = 0; i < n; ++i) {
            xp[static_cast<size_t>(i)] = x[static_cast<size_t>(i)] + h;
            xm[static_cast<size_t>(i)] = x[static_cast<size_t>(i)] - h;
            Vec gp = norm_grad(spec, p, xp);
            Vec gm = norm_grad(spec, p, xm);
            for (int j = 0; j < n; ++j)
                hess(i, j) = (gp[static_cast<size_t>(j)] - gm[static_cast<size_t>(j)]) / (2.0 * h);
            xp[static_cast<size_t>(i)] = x[static_cast<size_t>(i)];
            xm[static_cast<size_t>(i)] = x[static_cast<size_t>(i)];
        }
        // symmetrize
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                double v = 0.5 * (hess(i, j) + hess(j, i));
                hess(i, j) = v;
                hess(j, i) = v;
            }
        return hess;
    }
    // value-based second differences; larger step balances cancellation
    const double h2 = 2e-4 * std::max(1.0, norm2(x));
    auto f = [&](const Vec& y) { return std::pow(norm_eval(spec, y), p); };
    double f0 = f(x);
    Vec y = x;
    for (int i = 0; i < n; ++i) {
        y[static_cast<size_t>(i)] += h2;
        double fp = f(y);
        y[static_cast<size_t>(i)] -= 2.0 * h2;
        double fm = f(y);
        y[static_cast<size_t>(i)] += h2;
        hess(i, i) = (fp - 2.0 * f0 + fm) / (h2 * h2);
    }
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            y = x;
            y[static_cast<size_t>(i)] += h2;
            y[static_cast<size_t>(j)] += h2;
            double fpp = f(y);
            y[static_cast<size_t>(j)] -= 2.0 * h2;
            double fpm = f(y);
            y[static_cast<size_t>(i)] -= 2.0 * h2;
            double fmm = f(y);
            y[static_cast<size_t>(j)] += 2.0 * h2;
            double fmp = f(y);
            double v = (fpp - fpm - fmp + fmm) / (4.0 * h2 * h2);
            hess(i, j) = v;
            hess(j, i) = v;
        }
    return hess;
}

Vec norm_grad(const NormSpec& spec, double p, const Vec& x) {
    require_finite(x);
    if (!(p >= 1.0)) throw DomainError("norm_grad requires p_exponent >= 1");
    const int n = static_cast<int>(x.size());
    const double nx = norm_eval(spec, x);
    if (nx == 0.0) {
        if (p < 2.0) throw DomainError("gradient of N^p undefined at the origin for p < 2");
        return zeros(n);
    }
    switch (spec.kind) {
        case NormKind::euclidean:
            return scale(x, p * std::pow(nx, p - 2.0));
        case NormKind::lq: {
            Vec g(x.size());
            const double c = p * std::pow(nx, p - spec.q);
            for (size_t i = 0; i < x.size(); ++i)
                g[i] = c * sgn(x[i]) * pow_abs(x[i], spec.q - 1.0);
            return g;
        }
        case NormKind::custom:
            if (spec.custom_grad) {
                Vec gn = spec.custom_grad(x);
                return scale(gn, p * std::pow(nx, p - 1.0));
            }
            return fd_gradient(spec, p, x);
        case NormKind::linf:
        case NormKind::l1:
            return fd_gradient(spec, p, x);
    }
    throw DomainError("unknown norm kind");
}

Mat norm_hessian(const NormSpec& spec, double p, const Vec& x) {
    require_finite(x);
    const int n = static_cast<int>(x.size());
    const double nx = norm_eval(spec, x);
    if (nx == 0.0) throw DomainError("Hessian of N^p undefined at the origin");
    switch (spec.kind) {
        case NormKind::euclidean: {
            Mat h(n, n);
            const double c1 = p * std::pow(nx, p - 2.0);
            const double c2 = p * (p - 2.0) * std::pow(nx, p - 4.0);
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < n; ++j)
                    h(i, j) = c2 * x[static_cast<size_t>(i)] * x[static_cast<size_t>(j)];
                h(i, i) += c1;
            }
            return h;
        }
        case NormKind::lq: {
            const double q = spec.q;
            for (double v : x)
                if (v == 0.0 && q < 2.0)
                    throw DomainError("lq Hessian unbounded on coordinate hyperplanes for q < 2");
            Mat h(n, n);
            const double c_off = p * (p - q) * std::pow(nx, p - 2.0 * q);
            const double c_diag = p * (q - 1.0) * std::pow(nx, p - q);
            for (int i = 0; i < n; ++i) {
                const double xi = x[static_cast<size_t>(i)];
                for (int j = 0; j < n; ++j) {
                    const double xj = x[static_cast<size_t>(j)];
                    h(i, j) = c_off * sgn(xi) * sgn(xj) * pow_abs(xi, q - 1.0) *
                              pow_abs(xj, q - 1.0);
                }
                // |xi|^(q-2) extends continuously across xi = 0 when q > 2
                h(i, i) += c_diag * pow_abs(xi, q - 2.0);
            }
            return h;
        }
        case NormKind::custom:
            if (spec.custom_hess && spec.custom_grad) {
                // Hess N^p = p N^(p-1) Hess N + p(p-1) N^(p-2) grad N grad N'
                Mat hn = spec.custom_hess(x);
                Vec gn = spec.custom_grad(x);
                Mat h(n, n);
                const double c1 = p * std::pow(nx, p - 1.0);
                const double c2 = p * (p - 1.0) * std::pow(nx, p - 2.0);
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j)
                        h(i, j) = c1 * hn(i, j) +
                                  c2 * gn[static_cast<size_t>(i)] * gn[static_cast<size_t>(j)];
                return h;
            }
            return fd_hessian(spec, p, x);
        case NormKind::linf:
        case NormKind::l1:
            return fd_hessian(spec, p, x);
    }
    throw DomainError("unknown norm kind");
}

std::vector<Vec> sphere_sample(int dim, int count, uint64_t seed) {
    if (dim < 1) throw DomainError("sphere_sample requires dim >= 1");
    if (count < 1) throw DomainError("sphere_sample requires count >= 1");
    Rng rng(seed);
    std::vector<Vec> out;
    out.reserve(static_cast<size_t>(count));
    while (static_cast<int>(out.size()) < count) {
        Vec v = rng.gaussian_vec(dim);
        double r = norm2(v);
        if (r < 1e-12) continue;
        out.push_back(scale(v, 1.0 / r));
    }
    return out;
}

std::vector<Vec> sphere_sample_normed(int dim, int count, uint64_t seed,
                                      const NormSpec& spec) {
    std::vector<Vec> out = sphere_sample(dim, count, seed);
    for (Vec& v : out) v = scale(v, 1.0 / norm_eval(spec, v));
    return out;
}

}  // namespace otlab
