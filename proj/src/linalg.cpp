#include "otlab/linalg.hpp"

#include <algorithm>

namespace otlab {

bool solve_linear(Mat a, Vec b, Vec& out) {
    const int n = a.rows();
    if (a.cols() != n || static_cast<int>(b.size()) != n) return false;
    std::vector<int> perm(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) perm[static_cast<size_t>(i)] = i;

    for (int col = 0; col < n; ++col) {
        int piv = col;
        double best = std::abs(a(col, col));
        for (int r = col + 1; r < n; ++r) {
            double v = std::abs(a(r, col));
            if (v > best) {
                best = v;
                piv = r;
            }
        }
        if (best < 1e-300) return false;
        if (piv != col) {
            for (int j = 0; j < n; ++j) std::swap(a(piv, j), a(col, j));
            std::swap(b[static_cast<size_t>(piv)], b[static_cast<size_t>(col)]);
        }
        double d = a(col, col);
        for (int r = col + 1; r < n; ++r) {
            double f = a(r, col) / d;
            if (f == 0.0) continue;
            for (int j = col; j < n; ++j) a(r, j) -= f * a(col, j);
            b[static_cast<size_t>(r)] -= f * b[static_cast<size_t>(col)];
        }
    }
    out.assign(static_cast<size_t>(n), 0.0);
    for (int i = n - 1; i >= 0; --i) {
        double s = b[static_cast<size_t>(i)];
        for (int j = i + 1; j < n; ++j) s -= a(i, j) * out[static_cast<size_t>(j)];
        out[static_cast<size_t>(i)] = s / a(i, i);
    }
    for (double v : out)
        if (!std::isfinite(v)) return false;
    return true;
}

std::vector<double> symmetric_eigenvalues(Mat a) {
    const int n = a.rows();
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
        if (off < 1e-30) break;
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                if (std::abs(a(p, q)) < 1e-300) continue;
                double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                double t = (theta >= 0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;
                for (int k = 0; k < n; ++k) {
                    double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
            }
        }
    }
    std::vector<double> ev(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) ev[static_cast<size_t>(i)] = a(i, i);
    std::sort(ev.begin(), ev.end());
    return ev;
}

std::vector<Vec> orthonormalize(const std::vector<Vec>& vs, double drop_tol) {
    std::vector<Vec> onb;
    for (const Vec& v : vs) {
        Vec w = v;
        double scale0 = norm2(v);
        if (scale0 < 1e-300) continue;
        for (const Vec& u : onb) axpy(-dot(w, u), u, w);
        // second pass for numerical orthogonality
        for (const Vec& u : onb) axpy(-dot(w, u), u, w);
        double r = norm2(w);
        if (r / scale0 <= drop_tol) continue;
        onb.push_back(scale(w, 1.0 / r));
    }
    return onb;
}

double residual_to_span(const Vec& x, const Vec& base, const std::vector<Vec>& onb) {
    Vec w = sub(x, base);
    for (const Vec& u : onb) axpy(-dot(w, u), u, w);
    return norm2(w);
}

}  // namespace otlab
