#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace otlab {

using Vec = std::vector<double>;

// Thrown on semantically invalid inputs (bad measures, out-of-domain points,
// unsupported norm/operation combinations). The CLI maps this to exit code 3.
struct DomainError : std::runtime_error {
    explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

// Thrown on malformed invocations and unreadable inputs. CLI exit code 2.
struct UsageError : std::runtime_error {
    explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

struct OracleUnavailable : DomainError {
    explicit OracleUnavailable(const std::string& msg) : DomainError(msg) {}
};

// Dense row-major matrix, sized for the small systems this project solves.
class Mat {
public:
    Mat() = default;
    Mat(int rows, int cols, double fill = 0.0)
        : rows_(rows), cols_(cols), a_(static_cast<size_t>(rows) * cols, fill) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    double& operator()(int i, int j) { return a_[static_cast<size_t>(i) * cols_ + j]; }
    double operator()(int i, int j) const { return a_[static_cast<size_t>(i) * cols_ + j]; }

    static Mat identity(int n) {
        Mat m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> a_;
};

inline Vec add(const Vec& a, const Vec& b) {
    Vec r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

inline Vec sub(const Vec& a, const Vec& b) {
    Vec r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

inline Vec scale(const Vec& a, double s) {
    Vec r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] * s;
    return r;
}

inline void axpy(double s, const Vec& x, Vec& y) {
    for (size_t i = 0; i < x.size(); ++i) y[i] += s * x[i];
}

inline double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

inline double dist2(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

inline Vec zeros(int n) { return Vec(static_cast<size_t>(n), 0.0); }

inline Vec basis_vector(int n, int i) {
    Vec e = zeros(n);
    e[static_cast<size_t>(i)] = 1.0;
    return e;
}

inline bool all_finite(const Vec& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

inline Vec matvec(const Mat& m, const Vec& x) {
    Vec r(static_cast<size_t>(m.rows()), 0.0);
    for (int i = 0; i < m.rows(); ++i) {
        double s = 0.0;
        for (int j = 0; j < m.cols(); ++j) s += m(i, j) * x[static_cast<size_t>(j)];
        r[static_cast<size_t>(i)] = s;
    }
    return r;
}

// v2' M v1
inline double bilinear(const Vec& v2, const Mat& m, const Vec& v1) {
    double s = 0.0;
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j)
            s += v2[static_cast<size_t>(i)] * m(i, j) * v1[static_cast<size_t>(j)];
    return s;
}

// Gaussian elimination with partial pivoting. Returns false when the system is
// numerically singular.
bool solve_linear(Mat a, Vec b, Vec& out);

// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
std::vector<double> symmetric_eigenvalues(Mat a);

// Modified Gram-Schmidt. Returns an orthonormal basis of the span; vectors
// whose residual falls below drop_tol are discarded.
std::vector<Vec> orthonormalize(const std::vector<Vec>& vs, double drop_tol = 1e-10);

// Euclidean distance from x to the affine space base + span(onb).
double residual_to_span(const Vec& x, const Vec& base, const std::vector<Vec>& onb);

// Deterministic splitmix64 generator; identical streams across platforms, so
// seeded scenario output stays byte-stable.
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t next_u64() {
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // [0, 1)
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    int uniform_int(int n) { return static_cast<int>(next_u64() % static_cast<uint64_t>(n)); }

    double gaussian() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        double u1 = 1.0 - uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * 3.14159265358979323846 * u2;
        cached_ = r * std::sin(a);
        have_cached_ = true;
        return r * std::cos(a);
    }

    Vec gaussian_vec(int dim) {
        Vec v(static_cast<size_t>(dim));
        for (auto& x : v) x = gaussian();
        return v;
    }

private:
    uint64_t state_;
    bool have_cached_ = false;
    double cached_ = 0.0;
};

}  // namespace otlab
