#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "otlab/linalg.hpp"

namespace otlab {

enum class NormKind { euclidean, lq, linf, l1, custom };

// Pluggable norm N: R^n -> R+. Built-in families carry analytic derivatives of
// x -> N(x)^p; custom norms fall back to central finite differences with step
// 1e-5 * max(1, |x|).
struct NormSpec {
    NormKind kind = NormKind::euclidean;
    double q = 2.0;  // lq exponent, q > 1

    std::function<double(const Vec&)> custom_value;
    std::function<Vec(const Vec&)> custom_grad;    // gradient of N itself, optional
    std::function<Mat(const Vec&)> custom_hess;    // Hessian of N itself, optional

    bool strictly_convex = true;
    int smoothness_order = 2;  // away from the origin

    static NormSpec euclidean();
    static NormSpec lq(double q);
    static NormSpec linf();
    static NormSpec l1();
    static NormSpec custom(std::function<double(const Vec&)> value,
                           bool strictly_convex, int smoothness_order);

    std::string name() const;
};

double norm_eval(const NormSpec& spec, const Vec& x);

// Gradient of x -> N(x)^p_exponent.
Vec norm_grad(const NormSpec& spec, double p_exponent, const Vec& x);

// Hessian of x -> N(x)^p_exponent, symmetric n x n.
Mat norm_hessian(const NormSpec& spec, double p_exponent, const Vec& x);

// Central finite differences of N^p, step 1e-5 * max(1, |x|). Independent
// check used against the analytic routes.
Vec fd_gradient(const NormSpec& spec, double p_exponent, const Vec& x);
Mat fd_hessian(const NormSpec& spec, double p_exponent, const Vec& x);

// Deterministic quasi-uniform unit vectors (Euclidean-normalized).
std::vector<Vec> sphere_sample(int dim, int count, uint64_t seed);

// Same samples rescaled so that N(x) = 1.
std::vector<Vec> sphere_sample_normed(int dim, int count, uint64_t seed,
                                      const NormSpec& spec);

}  // namespace otlab
