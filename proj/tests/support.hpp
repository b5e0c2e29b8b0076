#ifndef BDIE_TESTS_SUPPORT_HPP
#define BDIE_TESTS_SUPPORT_HPP

#include <functional>
#include <random>

#include "bdie/coefficient.hpp"
#include "bdie/quadrature.hpp"
#include "bdie/types.hpp"

namespace bdie::testing {

inline std::mt19937& rng() {
    static std::mt19937 gen(0x5eed5u);
    return gen;
}

inline double uniform(double lo, double hi) {
    std::uniform_real_distribution<double> d(lo, hi);
    return d(rng());
}

inline Vec3 random_point(double lo, double hi) {
    return {uniform(lo, hi), uniform(lo, hi), uniform(lo, hi)};
}

inline Vec3 random_unit() {
    Vec3 v;
    do {
        v = random_point(-1.0, 1.0);
    } while (v.norm() < 1e-3);
    return v.normalized();
}

// Central finite differences.
inline Vec3 fd_gradient(const std::function<double(const Vec3&)>& f, const Vec3& x, double h) {
    Vec3 g;
    for (int i = 0; i < 3; ++i) {
        Vec3 e = Vec3::Zero();
        e[i] = h;
        g[i] = (f(x + e) - f(x - e)) / (2.0 * h);
    }
    return g;
}

inline double fd_laplacian(const std::function<double(const Vec3&)>& f, const Vec3& x, double h) {
    double s = 0.0;
    const double fx = f(x);
    for (int i = 0; i < 3; ++i) {
        Vec3 e = Vec3::Zero();
        e[i] = h;
        s += (f(x + e) - 2.0 * fx + f(x - e)) / (h * h);
    }
    return s;
}

/// A u = a lap u + grad a . grad u via central differences.
inline double fd_apply_A(const CoefficientField& a, const std::function<double(const Vec3&)>& u,
                         const Vec3& x, double h) {
    return a.eval(x) * fd_laplacian(u, x, h) + a.grad(x).dot(fd_gradient(u, x, h));
}

/// High-order panel oracle: uniform subdivision + collapsed order-10 rule.
inline double panel_oracle(const std::function<double(const Vec3&)>& fn, const quad::Panel& t,
                           int depth) {
    if (depth <= 0) return quad::detail::apply_rule(fn, t, quad::TriangleRule::of_order(10));
    const Vec3 m01 = 0.5 * (t[0] + t[1]), m12 = 0.5 * (t[1] + t[2]), m20 = 0.5 * (t[2] + t[0]);
    return panel_oracle(fn, {t[0], m01, m20}, depth - 1) +
           panel_oracle(fn, {t[1], m12, m01}, depth - 1) +
           panel_oracle(fn, {t[2], m20, m12}, depth - 1) +
           panel_oracle(fn, {m01, m12, m20}, depth - 1);
}

} // namespace bdie::testing

#endif
