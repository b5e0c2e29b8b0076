#ifndef BDIE_QUADRATURE_HPP
#define BDIE_QUADRATURE_HPP

#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "bdie/coefficient.hpp"
#include "bdie/kernels.hpp"
#include "bdie/types.hpp"

namespace bdie::quad {

using Panel = std::array<Vec3, 3>;
using Cell = std::array<Vec3, 4>;

/// Symmetric rule on the reference triangle; weights are positive and sum
/// to 1, so integral = area * sum(w_i * f(p_i)). of_order returns a rule
/// exact for polynomials of degree >= requested (field `order` records the
/// guaranteed degree, which may exceed the request).
struct TriangleRule {
    int order = 0;
    std::vector<std::array<double, 3>> points; // barycentric
    std::vector<double> weights;
    static const TriangleRule& of_order(int order);
};

struct TetRule {
    int order = 0;
    std::vector<std::array<double, 4>> points;
    std::vector<double> weights;
    static const TetRule& of_order(int order);
};

enum class SelfTermStrategy { analytic_ball, duffy };

struct SingularPolicy {
    double near_threshold = 2.0; // multiples of the element diameter
    int max_subdivision_depth = 4;
    SelfTermStrategy self_term = SelfTermStrategy::analytic_ball;
    double eps_sing = 1e-300; // callers scale this from the domain diameter

    void validate() const;
};

namespace detail {

template <class F>
double apply_rule(F&& fn, const Panel& t, const TriangleRule& rule) {
    const double area = 0.5 * (t[1] - t[0]).cross(t[2] - t[0]).norm();
    double s = 0.0;
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
        const auto& l = rule.points[q];
        s += rule.weights[q] * fn(Vec3(l[0] * t[0] + l[1] * t[1] + l[2] * t[2]));
    }
    return area * s;
}

template <class F>
double apply_rule(F&& fn, const Cell& t, const TetRule& rule) {
    const double vol = std::abs((t[1] - t[0]).cross(t[2] - t[0]).dot(t[3] - t[0])) / 6.0;
    double s = 0.0;
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
        const auto& l = rule.points[q];
        s += rule.weights[q] * fn(Vec3(l[0] * t[0] + l[1] * t[1] + l[2] * t[2] + l[3] * t[3]));
    }
    return vol * s;
}

inline double panel_diam(const Panel& t) {
    return std::max({(t[1] - t[0]).norm(), (t[2] - t[1]).norm(), (t[0] - t[2]).norm()});
}

inline double cell_diam(const Cell& t) {
    double d = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) d = std::max(d, (t[j] - t[i]).norm());
    return d;
}

void octasect(const Cell& t, Cell children[8]);

template <class F>
double integrate_panel_rec(F&& fn, const Panel& t, const Vec3& target, double threshold,
                           int depth, const TriangleRule& rule) {
    const Vec3 centroid = (t[0] + t[1] + t[2]) / 3.0;
    if (depth <= 0 || (target - centroid).norm() > threshold * panel_diam(t))
        return apply_rule(fn, t, rule);
    const Vec3 m01 = 0.5 * (t[0] + t[1]), m12 = 0.5 * (t[1] + t[2]), m20 = 0.5 * (t[2] + t[0]);
    return integrate_panel_rec(fn, Panel{t[0], m01, m20}, target, threshold, depth - 1, rule) +
           integrate_panel_rec(fn, Panel{t[1], m12, m01}, target, threshold, depth - 1, rule) +
           integrate_panel_rec(fn, Panel{t[2], m20, m12}, target, threshold, depth - 1, rule) +
           integrate_panel_rec(fn, Panel{m01, m12, m20}, target, threshold, depth - 1, rule);
}

template <class F>
double integrate_cell_rec(F&& fn, const Cell& t, const Vec3& target, double threshold, int depth,
                          const TetRule& rule) {
    const Vec3 bary = (t[0] + t[1] + t[2] + t[3]) / 4.0;
    if (depth <= 0 || (target - bary).norm() > threshold * cell_diam(t))
        return apply_rule(fn, t, rule);
    Cell children[8];
    octasect(t, children);
    double s = 0.0;
    for (const Cell& c : children)
        s += integrate_cell_rec(fn, c, target, threshold, depth - 1, rule);
    return s;
}

} // namespace detail

/// Far targets (dist > near_threshold * diam) get the fixed rule; near targets
/// recursive 4-way subdivision bounded by max_subdivision_depth. Targets on
/// the panel raise SingularityError (the self path handles those).
template <class F>
double integrate_panel_t(F&& fn, const Panel& tri, const Vec3& target,
                         const SingularPolicy& policy, const TriangleRule& rule) {
    const Vec3 centroid = (tri[0] + tri[1] + tri[2]) / 3.0;
    if ((target - centroid).norm() > policy.near_threshold * detail::panel_diam(tri))
        return detail::apply_rule(fn, tri, rule);
    return detail::integrate_panel_rec(fn, tri, target, policy.near_threshold,
                                       policy.max_subdivision_depth, rule);
}

template <class F>
double integrate_cell_t(F&& fn, const Cell& tet, const Vec3& target, const SingularPolicy& policy,
                        const TetRule& rule) {
    const Vec3 bary = (tet[0] + tet[1] + tet[2] + tet[3]) / 4.0;
    if ((target - bary).norm() > policy.near_threshold * detail::cell_diam(tet))
        return detail::apply_rule(fn, tet, rule);
    return detail::integrate_cell_rec(fn, tet, target, policy.near_threshold,
                                      policy.max_subdivision_depth, rule);
}

// std::function entry points (checked variants; the singular pre-check lives
// here so templated hot loops can skip it).

double integrate_panel(const std::function<double(const Vec3&)>& fn, const Panel& tri,
                       const Vec3& target, const SingularPolicy& policy,
                       const TriangleRule& rule);
double integrate_panel(const std::function<double(const Vec3&)>& fn, const Panel& tri,
                       const Vec3& target, const SingularPolicy& policy);

double integrate_cell(const std::function<double(const Vec3&)>& fn, const Cell& tet,
                      const Vec3& target, const SingularPolicy& policy, const TetRule& rule);
double integrate_cell(const std::function<double(const Vec3&)>& fn, const Cell& tet,
                      const Vec3& target, const SingularPolicy& policy);

// Self terms: kernels of the form smooth(x) * sigma / (4 pi |x-c|).
// Panels use singularity subtraction with the exact flat-triangle 1/r
// integral (or three Duffy-transformed order-5 rules as cross-check); cells
// substitute the equal-volume ball for the frozen part. 1/r^2 remainder
// kernels on cells drop the odd gradient term (first-order error, by policy).

struct SelfKernel {
    std::function<double(const Vec3&)> smooth;
    double sigma = 1.0;
};

/// Exact integral of 1/|x-c| over a flat triangle from an in-plane interior
/// point c (sum of per-edge asinh terms).
double analytic_inv_r_integral(const Panel& tri, const Vec3& c);

double integrate_panel_self(const SelfKernel& k, const Panel& tri, const SingularPolicy& policy);
double integrate_cell_self(const SelfKernel& k, const Cell& tet, const SingularPolicy& policy,
                           const Vec3& eval_point);

// Spec-shaped dispatch on kernel id. Throws AssemblyError for kernels whose
// singularity the element type cannot absorb.
double integrate_panel_self(kernels::KernelId id, const CoefficientField& field, const Vec3& n_x,
                            const Panel& tri, const SingularPolicy& policy);
double integrate_cell_self(kernels::KernelId id, const CoefficientField& field, const Cell& tet,
                           const SingularPolicy& policy);
double integrate_cell_self(kernels::KernelId id, const CoefficientField& field, const Cell& tet,
                           const SingularPolicy& policy, const Vec3& eval_point);

double triangle_quality(const Panel& tri); // 1 for equilateral, 0 degenerate

} // namespace bdie::quad

#endif
