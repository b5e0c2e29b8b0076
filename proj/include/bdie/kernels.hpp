#ifndef BDIE_KERNELS_HPP
#define BDIE_KERNELS_HPP

#include <cmath>
#include <string>

#include "bdie/coefficient.hpp"
#include "bdie/errors.hpp"
#include "bdie/types.hpp"

// Pointwise kernels.
//
//   P_D(x-y)   = -1/(4 pi |x-y|)                 Laplace fundamental solution
//   Px(x,y)    = P_D(x-y)/a(x)                   parametrix in a(x)
//   Py(x,y)    = P_D(x-y)/a(y)                   parametrix in a(y)
//   Rx(x,y)    = -lap ln a(x) P_D - grad ln a(x) . grad_x P_D
//   Ry(x,y)    = (grad a(x) . grad_x P_D)/a(y)
//   Tx Px(x,y) = n_x . grad_x P_D - P_D (n_x . grad ln a(x))
//
// Rx above is the expanded form of the divergence expression
// -sum_i d/dx_i (d ln a/dx_i P_D); the divergence form stays in the tests
// as a finite-difference oracle.

namespace bdie::kernels {

enum class KernelId {
    laplace,
    parametrix_x,
    parametrix_y,
    remainder_x,
    remainder_y,
    conormal_x,
    laplace_conormal,
};

std::string to_string(KernelId id);

/// Minimum source/target separation; below it evaluation throws
/// SingularityError. Scaled from the domain diameter by the caller.
struct Guard {
    double eps_sing = 1e-300;

    void check(double r2) const {
        if (r2 < eps_sing * eps_sing)
            throw SingularityError("kernel evaluated at coincident points; "
                                   "route through the singular quadrature path");
    }
};

inline double laplace_fundamental(const Vec3& x, const Vec3& y, const Guard& g = {}) {
    const double r2 = (x - y).squaredNorm();
    g.check(r2);
    return -1.0 / (four_pi * std::sqrt(r2));
}

inline Vec3 laplace_gradient_x(const Vec3& x, const Vec3& y, const Guard& g = {}) {
    const Vec3 d = x - y;
    const double r2 = d.squaredNorm();
    g.check(r2);
    const double r = std::sqrt(r2);
    return d / (four_pi * r2 * r);
}

inline double parametrix_x(const Vec3& x, const Vec3& y, const CoefficientField& a,
                           const Guard& g = {}) {
    return laplace_fundamental(x, y, g) / a.eval(x);
}

inline double parametrix_y(const Vec3& x, const Vec3& y, const CoefficientField& a,
                           const Guard& g = {}) {
    return laplace_fundamental(x, y, g) / a.eval(y);
}

inline double remainder_x(const Vec3& x, const Vec3& y, const CoefficientField& a,
                          const Guard& g = {}) {
    return -a.laplacian_log(x) * laplace_fundamental(x, y, g) -
           a.grad_log(x).dot(laplace_gradient_x(x, y, g));
}

inline double remainder_y(const Vec3& x, const Vec3& y, const CoefficientField& a,
                          const Guard& g = {}) {
    return a.grad(x).dot(laplace_gradient_x(x, y, g)) / a.eval(y);
}

/// Conormal derivative of the parametrix, T_x Px(x,y); the a(x) factors
/// cancel in the product-rule expansion.
inline double conormal_x_kernel(const Vec3& x, const Vec3& n_x, const Vec3& y,
                                const CoefficientField& a, const Guard& g = {}) {
    return n_x.dot(laplace_gradient_x(x, y, g)) -
           laplace_fundamental(x, y, g) * n_x.dot(a.grad_log(x));
}

inline double laplace_conormal(const Vec3& x, const Vec3& n_x, const Vec3& y,
                               const Guard& g = {}) {
    return n_x.dot(laplace_gradient_x(x, y, g));
}

} // namespace bdie::kernels

#endif
