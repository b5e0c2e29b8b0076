#ifndef BDIE_COEFFICIENT_HPP
#define BDIE_COEFFICIENT_HPP

#include <string>
#include <vector>

#include "bdie/types.hpp"

namespace bdie {

/// Scalar diffusion coefficient a(x) with closed-form derivatives.
///
/// Three families are supported:
///   constant     a(x) = c                      params = [c]
///   quadratic    a(x) = c + w·|x|^2            params = [c, w]
///                a(x) = c + w1 x1^2 + w2 x2^2 + w3 x3^2   params = [c, w1, w2, w3]
///   exponential  a(x) = exp(b·x)               params = [b1, b2, b3]
///
/// The kernels need a, grad a, grad ln a and lap ln a pointwise; all are
/// hand-coded per family so quadrature loops see exact values.
class CoefficientField {
public:
    enum class Family { constant, quadratic, exponential };

    struct PositivityReport {
        bool ok = false;
        double min_found = 0.0;
        double max_found = 0.0;
        Vec3 argmin{0, 0, 0};
    };

    /// Throws ConfigError on malformed params. Declared bounds are optional;
    /// pass a_min <= 0 to have validate_on() fill them from the lattice scan.
    CoefficientField(Family family, std::vector<double> params,
                     double a_min = 0.0, double a_max = 0.0);

    static Family family_from_string(const std::string& name);

    double eval(const Vec3& x) const;
    Vec3 grad(const Vec3& x) const;
    Vec3 grad_log(const Vec3& x) const { return grad(x) / eval(x); }
    double laplacian_log(const Vec3& x) const;

    /// Samples a(x) on an (n x n x n) lattice over the box.
    /// ok iff the sampled minimum is >= a_min*(1 - 1e-12).
    PositivityReport check_positivity(const Box& box, int n_samples) const;

    /// Lattice-verifies the field on the box; fills undeclared bounds from
    /// the scan. Throws ConfigError when positivity fails.
    void validate_on(const Box& box, int n_samples = 16);

    Family family() const { return family_; }
    const std::vector<double>& params() const { return params_; }
    double a_min() const { return a_min_; }
    double a_max() const { return a_max_; }
    bool is_constant() const { return family_ == Family::constant; }

private:
    Family family_;
    std::vector<double> params_;
    double a_min_;
    double a_max_;
};

} // namespace bdie

#endif
