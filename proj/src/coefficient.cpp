#include "bdie/coefficient.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bdie/errors.hpp"

namespace bdie {

CoefficientField::CoefficientField(Family family, std::vector<double> params,
                                   double a_min, double a_max)
    : family_(family), params_(std::move(params)), a_min_(a_min), a_max_(a_max) {
    switch (family_) {
    case Family::constant:
        if (params_.size() != 1)
            throw ConfigError("constant coefficient takes exactly one parameter");
        if (params_[0] <= 0.0)
            throw ConfigError("constant coefficient must be positive");
        break;
    case Family::quadratic:
        if (params_.size() != 2 && params_.size() != 4)
            throw ConfigError("quadratic coefficient takes [c, w] or [c, w1, w2, w3]");
        break;
    case Family::exponential:
        if (params_.size() != 3)
            throw ConfigError("exponential coefficient takes a 3-vector exponent");
        break;
    }
}

CoefficientField::Family CoefficientField::family_from_string(const std::string& name) {
    if (name == "constant") return Family::constant;
    if (name == "quadratic") return Family::quadratic;
    if (name == "exponential") return Family::exponential;
    throw ConfigError("unknown coefficient family '" + name + "'");
}

double CoefficientField::eval(const Vec3& x) const {
    switch (family_) {
    case Family::constant:
        return params_[0];
    case Family::quadratic:
        if (params_.size() == 2)
            return params_[0] + params_[1] * x.squaredNorm();
        return params_[0] + params_[1] * x[0] * x[0] + params_[2] * x[1] * x[1] +
               params_[3] * x[2] * x[2];
    case Family::exponential:
        return std::exp(params_[0] * x[0] + params_[1] * x[1] + params_[2] * x[2]);
    }
    return 0.0; // unreachable
}

Vec3 CoefficientField::grad(const Vec3& x) const {
    switch (family_) {
    case Family::constant:
        return Vec3::Zero();
    case Family::quadratic:
        if (params_.size() == 2)
            return 2.0 * params_[1] * x;
        return {2.0 * params_[1] * x[0], 2.0 * params_[2] * x[1], 2.0 * params_[3] * x[2]};
    case Family::exponential:
        return Vec3(params_[0], params_[1], params_[2]) * eval(x);
    }
    return Vec3::Zero();
}

double CoefficientField::laplacian_log(const Vec3& x) const {
    switch (family_) {
    case Family::constant:
        return 0.0;
    case Family::quadratic: {
        // lap ln a = lap a / a - |grad a|^2 / a^2, lap a = 2 (w1+w2+w3)
        const double a = eval(x);
        const Vec3 g = grad(x);
        double lap_a;
        if (params_.size() == 2)
            lap_a = 6.0 * params_[1];
        else
            lap_a = 2.0 * (params_[1] + params_[2] + params_[3]);
        return lap_a / a - g.squaredNorm() / (a * a);
    }
    case Family::exponential:
        return 0.0; // ln a is linear
    }
    return 0.0;
}

CoefficientField::PositivityReport CoefficientField::check_positivity(const Box& box,
                                                                      int n_samples) const {
    if (n_samples < 1)
        throw ConfigError("check_positivity needs n_samples >= 1");
    PositivityReport rep;
    rep.min_found = std::numeric_limits<double>::infinity();
    rep.max_found = -std::numeric_limits<double>::infinity();
    const int n = n_samples;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                Vec3 t(n == 1 ? 0.5 : double(i) / (n - 1), n == 1 ? 0.5 : double(j) / (n - 1),
                       n == 1 ? 0.5 : double(k) / (n - 1));
                const Vec3 x = box.lo + t.cwiseProduct(box.extent());
                const double a = eval(x);
                if (a < rep.min_found) {
                    rep.min_found = a;
                    rep.argmin = x;
                }
                rep.max_found = std::max(rep.max_found, a);
            }
    if (a_min_ > 0.0)
        rep.ok = rep.min_found >= a_min_ * (1.0 - 1e-12);
    else
        rep.ok = rep.min_found > 0.0;
    return rep;
}

void CoefficientField::validate_on(const Box& box, int n_samples) {
    const PositivityReport rep = check_positivity(box, n_samples);
    if (!rep.ok)
        throw ConfigError("coefficient is not positive on the domain: min a = " +
                          std::to_string(rep.min_found) + " at (" +
                          std::to_string(rep.argmin[0]) + ", " + std::to_string(rep.argmin[1]) +
                          ", " + std::to_string(rep.argmin[2]) + ")");
    if (a_min_ <= 0.0) a_min_ = rep.min_found;
    if (a_max_ <= 0.0) a_max_ = rep.max_found;
}

} // namespace bdie
