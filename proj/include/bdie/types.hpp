#ifndef BDIE_TYPES_HPP
#define BDIE_TYPES_HPP

#include <Eigen/Core>
#include <numbers>

namespace bdie {

using Vec3 = Eigen::Vector3d;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr double pi = std::numbers::pi;
inline constexpr double four_pi = 4.0 * std::numbers::pi;

/// Axis-aligned box, used for coefficient positivity scans.
struct Box {
    Vec3 lo{0, 0, 0};
    Vec3 hi{0, 0, 0};
    Vec3 extent() const { return hi - lo; }
    double diameter() const { return (hi - lo).norm(); }
};

} // namespace bdie

#endif
