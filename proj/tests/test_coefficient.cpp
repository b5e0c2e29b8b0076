#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "bdie/coefficient.hpp"
#include "bdie/errors.hpp"
#include "support.hpp"

using namespace bdie;
using testing::fd_gradient;
using testing::fd_laplacian;
using testing::random_point;

namespace {

CoefficientField constant2() { return {CoefficientField::Family::constant, {2.0}}; }
CoefficientField quadratic_iso() { return {CoefficientField::Family::quadratic, {1.0, 1.0}}; }
CoefficientField quadratic_x1() {
    return {CoefficientField::Family::quadratic, {1.0, 1.0, 0.0, 0.0}};
}
CoefficientField exponential_x1() {
    return {CoefficientField::Family::exponential, {1.0, 0.0, 0.0}};
}

} // namespace

TEST_CASE("eval matches the closed forms") {
    CHECK(constant2().eval({1, 2, 3}) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(quadratic_iso().eval({1, 0, 0}) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(exponential_x1().eval({1, 0, 0}) == doctest::Approx(std::exp(1.0)).epsilon(1e-15));
    CHECK(quadratic_x1().eval({0.5, 2, -3}) == doctest::Approx(1.25).epsilon(1e-15));
}

TEST_CASE("grad_log: analytic values against the finite-difference oracle") {
    // constant family: identically zero
    CHECK(constant2().grad_log({0.3, -0.2, 0.9}).norm() == 0.0);
    // exponential: grad ln a is the exponent vector
    CHECK((exponential_x1().grad_log({0.7, 0.1, -0.4}) - Vec3(1, 0, 0)).norm() == 0.0);
    // quadratic at (1,0,0): oracle h=1e-5 on ln a
    const auto f = quadratic_iso();
    auto ln_a = [&](const Vec3& x) { return std::log(f.eval(x)); };
    const Vec3 fd = fd_gradient(ln_a, {1, 0, 0}, 1e-5);
    CHECK((f.grad_log({1, 0, 0}) - fd).norm() < 1e-9);
    CHECK((f.grad_log({1, 0, 0}) - Vec3(1, 0, 0)).norm() < 1e-12);
}

TEST_CASE("laplacian_log: analytic values against the finite-difference oracle") {
    CHECK(constant2().laplacian_log({1, 2, 3}) == 0.0);
    CHECK(exponential_x1().laplacian_log({0.4, -0.3, 0.2}) == 0.0);
    const auto f = quadratic_iso();
    auto ln_a = [&](const Vec3& x) { return std::log(f.eval(x)); };
    const double fd = fd_laplacian(ln_a, Vec3::Zero(), 1e-4);
    CHECK(f.laplacian_log(Vec3::Zero()) == doctest::Approx(6.0).epsilon(1e-12));
    CHECK(f.laplacian_log(Vec3::Zero()) == doctest::Approx(fd).epsilon(1e-6));
}

TEST_CASE("grad_log * a - grad = 0 at 1000 random points per family") {
    const CoefficientField fields[] = {constant2(), quadratic_iso(), quadratic_x1(),
                                       exponential_x1()};
    for (const auto& f : fields) {
        double worst = 0.0;
        for (int i = 0; i < 1000; ++i) {
            const Vec3 x = random_point(-1.0, 1.0);
            worst = std::max(worst, (f.grad_log(x) * f.eval(x) - f.grad(x)).norm());
        }
        CHECK(worst < 1e-13);
    }
}

TEST_CASE("central-difference convergence of grad is O(h^2)") {
    const CoefficientField fields[] = {quadratic_iso(), exponential_x1()};
    for (const auto& f : fields) {
        auto a = [&](const Vec3& x) { return f.eval(x); };
        double err_coarse = 0.0, err_fine = 0.0;
        for (int i = 0; i < 50; ++i) {
            const Vec3 x = random_point(-0.9, 0.9);
            err_coarse = std::max(err_coarse, (fd_gradient(a, x, 1e-2) - f.grad(x)).norm());
            err_fine = std::max(err_fine, (fd_gradient(a, x, 5e-3) - f.grad(x)).norm());
        }
        if (err_fine > 1e-10) // quadratic is exact for central differences
            CHECK(err_coarse / err_fine >= 3.5);
    }
}

TEST_CASE("check_positivity") {
    const Box box{{-1, -1, -1}, {1, 1, 1}};

    auto rep = constant2().check_positivity(box, 9);
    CHECK(rep.ok);
    CHECK(rep.min_found == doctest::Approx(2.0).epsilon(1e-15));

    rep = quadratic_iso().check_positivity(box, 9); // odd lattice hits the origin
    CHECK(rep.ok);
    CHECK(rep.min_found == doctest::Approx(1.0).epsilon(1e-15));

    // sign change: a = 1 - 2|x|^2
    CoefficientField bad(CoefficientField::Family::quadratic, {1.0, -2.0});
    rep = bad.check_positivity(box, 9);
    CHECK_FALSE(rep.ok);
    CHECK(rep.min_found < 0.0);
    CHECK_THROWS_AS(bad.validate_on(box), ConfigError);

    // degenerate at the origin: a = x1^2
    CoefficientField zero_line(CoefficientField::Family::quadratic, {0.0, 1.0, 0.0, 0.0});
    CHECK_FALSE(zero_line.check_positivity(box, 9).ok);
}

TEST_CASE("declared bounds are lattice-verified") {
    CoefficientField f(CoefficientField::Family::quadratic, {1.0, 1.0}, 1.0, 4.0);
    const Box box{{-1, -1, -1}, {1, 1, 1}};
    CHECK(f.check_positivity(box, 9).ok);
    CoefficientField too_high(CoefficientField::Family::quadratic, {1.0, 1.0}, 1.5, 4.0);
    CHECK_FALSE(too_high.check_positivity(box, 9).ok); // min 1 < declared 1.5
}

TEST_CASE("malformed parameters are rejected") {
    CHECK_THROWS_AS(CoefficientField(CoefficientField::Family::constant, {-1.0}), ConfigError);
    CHECK_THROWS_AS(CoefficientField(CoefficientField::Family::quadratic, {1.0, 2.0, 3.0}),
                    ConfigError);
    CHECK_THROWS_AS(CoefficientField(CoefficientField::Family::exponential, {1.0}), ConfigError);
    CHECK_THROWS_AS(CoefficientField::family_from_string("cubic"), ConfigError);
}
