#ifndef BDIE_SOLVER_HPP
#define BDIE_SOLVER_HPP

#include <functional>

#include "bdie/types.hpp"

namespace bdie {

struct GmresOptions {
    double tol = 1e-10; // relative residual
    int restart = 400;
    int max_iterations = 5000;
};

struct GmresResult {
    bool converged = false;
    int iterations = 0;
    double rel_residual = 0.0;
    double cond_estimate = 0.0; // from the Krylov Hessenberg, a lower bound
};

/// Restarted GMRES (modified Gram-Schmidt Arnoldi, Givens rotations).
/// x holds the initial guess on entry and the solution on exit.
GmresResult gmres(const std::function<Vector(const Vector&)>& apply, const Vector& b, Vector& x,
                  const GmresOptions& opts);

} // namespace bdie

#endif
