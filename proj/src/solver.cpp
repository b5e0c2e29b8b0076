#include "bdie/solver.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "bdie/errors.hpp"

namespace bdie {

GmresResult gmres(const std::function<Vector(const Vector&)>& apply, const Vector& b, Vector& x,
                  const GmresOptions& opts) {
    GmresResult res;
    const Eigen::Index n = b.size();
    if (x.size() != n) x = Vector::Zero(n);
    const double bnorm = b.norm();
    if (bnorm == 0.0) {
        x.setZero();
        res.converged = true;
        res.rel_residual = 0.0;
        return res;
    }
    const int m = std::max(1, opts.restart);
    Matrix V(n, m + 1);
    Matrix H = Matrix::Zero(m + 1, m);
    Vector cs(m), sn(m), g(m + 1);
    double cond = 0.0;

    int total_it = 0;
    while (total_it < opts.max_iterations) {
        Vector r = b - apply(x);
        double beta = r.norm();
        res.rel_residual = beta / bnorm;
        if (res.rel_residual <= opts.tol) {
            res.converged = true;
            break;
        }
        V.col(0) = r / beta;
        g.setZero();
        g[0] = beta;
        int k = 0;
        for (; k < m && total_it < opts.max_iterations; ++k, ++total_it) {
            Vector w = apply(V.col(k));
            for (int i = 0; i <= k; ++i) {
                H(i, k) = w.dot(V.col(i));
                w.noalias() -= H(i, k) * V.col(i);
            }
            H(k + 1, k) = w.norm();
            if (H(k + 1, k) > 0.0) V.col(k + 1) = w / H(k + 1, k);
            // apply accumulated Givens rotations, then the new one
            for (int i = 0; i < k; ++i) {
                const double t = cs[i] * H(i, k) + sn[i] * H(i + 1, k);
                H(i + 1, k) = -sn[i] * H(i, k) + cs[i] * H(i + 1, k);
                H(i, k) = t;
            }
            const double denom = std::hypot(H(k, k), H(k + 1, k));
            if (denom == 0.0) {
                cs[k] = 1.0;
                sn[k] = 0.0;
            } else {
                cs[k] = H(k, k) / denom;
                sn[k] = H(k + 1, k) / denom;
            }
            H(k, k) = denom;
            H(k + 1, k) = 0.0;
            g[k + 1] = -sn[k] * g[k];
            g[k] = cs[k] * g[k];
            res.rel_residual = std::abs(g[k + 1]) / bnorm;
            if (res.rel_residual <= opts.tol) {
                ++k;
                ++total_it;
                break;
            }
        }
        if (k > 0) {
            // back substitution on the triangularized Hessenberg
            Vector yk = Vector::Zero(k);
            for (int i = k - 1; i >= 0; --i) {
                double s = g[i];
                for (int j = i + 1; j < k; ++j) s -= H(i, j) * yk[j];
                yk[i] = s / H(i, i);
            }
            x.noalias() += V.leftCols(k) * yk;
            const auto svals =
                H.topLeftCorner(k, k).jacobiSvd().singularValues();
            if (svals.size() > 0 && svals(svals.size() - 1) > 0.0)
                cond = std::max(cond, svals(0) / svals(svals.size() - 1));
        }
        if (res.converged) break;
        if (res.rel_residual <= opts.tol) {
            res.converged = true;
            break;
        }
    }
    // final true residual
    res.rel_residual = (b - apply(x)).norm() / bnorm;
    if (res.rel_residual <= opts.tol) res.converged = true;
    res.iterations = total_it;
    res.cond_estimate = cond;
    return res;
}

} // namespace bdie
