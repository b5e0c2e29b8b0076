#include "bdie/parallel.hpp"

namespace bdie {

Vector parallel_matvec(const Matrix& A, const Vector& x) {
    const Eigen::Index n = A.rows(), m = A.cols();
    constexpr int chunks = 64;
    if (m < 4 * chunks) return A * x;
    const Eigen::Index step = (m + chunks - 1) / chunks;
    Matrix partial = Matrix::Zero(n, chunks);
#pragma omp parallel for schedule(static)
    for (int k = 0; k < chunks; ++k) {
        const Eigen::Index c0 = k * step;
        if (c0 >= m) continue;
        const Eigen::Index nc = std::min(step, m - c0);
        partial.col(k).noalias() = A.middleCols(c0, nc) * x.segment(c0, nc);
    }
    Vector y = Vector::Zero(n);
    for (int k = 0; k < chunks; ++k) y += partial.col(k);
    return y;
}

} // namespace bdie
