#ifndef BDIE_PARALLEL_HPP
#define BDIE_PARALLEL_HPP

#include <atomic>
#include <exception>
#include <mutex>

#include "bdie/types.hpp"

namespace bdie {

enum class Execution { parallel, serial };

/// Row-parallel driver: rows are independent, each writes its own output, so
/// results are identical to the serial reference for any thread count.
/// Exceptions from worker rows are rethrown after the loop joins.
template <class RowFn>
void for_each_row(int n_rows, Execution exec, RowFn&& fn) {
    if (exec == Execution::serial) {
        for (int t = 0; t < n_rows; ++t) fn(t);
        return;
    }
    std::atomic<bool> failed{false};
    std::exception_ptr err;
    std::mutex mu;
#pragma omp parallel for schedule(dynamic, 4)
    for (int t = 0; t < n_rows; ++t) {
        if (failed.load(std::memory_order_relaxed)) continue;
        try {
            fn(t);
        } catch (...) {
            std::scoped_lock lock(mu);
            if (!failed.exchange(true)) err = std::current_exception();
        }
    }
    if (err) std::rethrow_exception(err);
}

/// y = A*x over fixed column chunks: partial products go into fixed slots and
/// are reduced in slot order, so the result does not depend on thread count.
Vector parallel_matvec(const Matrix& A, const Vector& x);

} // namespace bdie

#endif
