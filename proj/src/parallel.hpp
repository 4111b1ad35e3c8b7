#pragma once

#include <cstddef>
#include <exception>
#include <vector>

#include "renewcast/rng.hpp"

namespace renewcast::detail {

/// Runs fn(i) for i in [0, n). With Execution::parallel the iterations are
/// spread over OpenMP threads; each fn(i) must only write state owned by i.
/// The exception of the lowest failing index is rethrown afterwards.
template <class Fn>
void parallel_for(std::size_t n, Execution exec, Fn&& fn) {
    std::vector<std::exception_ptr> errors(n);
    const auto count = static_cast<std::ptrdiff_t>(n);
    const bool threaded = exec == Execution::parallel && n > 1;
#pragma omp parallel for schedule(dynamic, 8) if (threaded)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
        try {
            fn(static_cast<std::size_t>(i));
        } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

}  // namespace renewcast::detail
