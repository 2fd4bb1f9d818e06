#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace mulsemi {

/// Worker count used by per-cell loops. Defaults to 1. Results never depend
/// on this value: workers only fill disjoint output slots and every reduction
/// runs sequentially afterwards in cell order.
void set_thread_count(unsigned threads);
unsigned thread_count() noexcept;

/// Calls body(i) for i in [0, n). If any call throws, the exception of the
/// smallest failing index is rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

template <typename T, typename F>
std::vector<T> parallel_map(std::size_t n, F&& fn) {
    std::vector<T> out(n);
    parallel_for(n, [&](std::size_t i) { out[i] = fn(i); });
    return out;
}

}  // namespace mulsemi
