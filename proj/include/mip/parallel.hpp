#pragma once

#include <cstddef>
#include <memory>
#include <type_traits>

namespace mip {

// Global worker-thread setting. 1 selects the serial reference path (a plain
// loop, no OpenMP involvement); 0 means "hardware default". Every parallel
// kernel in this project writes disjoint outputs or reduces in a fixed order,
// so results are identical for any setting. tests/test_parallel.cpp checks
// that byte-for-byte, and tools/mip_bench.cpp compares the two paths' speed.
int max_threads();
void set_max_threads(int n);
int hardware_threads();

namespace detail {
void parallel_for_impl(size_t n, void* ctx, void (*fn)(void*, size_t));
void serial_for_impl(size_t n, void* ctx, void (*fn)(void*, size_t));
}  // namespace detail

template <typename F>
void parallel_for(size_t n, F&& f) {
    using Fn = std::remove_reference_t<F>;
    auto thunk = [](void* ctx, size_t i) { (*static_cast<Fn*>(ctx))(i); };
    if (max_threads() == 1) {
        detail::serial_for_impl(n, std::addressof(f), thunk);
    } else {
        detail::parallel_for_impl(n, std::addressof(f), thunk);
    }
}

// Serial reference path, kept callable directly for tests and benchmarks.
template <typename F>
void serial_for(size_t n, F&& f) {
    using Fn = std::remove_reference_t<F>;
    auto thunk = [](void* ctx, size_t i) { (*static_cast<Fn*>(ctx))(i); };
    detail::serial_for_impl(n, std::addressof(f), thunk);
}

}  // namespace mip
