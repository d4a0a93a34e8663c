#include "mip/parallel.hpp"

#include <atomic>
#include <thread>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mip {

namespace {
std::atomic<int> g_max_threads{0};
}

int hardware_threads() {
    unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : static_cast<int>(n);
}

int max_threads() {
    int n = g_max_threads.load(std::memory_order_relaxed);
    return n <= 0 ? hardware_threads() : n;
}

void set_max_threads(int n) {
    g_max_threads.store(n, std::memory_order_relaxed);
}

namespace detail {

void serial_for_impl(size_t n, void* ctx, void (*fn)(void*, size_t)) {
    for (size_t i = 0; i < n; ++i) fn(ctx, i);
}

void parallel_for_impl(size_t n, void* ctx, void (*fn)(void*, size_t)) {
#ifdef _OPENMP
    int threads = max_threads();
#pragma omp parallel for schedule(static) num_threads(threads)
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
        fn(ctx, static_cast<size_t>(i));
    }
#else
    serial_for_impl(n, ctx, fn);
#endif
}

}  // namespace detail
}  // namespace mip
