#ifndef GAZE_PARALLEL_HPP
#define GAZE_PARALLEL_HPP

#include <algorithm>
#include <cstddef>

namespace gaze::par {

bool openmp_available();
int max_threads();

// Forces every parallel_for onto the plain serial path. Used by tests and
// the benchmark to compare the two paths on identical work.
void set_force_serial(bool v);
bool force_serial();

namespace detail {
template <class F>
void serial_for(std::size_t n, F&& fn) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
}
}  // namespace detail

#ifdef _OPENMP
template <class F>
void parallel_for(std::size_t n, F&& fn) {
    if (force_serial() || n < 2) {
        detail::serial_for(n, fn);
        return;
    }
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(n); ++i)
        fn(static_cast<std::size_t>(i));
}
#else
template <class F>
void parallel_for(std::size_t n, F&& fn) {
    detail::serial_for(n, fn);
}
#endif

// Fixed block size for floating-point reductions. Work is split into blocks
// of this size, each block is accumulated sequentially, and the per-block
// partials are combined in block order, so the arithmetic is identical on
// the serial and parallel paths and independent of the thread count.
constexpr std::size_t kReduceBlock = 64;

inline std::size_t block_count(std::size_t n) {
    return (n + kReduceBlock - 1) / kReduceBlock;
}

// Runs fn(block_index, begin, end) once per block, possibly in parallel.
// fn must only write state owned by its block index.
template <class F>
void for_each_block(std::size_t n, F&& fn) {
    const std::size_t blocks = block_count(n);
    parallel_for(blocks, [&](std::size_t b) {
        const std::size_t begin = b * kReduceBlock;
        const std::size_t end = std::min(n, begin + kReduceBlock);
        fn(b, begin, end);
    });
}

}  // namespace gaze::par

#endif
