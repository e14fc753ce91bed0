#ifndef TDLSM_MATH_HPP
#define TDLSM_MATH_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <thread>
#include <vector>

namespace tdlsm {

using Vec3 = Eigen::Vector3d;
using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

/// Number of worker threads used by the data-parallel loops below.
/// Defaults to the hardware concurrency; override via set_num_workers().
inline int& num_workers()
{
    static int n = std::max(1u, std::thread::hardware_concurrency());
    return n;
}

inline void set_num_workers(int n)
{
    if (n < 1) throw std::invalid_argument("worker count must be >= 1");
    num_workers() = n;
}

/// Static-partition parallel loop over [begin, end). Falls back to a plain
/// loop for a single worker or tiny ranges.
inline void parallel_for(std::int64_t begin, std::int64_t end,
                         const std::function<void(std::int64_t)>& body)
{
    const std::int64_t n = end - begin;
    const int nw = std::min<std::int64_t>(num_workers(), n);
    if (nw <= 1) {
        for (std::int64_t i = begin; i < end; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(nw);
    for (int w = 0; w < nw; ++w) {
        const std::int64_t lo = begin + n * w / nw;
        const std::int64_t hi = begin + n * (w + 1) / nw;
        pool.emplace_back([&, lo, hi] {
            for (std::int64_t i = lo; i < hi; ++i) body(i);
        });
    }
    for (auto& t : pool) t.join();
}

inline std::size_t next_pow2(std::size_t n)
{
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

} // namespace tdlsm

#endif
