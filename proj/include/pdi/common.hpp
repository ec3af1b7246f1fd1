#pragma once

#include <cstdint>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>
#include <thread>
#include <functional>
#include <cstdlib>

namespace pdi {

// Shared numeric tolerances — single source of truth (kernels + verify).
namespace tol {
inline constexpr double psd_eigen = 1e-8;       // λ_min ≥ −psd_eigen·max(1, λ_max)
inline constexpr double rel_check = 1e-9;       // relative tolerance of invariant checks
inline constexpr double abs_floor = 1e-12;      // absolute floor of invariant checks
inline constexpr double weight_zero = 1e-15;    // atom weight drop threshold (×TV)
inline constexpr double gram_asym = 1e-10;      // allowed Gram asymmetry (relative)
}  // namespace tol

struct capacity_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Exact binomial coefficient; inputs are small (n ≤ 64) throughout.
inline std::uint64_t binomial(int n, int k) {
    if (k < 0 || n < 0 || k > n) return 0;
    if (k > n - k) k = n - k;
    std::uint64_t r = 1;
    for (int i = 0; i < k; ++i) {
        r = r * static_cast<std::uint64_t>(n - i) / static_cast<std::uint64_t>(i + 1);
    }
    return r;
}

// ---------------------------------------------------------------------------
// Counter-based RNG: splitmix64 over (seed, stream, counter).  Replicate
// streams are independent of evaluation order, which is what makes the
// permutation test deterministic under any thread count.
// ---------------------------------------------------------------------------
inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream)
        : key_(splitmix64(splitmix64(seed) ^ (0x6a09e667f3bcc909ULL + splitmix64(~stream)))) {}

    std::uint64_t next_u64() { return splitmix64(key_ + counter_++ * 0x9e3779b97f4a7c15ULL); }

    // Uniform in [0,1) from the top 53 bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Box–Muller; two counters per draw, no cached state.
    double normal() {
        double u1 = uniform(), u2 = uniform();
        if (u1 <= 0) u1 = 0x1.0p-53;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    // Integer in [0, m)
    std::uint64_t below(std::uint64_t m) { return next_u64() % m; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

// Worker cap: PDI_THREADS env var, 0/unset = hardware concurrency.
inline unsigned worker_count() {
    if (const char* env = std::getenv("PDI_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

// Deterministic parallel map: body(i) fills an indexed slot; scheduling never
// affects results because every slot is keyed by its own index.
inline void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
    unsigned workers = worker_count();
    if (workers <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    if (workers > count) workers = static_cast<unsigned>(count);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < count; i += workers) body(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace pdi
