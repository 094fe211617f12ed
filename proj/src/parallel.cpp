#include "tossfuse/parallel.hpp"

#include <atomic>
#include <cstdlib>

namespace tossfuse {

namespace {

unsigned default_cap() {
    if (const char* env = std::getenv("TOSSFUSE_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1u : hw;
}

std::atomic<unsigned> g_cap{0};  // 0 = not set yet

}  // namespace

void set_thread_cap(unsigned n) { g_cap.store(n == 0 ? 1u : n); }

unsigned thread_cap() {
    unsigned c = g_cap.load();
    if (c == 0) {
        c = default_cap();
        g_cap.store(c);
    }
    return c;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    const unsigned cap = thread_cap();
    if (cap <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const std::size_t workers = std::min<std::size_t>(cap, n);
    const std::size_t block = (n + workers - 1) / workers;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t lo = w * block;
        const std::size_t hi = std::min(n, lo + block);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (std::size_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace tossfuse
