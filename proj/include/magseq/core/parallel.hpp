#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace magseq {

inline unsigned resolve_threads(unsigned requested) {
    if (requested != 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

// Runs fn(i) for i in [0, n). Scheduling is dynamic, so results must be
// written to per-index slots; with that discipline the output is identical
// for any thread count.
template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
    threads = resolve_threads(threads);
    if (n == 0) return;
    if (threads <= 1 || n == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    const std::size_t chunk = (n / (threads * 8)) + 1;

    auto worker = [&] {
        for (;;) {
            const std::size_t begin = next.fetch_add(chunk);
            if (begin >= n || failed.load(std::memory_order_relaxed)) return;
            const std::size_t end = begin + chunk < n ? begin + chunk : n;
            try {
                for (std::size_t i = begin; i < end; ++i) fn(i);
            } catch (...) {
                if (!failed.exchange(true)) error = std::current_exception();
                return;
            }
        }
    };

    std::vector<std::thread> pool;
    const unsigned spawned = static_cast<unsigned>(
        threads - 1 < n - 1 ? threads - 1 : n - 1);
    pool.reserve(spawned);
    for (unsigned t = 0; t < spawned; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    if (failed.load()) std::rethrow_exception(error);
}

// Splits [0, n) into one contiguous range per worker and runs
// fn(begin, end, worker) on each. Lets callers keep per-worker scratch while
// writing results to per-index slots.
template <class Fn>
void parallel_ranges(std::size_t n, unsigned threads, Fn&& fn) {
    threads = resolve_threads(threads);
    if (n == 0) return;
    const std::size_t workers = threads < n ? threads : n;
    if (workers <= 1) {
        fn(std::size_t{0}, n, unsigned{0});
        return;
    }

    std::exception_ptr error;
    std::atomic<bool> failed{false};
    auto run = [&](std::size_t begin, std::size_t end, unsigned worker) {
        try {
            fn(begin, end, worker);
        } catch (...) {
            if (!failed.exchange(true)) error = std::current_exception();
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    const std::size_t base = n / workers, extra = n % workers;
    std::size_t begin = 0;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t end = begin + base + (w < extra ? 1 : 0);
        if (w + 1 == workers)
            run(begin, end, static_cast<unsigned>(w));
        else
            pool.emplace_back(run, begin, end, static_cast<unsigned>(w));
        begin = end;
    }
    for (auto& th : pool) th.join();
    if (failed.load()) std::rethrow_exception(error);
}

} // namespace magseq
