#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace ctxcent {

// jobs == 0 means "use available parallelism".
inline unsigned resolve_jobs(unsigned jobs) {
    if (jobs > 0)
        return jobs;
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1u : hw;
}

// Runs fn(chunk_index, begin, end) over [0, count) in fixed-size chunks.
// Chunk boundaries depend only on (count, chunk_size), so per-chunk results
// indexed by chunk_index are reproducible under any job count. The first
// exception thrown by any chunk is rethrown on the calling thread.
template <typename Fn>
void parallel_chunks(std::size_t count, std::size_t chunk_size, unsigned jobs,
                     Fn&& fn) {
    if (count == 0)
        return;
    if (chunk_size == 0)
        chunk_size = 1;
    const std::size_t n_chunks = (count + chunk_size - 1) / chunk_size;
    const unsigned workers =
        static_cast<unsigned>(std::min<std::size_t>(resolve_jobs(jobs), n_chunks));

    auto run_chunk = [&](std::size_t c) {
        const std::size_t begin = c * chunk_size;
        const std::size_t end = std::min(count, begin + chunk_size);
        fn(c, begin, end);
    };

    if (workers <= 1) {
        for (std::size_t c = 0; c < n_chunks; ++c)
            run_chunk(c);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto work = [&] {
        for (;;) {
            const std::size_t c = next.fetch_add(1, std::memory_order_relaxed);
            if (c >= n_chunks)
                return;
            try {
                run_chunk(c);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error)
                    first_error = std::current_exception();
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (unsigned w = 1; w < workers; ++w)
        pool.emplace_back(work);
    work();
    for (auto& t : pool)
        t.join();
    if (first_error)
        std::rethrow_exception(first_error);
}

// Mean/variance accumulator that merges associatively (Chan et al.), so
// per-chunk partials can be reduced in a fixed order.
struct RunningStats {
    long long count = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        ++count;
        const double delta = x - mean;
        mean += delta / static_cast<double>(count);
        m2 += delta * (x - mean);
    }

    void merge(const RunningStats& other) {
        if (other.count == 0)
            return;
        if (count == 0) {
            *this = other;
            return;
        }
        const double total = static_cast<double>(count + other.count);
        const double delta = other.mean - mean;
        mean += delta * static_cast<double>(other.count) / total;
        m2 += other.m2 +
              delta * delta * static_cast<double>(count) *
                  static_cast<double>(other.count) / total;
        count += other.count;
    }

    double sample_variance() const {
        return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0;
    }

    double std_error() const {
        return count > 0
                   ? std::sqrt(sample_variance() / static_cast<double>(count))
                   : 0.0;
    }
};

} // namespace ctxcent
